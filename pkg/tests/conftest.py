import math

import pytest
from hypothesis import HealthCheck, settings

from slidedrop.equilibrium import PhysicalParams
from slidedrop.tables import SlopeTables

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def base_params():
    return PhysicalParams(1.0, 1.0, math.pi / 6)


@pytest.fixture(scope="session")
def base_tables(base_params):
    return SlopeTables(base_params)


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
