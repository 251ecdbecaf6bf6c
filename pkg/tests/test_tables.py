import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from slidedrop._cache import DyadicCache
from slidedrop.equilibrium import PhysicalParams
from slidedrop.errors import PreconditionError
from slidedrop.oracle import fd_slopes_extrapolated
from slidedrop.tables import UNBOUNDED, SlopeTables


def test_identity_at_base(base_tables):
    ells = np.linspace(0.2, base_tables.ell_c, 25)
    for ell, g, h, f in base_tables.table(ells):
        assert h - g == pytest.approx(0.5, abs=1e-15 * max(1.0, h) + 1e-15)
        assert f == pytest.approx(g + h, abs=0)


def test_values_against_oracle(base_tables, base_params):
    _, sa, sb = fd_slopes_extrapolated(0.0, 2.0, base_params, 1024)
    g, h = base_tables.exact(2.0)
    assert g == pytest.approx(0.5 * sa**2, abs=1e-8)
    assert h == pytest.approx(0.5 * sb**2, abs=1e-8)


def test_frozen_beyond_critical_length(base_tables):
    for ell in (base_tables.ell_c, 5.0, 100.0):
        assert base_tables.pair(ell) == (0.0, base_tables.params.drive)
    assert base_tables.exact(base_tables.ell_c) == (0.0, base_tables.params.drive)


@given(ell=st.floats(0.01, 3.7))
def test_cached_close_to_exact(base_tables, ell):
    g, h = base_tables.pair(ell)
    ge, he = base_tables.exact(ell)
    assert g == pytest.approx(ge, rel=1e-6, abs=1e-7)
    assert h == pytest.approx(he, rel=1e-6, abs=1e-7)


def test_cached_tables_are_monotone(base_tables):
    ells = np.linspace(0.01, base_tables.ell_c, 3001)
    G = base_tables.G(ells)
    H = base_tables.H(ells)
    assert np.all(np.diff(G) <= 0)
    assert np.all(np.diff(H) <= 0)
    assert np.all(G >= 0)


@pytest.mark.parametrize("level", [0.6, 1.0, 1.4, 10.0])
def test_h_inverse_roundtrip(base_tables, level):
    ell = base_tables.H_inverse(level)
    assert base_tables.exact(ell)[1] == pytest.approx(level, rel=1e-11)
    assert ell < base_tables.ell_c


def test_h_inverse_refuses_unreachable_level(base_tables):
    with pytest.raises(PreconditionError):
        base_tables.H_inverse(0.4)


def test_unbounded_tables():
    tab = SlopeTables(PhysicalParams(1.0, 1.0, 0.0))
    assert tab.ell_c is UNBOUNDED and not tab.bounded
    g, h = tab.pair(3.0)
    assert g == pytest.approx(h, rel=1e-6)


def test_uncached_equals_exact(base_params):
    tab = SlopeTables(base_params, cached=False)
    assert tab.pair(1.234) == tab.exact(1.234)


def test_rejects_nonpositive_length(base_tables):
    with pytest.raises(PreconditionError):
        base_tables.pair(0.0)


def test_cache_concurrent_queries_are_consistent():
    calls = []

    def f(x):
        calls.append(x)
        return (math.exp(-x), 1.0 / x)

    cache = DyadicCache(f, 0.1, 10.0, log=True, atol=1e-8, rtol=1e-8)
    xs = np.linspace(0.11, 9.9, 400)
    with ThreadPoolExecutor(4) as pool:
        first = list(pool.map(lambda x: cache(x), xs))
    second = [cache(x) for x in xs]
    assert all(np.array_equal(a, b) for a, b in zip(first, second))
    for x, v in zip(xs, second):
        # acceptance rule per cell is |error| <= atol + rtol |f| at the midpoint
        assert v[0] == pytest.approx(math.exp(-x), rel=2e-8, abs=2e-8)
        assert v[1] == pytest.approx(1.0 / x, rel=2e-8, abs=2e-8)
    assert cache.size <= len(calls)


def test_cache_outside_range_falls_back():
    cache = DyadicCache(lambda x: (x * x,), 1.0, 2.0)
    assert cache(3.0)[0] == 9.0
    with pytest.raises(ValueError):
        DyadicCache(lambda x: (x,), 0.0, 1.0, log=True)
