import io
import math

import numpy as np
import pytest

import slidedrop.acceptance as acceptance
from slidedrop.acceptance import CriterionResult
from slidedrop.cli import run

PARAMS = ["--params.V0", "1", "--params.kappa", "1", "--params.alpha", repr(math.pi / 6)]


def invoke(*args):
    buf = io.StringIO()
    code = run(list(args), stdout=buf)
    return code, buf.getvalue()


def table(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return lines[0].split(","), np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])


def test_tables_output():
    code, out = invoke("tables", *PARAMS, "--run.count", "50")
    assert code == 0
    assert out.startswith("# slidedrop 0.1.0 tables\n# config: ")
    cols, data = table(out)
    assert cols == ["ell", "G", "H", "F"]
    assert np.all(np.diff(data[:, 1]) <= 0) and np.all(np.diff(data[:, 2]) <= 0)
    assert np.allclose(data[:, 2] - data[:, 1], 0.5, rtol=0, atol=1e-9 * data[:, 2].max())
    assert "# ell_c = 3.77904914" in out


def test_floats_round_trip():
    _, out = invoke("tables", *PARAMS, "--run.count", "5")
    for ln in out.splitlines():
        if not ln.startswith("#") and not ln.startswith("ell"):
            for v in ln.split(","):
                assert repr(float(v)) == v


def test_output_is_deterministic():
    args = ("simulate", *PARAMS, "--beta.kind", "sine", "--beta.amplitude", "0.2", "--run.T", "1")
    assert invoke(*args) == invoke(*args)


def test_rq_plateau():
    code, out = invoke("rq", "--beta.kind", "sine", "--beta.amplitude", "0.3", "--run.q_min", "0",
                       "--run.q_max", "2", "--run.count", "21", *PARAMS)
    assert code == 0
    _, data = table(out)
    inside = (data[:, 0] >= 0.7) & (data[:, 0] <= 1.3)
    assert np.all(data[inside, 1] == 0.0)
    assert np.all(data[data[:, 0] > 1.3, 1] > 0) and np.all(data[data[:, 0] < 0.7, 1] < 0)


def test_tw_linear_law():
    code, out = invoke("tw", *PARAMS, "--run.drive_min", "1", "--run.drive_max", "3",
                       "--run.count", "3")
    assert code == 0
    cols, data = table(out)
    speed = data[:, cols.index("speed")]
    assert speed == pytest.approx([0.5, 1.0, 2.0], rel=1e-12)


def test_config_file_with_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# drop\nparams.V0 = 1\nparams.kappa = 1\nparams.alpha = 0.5235987755982988\n"
                   "run.count = 7\n")
    code, out = invoke("tables", "--config", str(cfg), "--run.count=4")
    assert code == 0
    assert len(table(out)[1]) == 4
    assert "run.count=4" in out


def test_output_file(tmp_path):
    dest = tmp_path / "tab.csv"
    code, out = invoke("tables", *PARAMS, "-o", str(dest))
    assert code == 0 and out == ""
    assert dest.read_text().startswith("# slidedrop")


@pytest.mark.parametrize("args", [
    ["tables", "--params.V0", "1", "--params.kappa", "1", "--params.alpha", "1.5707963267948966"],
    ["tables", "--params.V0", "1", "--params.kappa", "1"],
    ["tables", *PARAMS, "--params.bogus", "1"],
    ["simulate", *PARAMS, "--beta.kind", "sine", "--beta.amplitude", "1.5"],
    ["tables", *PARAMS, "--params.V0", "-1"],
    ["pulsate", *PARAMS, "--beta.kind", "sine", "--beta.amplitude", "0.4", "--params.V0", "1"],
])
def test_invalid_input_exits_2(args):
    assert invoke(*args)[0] == 2


def test_numerical_failure_exits_3():
    code, _ = invoke("simulate", *PARAMS, "--beta.value", "100", "--run.h", "0.5", "--run.a", "0",
                     "--run.b", "2", "--run.T", "1")
    assert code == 3


def test_failed_run_leaves_no_file(tmp_path):
    dest = tmp_path / "out.csv"
    code, _ = invoke("pulsate", *PARAMS, "--beta.kind", "sine", "--beta.amplitude", "0.4",
                     "-o", str(dest))
    assert code == 2
    assert list(tmp_path.iterdir()) == []


def test_check_reports_failure(monkeypatch):
    ok = lambda: CriterionResult(1, "fine", True, "ok")
    bad = lambda: CriterionResult(2, "broken", False, "off by one")
    monkeypatch.setattr(acceptance, "CRITERIA", {1: ok, 2: bad})
    code, out = invoke("check")
    assert code == 4
    assert "[FAIL] criterion  2" in out and "acceptance: 1/2 criteria passed" in out
