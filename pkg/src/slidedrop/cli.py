"""Command line front end: ``slidedrop <command> [--config FILE] [--section.key VALUE ...]``.

Every command writes CSV (or a short report) whose first lines are ``#``
comments carrying the resolved configuration.  Exit codes: 0 success,
2 configuration error, 3 numerical failure, 4 failed checks.
"""

from __future__ import annotations

import argparse
import io
import logging
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .errors import ConfigError, NumericalError, PreconditionError, SlidingDropError

log = logging.getLogger("slidedrop")

COMMANDS = ("simulate", "tables", "tw", "pulsate", "rq", "homogenize", "stick", "check")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_CHECK = 0, 2, 3, 4


def _fmt(v) -> str:
    return repr(float(v))


def _csv(header, rows) -> str:
    out = [",".join(header)]
    out.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(out) + "\n"


def _initial_state(cfg, tables):
    from .dynamics import DropState

    b = cfg.get("b", 0.0)
    if "a" in cfg.run:
        a = cfg.run["a"]
    else:
        span = 0.5 * tables.ell_c if tables.bounded else 1.0
        a = b - span
    cfg.values.setdefault("run.a", a)
    cfg.values.setdefault("run.b", b)
    if not b > a:
        raise ConfigError(f"run.a must be < run.b (got a={a!r}, b={b!r})")
    return DropState(0.0, a, b)


def _default_h(cfg, tables, init):
    from .dynamics import speed_bound

    if "h" in cfg.run:
        return cfg.run["h"]
    length = tables.ell_c if tables.bounded else tables.ell_max_grid
    h = length * 1e-3 / speed_bound(cfg.params, cfg.beta, tables, init.ell)
    cfg.values["run.h"] = h
    return h


def cmd_simulate(cfg):
    from .dynamics import simulate
    from .tables import SlopeTables

    tables = SlopeTables(cfg.params)
    init = _initial_state(cfg, tables)
    h = _default_h(cfg, tables, init)
    T = cfg.values.setdefault("run.T", 10.0)
    stride = cfg.values.setdefault("run.stride", 10)
    law = cfg.values.setdefault("run.law", "raw")
    traj = simulate(init, T, h, cfg.beta, law, tables=tables, stride=stride)
    buf = io.StringIO()
    traj.write_csv(buf)
    footer = [f"ell_c = {_fmt(tables.ell_c) if tables.bounded else 'inf'}"]
    return buf.getvalue(), footer


def cmd_tables(cfg):
    from .tables import SlopeTables

    tables = SlopeTables(cfg.params)
    top = tables.ell_c if tables.bounded else tables.ell_max_grid
    lo = cfg.values.setdefault("run.ell_min", 0.05 * top)
    hi = cfg.values.setdefault("run.ell_max", top)
    n = cfg.values.setdefault("run.count", 64)
    if not 0 < lo < hi:
        raise ConfigError(f"run.ell_min must lie in (0, run.ell_max), got {lo!r}")
    rows = tables.table(np.linspace(lo, hi, n))
    footer = [f"ell_c = {_fmt(tables.ell_c) if tables.bounded else 'inf'}"]
    return _csv(("ell", "G", "H", "F"), rows), footer


def cmd_tw(cfg):
    from .equilibrium import PhysicalParams
    from .homog import EffectiveLaw
    from .waves import homogenized_tw_speed

    p = cfg.params
    if not p.tilt > 0:
        raise ConfigError("tw needs a tilted plane (params.alpha > 0 and params.kappa > 0)")
    lo = cfg.values.setdefault("run.drive_min", 0.0)
    hi = cfg.values.setdefault("run.drive_max", 4.0)
    n = cfg.values.setdefault("run.count", 81)
    if not 0 <= lo < hi:
        raise ConfigError(f"run.drive_min must lie in [0, run.drive_max), got {lo!r}")
    r = EffectiveLaw(cfg.beta)
    rows = []
    for d in np.linspace(lo, hi, n):
        if d == 0.0:
            rows.append((0.0, 0.0))
            continue
        pd = PhysicalParams(d / p.tilt, p.kappa, p.alpha)
        rows.append((d, homogenized_tw_speed(r, pd)))
    return _csv(("drive", "speed"), rows), []


def cmd_pulsate(cfg):
    from .tables import SlopeTables
    from .waves import pulsating_wave

    tables = SlopeTables(cfg.params)
    n = cfg.values.setdefault("run.count", 257)
    pw = pulsating_wave(cfg.beta, tables, samples=n)
    if not pw.converged:
        raise NumericalError("pulsating iteration did not reach 1e-8 between periods")
    footer = [f"time_period = {_fmt(pw.time_period)}", f"mean_speed = {_fmt(pw.mean_speed)}",
              f"periods = {len(pw.sup_diffs) + 1}"]
    return _csv(("x", "z"), zip(pw.x, pw.z)), footer


def cmd_rq(cfg):
    from .homog import EffectiveLaw

    beta = cfg.beta
    lo = cfg.values.setdefault("run.q_min", 0.0)
    hi = cfg.values.setdefault("run.q_max", 2.0 * beta.beta_max)
    n = cfg.values.setdefault("run.count", 201)
    if not lo < hi:
        raise ConfigError(f"run.q_min must be < run.q_max, got {lo!r}")
    law = EffectiveLaw(beta, cached=False)
    qs = np.linspace(lo, hi, n)
    with ThreadPoolExecutor() as pool:
        rs = list(pool.map(law.exact, qs))
    footer = [f"plateau = [{_fmt(beta.beta_min)}, {_fmt(beta.beta_max)}]"]
    return _csv(("q", "r"), zip(qs, rs)), footer


def cmd_homogenize(cfg):
    from .dynamics import speed_bound
    from .homog import epsilon_sweep
    from .tables import SlopeTables

    tables = SlopeTables(cfg.params)
    init = _initial_state(cfg, tables)
    eps = cfg.values.setdefault("run.eps", [0.1, 0.05, 0.025])
    T = cfg.values.setdefault("run.T", 8.0)
    if "h" in cfg.run:
        h = cfg.run["h"]
    else:
        h = eps[-1] / (10.0 * speed_bound(cfg.params, cfg.beta, tables, init.ell))
        cfg.values["run.h"] = h
    rep = epsilon_sweep(init, T, cfg.beta, eps, h, tables)
    footer = [f"strictly_decreasing = {rep.strictly_decreasing}"]
    return _csv(("eps", "sup_err_a", "sup_err_b"), rep.rows()), footer


def cmd_stick(cfg):
    from .tables import SlopeTables
    from .waves import sticking_barrier

    if cfg.beta.kind != "periodic":
        raise ConfigError("stick needs a periodic beta (beta.kind = sine or piecewise-linear)")
    tables = SlopeTables(cfg.params)
    bar = sticking_barrier(cfg.beta, tables)
    header = ("a", "b", "ell0", "front_margin", "rear_margin")
    if bar is None:
        return ",".join(header) + "\n", ["barrier = none"]
    return _csv(header, [(bar.a, bar.b, bar.ell0, bar.front_margin, bar.rear_margin)]), ["barrier = found"]


def cmd_check(cfg):
    from .acceptance import CRITERIA, run_criterion

    numbers = sorted(CRITERIA)
    with ThreadPoolExecutor() as pool:
        results = list(pool.map(run_criterion, numbers))
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"acceptance: {passed}/{len(results)} criteria passed")
    text = "\n".join(lines) + "\n"
    return text, [], passed == len(results)


HANDLERS = {
    "simulate": cmd_simulate, "tables": cmd_tables, "tw": cmd_tw, "pulsate": cmd_pulsate,
    "rq": cmd_rq, "homogenize": cmd_homogenize, "stick": cmd_stick, "check": cmd_check,
}


def _split_overrides(extra):
    """``--section.key value`` (or ``--section.key=value``) pairs from leftover argv."""
    out = {}
    i = 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--") or "." not in tok:
            raise ConfigError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, val = key.split("=", 1)
        else:
            if i + 1 >= len(extra):
                raise ConfigError(f"flag {tok!r} needs a value")
            i += 1
            val = extra[i]
        out[key] = val
        i += 1
    return out


def _write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".slidedrop-", dir=d)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def build_parser():
    parser = argparse.ArgumentParser(
        prog="slidedrop",
        description="Quasi-static sliding drops on heterogeneous inclined planes.",
        epilog="Any config key may be given as a flag, e.g. --params.V0 1.5 --beta.kind sine.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="flat 'section.key = value' file; flags override it")
    parser.add_argument("-o", "--output", help="output path (default: run.output or stdout)")
    parser.add_argument("--log-level", default="INFO", help="logging level on stderr")
    return parser


def run(argv=None, stdout=None) -> int:
    from .config import parse_config, read_config_file

    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.INFO),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        raw = read_config_file(args.config) if args.config else {}
        raw.update(_split_overrides(extra))
        cfg = parse_config(raw, require_params=args.command != "check")
        if args.output:
            cfg.values["run.output"] = args.output
        out = cfg.values.get("run.output", "-")
        result = HANDLERS[args.command](cfg)
        ok = True
        if len(result) == 3:
            body, footer, ok = result
        else:
            body, footer = result
        header = [f"# slidedrop {__version__} {args.command}", f"# config: {cfg.provenance()}"]
        text = "\n".join(header) + "\n" + body + "".join(f"# {line}\n" for line in footer)
        if out == "-":
            stdout.write(text)
        else:
            _write_atomic(out, text)
        return EXIT_OK if ok else EXIT_CHECK
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except PreconditionError as exc:
        log.error("invalid request: %s", exc)
        return EXIT_CONFIG
    except NumericalError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    except SlidingDropError as exc:
        log.error("%s", exc)
        return EXIT_NUMERICAL


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
