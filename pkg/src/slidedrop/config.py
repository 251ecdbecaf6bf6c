"""Flat ``section.key = value`` run configuration."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .beta import BetaProfile
from .equilibrium import PhysicalParams
from .errors import ConfigError, SlidingDropError

__all__ = ["RunConfig", "parse_config", "read_config_file", "KNOWN_KEYS"]

log = logging.getLogger(__name__)

FLOAT, INT, STR, FLOATS = "float", "int", "str", "floats"

KNOWN_KEYS = {
    "params.V0": FLOAT,
    "params.kappa": FLOAT,
    "params.alpha": FLOAT,
    "beta.kind": STR,
    "beta.value": FLOAT,
    "beta.mean": FLOAT,
    "beta.amplitude": FLOAT,
    "beta.period": FLOAT,
    "beta.phase": FLOAT,
    "beta.nodes": STR,
    "run.T": FLOAT,
    "run.h": FLOAT,
    "run.a": FLOAT,
    "run.b": FLOAT,
    "run.law": STR,
    "run.stride": INT,
    "run.eps": FLOATS,
    "run.q_min": FLOAT,
    "run.q_max": FLOAT,
    "run.count": INT,
    "run.ell_min": FLOAT,
    "run.ell_max": FLOAT,
    "run.drive_min": FLOAT,
    "run.drive_max": FLOAT,
    "run.output": STR,
    "run.seed": INT,
}

BETA_KINDS = ("constant", "sine", "piecewise-linear")
DEFAULT_SEED = 20240601


def read_config_file(path) -> dict:
    """Raw ``key -> string`` pairs from a config file; ``#`` starts a comment."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!s}: {exc.strerror}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'section.key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def _convert(key, text):
    kind = KNOWN_KEYS[key]
    try:
        if kind == FLOAT:
            return float(text)
        if kind == INT:
            return int(text)
        if kind == FLOATS:
            return [float(s) for s in str(text).replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {text!r} as {kind}") from exc
    return str(text)


def _parse_nodes(text):
    pts = []
    for item in text.replace(";", ",").split(","):
        item = item.strip()
        if not item:
            continue
        try:
            x, v = item.split(":")
            pts.append((float(x), float(v)))
        except ValueError as exc:
            raise ConfigError(f"beta.nodes: expected 'x:value, x:value, ...', got {item!r}") from exc
    return pts


@dataclass
class RunConfig:
    params: PhysicalParams
    beta: BetaProfile
    run: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)

    def get(self, key, default=None):
        return self.run.get(key, default)

    def provenance(self):
        """Resolved ``key=value`` pairs in a fixed order, one string."""
        return " ".join(f"{k}={self.values[k]!r}" for k in sorted(self.values))


def _build_beta(values):
    kind = values.get("beta.kind", "constant")
    if kind not in BETA_KINDS:
        raise ConfigError(f"beta.kind: unknown kind {kind!r} (expected one of {', '.join(BETA_KINDS)})")
    allowed = {
        "constant": {"beta.value"},
        "sine": {"beta.mean", "beta.amplitude", "beta.period", "beta.phase"},
        "piecewise-linear": {"beta.nodes", "beta.period"},
    }[kind]
    extra = sorted(k for k in values if k.startswith("beta.") and k != "beta.kind" and k not in allowed)
    if extra:
        raise ConfigError(f"{extra[0]}: not a parameter of beta.kind = {kind}")
    try:
        if kind == "constant":
            value = values.setdefault("beta.value", 1.0)
            if not value > 0:
                raise ConfigError(f"beta.value: must be > 0, got {value!r}")
            return BetaProfile.constant(value)
        if kind == "sine":
            mean = values.setdefault("beta.mean", 1.0)
            amp = values.setdefault("beta.amplitude", 0.3)
            period = values.setdefault("beta.period", 1.0)
            phase = values.setdefault("beta.phase", 0.0)
            if not 0 <= amp < mean:
                raise ConfigError(
                    f"beta.amplitude: must satisfy 0 <= amplitude < beta.mean = {mean!r} "
                    f"so beta stays positive, got {amp!r}")
            if not period > 0:
                raise ConfigError(f"beta.period: must be > 0, got {period!r}")
            return BetaProfile.sine(mean, amp, period, phase)
        if "beta.nodes" not in values or "beta.period" not in values:
            raise ConfigError("beta.nodes and beta.period are required for a piecewise-linear beta")
        pts = _parse_nodes(values["beta.nodes"])
        if any(v <= 0 for _, v in pts):
            raise ConfigError("beta.nodes: values must be > 0")
        return BetaProfile.piecewise_linear([p[0] for p in pts], [p[1] for p in pts], values["beta.period"])
    except ConfigError:
        raise
    except SlidingDropError as exc:
        raise ConfigError(f"beta: {exc}") from exc


def parse_config(raw: dict, *, require_params: bool = True) -> RunConfig:
    """Validate raw string pairs (file values already overridden by flags).

    Derived quantities are logged; defaults that depend on the physics
    (step size, initial support) are resolved by the command that needs them.
    """
    unknown = sorted(k for k in raw if k not in KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r}")
    values = {k: _convert(k, v) for k, v in raw.items()}

    missing = [k for k in ("params.V0", "params.kappa", "params.alpha") if k not in values]
    if missing and require_params:
        raise ConfigError(f"missing required key {missing[0]!r}")
    values.setdefault("params.V0", 1.0)
    values.setdefault("params.kappa", 1.0)
    values.setdefault("params.alpha", math.pi / 6)
    V0, kappa, alpha = values["params.V0"], values["params.kappa"], values["params.alpha"]
    if not V0 > 0:
        raise ConfigError(f"params.V0: must be > 0, got {V0!r}")
    if not kappa >= 0:
        raise ConfigError(f"params.kappa: must be >= 0, got {kappa!r}")
    if not 0 <= alpha < math.pi / 2:
        raise ConfigError(f"params.alpha: must lie in [0, pi/2), got {alpha!r}")
    params = PhysicalParams(V0, kappa, alpha)
    beta = _build_beta(values)

    run = {k[4:]: v for k, v in values.items() if k.startswith("run.")}
    values.setdefault("run.seed", DEFAULT_SEED)
    run.setdefault("seed", DEFAULT_SEED)
    for key in ("T", "h", "q_max", "ell_max", "drive_max"):
        if key in run and not run[key] > 0:
            raise ConfigError(f"run.{key}: must be > 0, got {run[key]!r}")
    if "stride" in run and run["stride"] < 1:
        raise ConfigError(f"run.stride: must be >= 1, got {run['stride']!r}")
    if "count" in run and run["count"] < 2:
        raise ConfigError(f"run.count: must be >= 2, got {run['count']!r}")
    if "law" in run and run["law"] not in ("raw", "homogenized"):
        raise ConfigError(f"run.law: expected 'raw' or 'homogenized', got {run['law']!r}")
    if "eps" in run:
        eps = run["eps"]
        if not eps or any(e <= 0 for e in eps):
            raise ConfigError("run.eps: needs one or more positive values")
        if any(eps[i + 1] >= eps[i] for i in range(len(eps) - 1)):
            raise ConfigError("run.eps: values must be strictly decreasing")

    log.info("tilt = %.17g, k2 = %.17g, V0*tilt = %.17g", params.tilt, params.k2, params.drive)
    log.info("beta: kind=%s min=%.17g max=%.17g", beta.descriptor.get("kind"), beta.beta_min, beta.beta_max)
    return RunConfig(params, beta, run, values)
