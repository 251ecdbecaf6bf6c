"""Relative adhesion coefficients beta(x): constant or periodic."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .errors import PreconditionError

__all__ = ["BetaProfile"]


@dataclass(frozen=True)
class BetaProfile:
    """A positive adhesion coefficient with exact extremal metadata.

    Use the constructors :meth:`constant`, :meth:`sine`,
    :meth:`piecewise_linear` or :meth:`periodic` rather than the raw
    initializer.  ``argmin``/``argmax`` locate one minimum and one maximum
    within a period; ``smooth`` records whether beta is twice differentiable.
    """

    kind: str
    func: Callable = field(repr=False)
    beta_min: float
    beta_max: float
    lipschitz: float
    period: float | None = None
    argmin: float | None = None
    argmax: float | None = None
    smooth: bool = True
    descriptor: dict = field(default_factory=dict, compare=False)
    antiderivative: Callable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not self.beta_min > 0:
            raise PreconditionError(f"beta must stay positive (min {self.beta_min!r})")
        if self.kind == "periodic" and not (self.period and self.period > 0):
            raise PreconditionError("periodic beta needs a positive period")

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, value: float) -> "BetaProfile":
        value = float(value)
        if not value > 0:
            raise PreconditionError(f"beta must be positive, got {value!r}")
        return cls("constant", lambda x: value + 0.0 * np.asarray(x, dtype=float),
                   value, value, 0.0, smooth=True,
                   descriptor={"kind": "constant", "value": value},
                   antiderivative=lambda x: value * x)

    @classmethod
    def sine(cls, mean: float, amplitude: float, period: float = 1.0, phase: float = 0.0) -> "BetaProfile":
        """``mean + amplitude * sin(2 pi (x - phase) / period)``."""
        if not 0 <= amplitude < mean:
            raise PreconditionError(
                f"sine beta needs 0 <= amplitude < mean (got amplitude={amplitude!r}, mean={mean!r})")
        if not period > 0:
            raise PreconditionError(f"period must be positive, got {period!r}")
        if amplitude == 0:
            return cls.constant(mean)
        w = 2 * math.pi / period

        def func(x):
            return mean + amplitude * np.sin(w * (np.asarray(x, dtype=float) - phase))

        def prim(x):
            return mean * x - amplitude / w * np.cos(w * (x - phase))

        return cls("periodic", func, mean - amplitude, mean + amplitude, amplitude * w,
                   period=period, argmin=phase + 0.75 * period, argmax=phase + 0.25 * period,
                   smooth=True,
                   descriptor={"kind": "sine", "mean": mean, "amplitude": amplitude,
                               "period": period, "phase": phase},
                   antiderivative=prim)

    @classmethod
    def piecewise_linear(cls, xs, values, period: float) -> "BetaProfile":
        """Periodic linear interpolation through ``(xs, values)`` on ``[0, period)``."""
        xs = np.asarray(xs, dtype=float)
        vs = np.asarray(values, dtype=float)
        if xs.ndim != 1 or xs.shape != vs.shape or len(xs) < 2:
            raise PreconditionError("piecewise-linear beta needs matching node lists of length >= 2")
        if np.any(np.diff(xs) <= 0) or xs[0] < 0 or xs[-1] >= period:
            raise PreconditionError("nodes must be strictly increasing inside [0, period)")
        xx = np.concatenate([xs, [xs[0] + period]])
        vv = np.concatenate([vs, [vs[0]]])
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (vv[1:] + vv[:-1]) * np.diff(xx))])
        per_period = cum[-1]

        def func(x):
            x = np.asarray(x, dtype=float)
            r = xs[0] + np.mod(x - xs[0], period)
            return np.interp(r, xx, vv)

        def prim(x):
            n = math.floor((x - xs[0]) / period)
            r = x - n * period
            i = min(int(np.searchsorted(xx, r, side="right")) - 1, len(xs) - 1)
            frac = r - xx[i]
            slope = (vv[i + 1] - vv[i]) / (xx[i + 1] - xx[i])
            return n * per_period + cum[i] + vv[i] * frac + 0.5 * slope * frac * frac

        lip = float(np.max(np.abs(np.diff(vv) / np.diff(xx))))
        return cls("periodic", func, float(vs.min()), float(vs.max()), lip, period=period,
                   argmin=float(xs[np.argmin(vs)]), argmax=float(xs[np.argmax(vs)]),
                   smooth=False,
                   descriptor={"kind": "piecewise-linear", "nodes": list(zip(xs.tolist(), vs.tolist())),
                               "period": period},
                   antiderivative=prim)

    @classmethod
    def periodic(cls, func, period: float, *, lipschitz: float | None = None,
                 smooth: bool = True, samples: int = 4096) -> "BetaProfile":
        """Wrap an arbitrary periodic callable; extrema by sampling plus golden section."""
        x = np.linspace(0.0, period, samples, endpoint=False)
        y = np.asarray(func(x), dtype=float)
        h = period / samples

        def refine(sign, i):
            res = optimize.minimize_scalar(lambda t: sign * float(func(t)),
                                           bracket=(x[i] - h, x[i], x[i] + h),
                                           method="golden", tol=1e-12)
            return float(res.x), sign * float(res.fun)

        amin, bmin = refine(1.0, int(np.argmin(y)))
        amax, bmax = refine(-1.0, int(np.argmax(y)))
        if lipschitz is None:
            lipschitz = float(np.max(np.abs(np.diff(np.append(y, y[0])))) / h)
        return cls("periodic", func, bmin, bmax, lipschitz, period=period,
                   argmin=amin, argmax=amax, smooth=smooth,
                   descriptor={"kind": "callable", "period": period})

    # -- evaluation ---------------------------------------------------------

    def __call__(self, x):
        return self.func(x)

    @property
    def oscillation(self) -> float:
        return self.beta_max - self.beta_min

    def integral(self, lo: float, hi: float) -> float:
        if self.antiderivative is not None:
            return float(self.antiderivative(hi) - self.antiderivative(lo))
        val, _ = integrate.quad(self.func, lo, hi, limit=400, epsabs=1e-13, epsrel=1e-12)
        return float(val)

    def mean(self) -> float:
        if self.kind == "constant":
            return self.beta_min
        return self.integral(0.0, self.period) / self.period

    def rescaled(self, eps: float) -> "BetaProfile":
        """``x -> beta(x / eps)``."""
        if not eps > 0:
            raise PreconditionError(f"eps must be positive, got {eps!r}")
        if self.kind == "constant":
            return self
        f, F = self.func, self.antiderivative
        desc = dict(self.descriptor, eps=eps)
        return BetaProfile(
            "periodic", lambda x: f(np.asarray(x, dtype=float) / eps),
            self.beta_min, self.beta_max, self.lipschitz / eps, period=self.period * eps,
            argmin=self.argmin * eps, argmax=self.argmax * eps, smooth=self.smooth,
            descriptor=desc,
            antiderivative=None if F is None else (lambda x: eps * F(x / eps)))

    def spot_check(self, samples: int = 1000) -> bool:
        """Grid check of positivity, bounds and periodicity."""
        span = self.period if self.period else 1.0
        x = np.linspace(-span, 2 * span, samples)
        y = np.asarray(self(x), dtype=float)
        tol = 1e-12 * max(1.0, self.beta_max)
        ok = bool(np.all(y > 0) and np.all(y >= self.beta_min - tol) and np.all(y <= self.beta_max + tol))
        if self.period:
            ok &= bool(np.allclose(self(x + self.period), y, rtol=0, atol=1e-10 * self.beta_max))
        return ok
