"""Effective contact-line velocity over periodic adhesion and the epsilon sweep.

For periodic beta the point ODE ``x' = q - beta(x)`` is trapped when ``q``
lies between the extrema of beta; otherwise it crosses one period in time
``t_c = int_0^P dx / (q - beta(x))`` and its mean speed is ``r(q) = P / t_c``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ._cache import DyadicCache
from .beta import BetaProfile
from .dynamics import DropState, simulate, speed_bound
from .errors import PreconditionError
from .tables import SlopeTables

__all__ = [
    "EffectiveLaw",
    "effective_velocity",
    "sqrt_degeneracy_check",
    "epsilon_sweep",
    "SweepReport",
]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _gauss(f, lo, hi):
    half = 0.5 * (hi - lo)
    x = lo + half * (_GL_X + 1.0)
    return half * float(np.dot(_GL_W, f(x)))


def _graded(f, width, scale, epsrel):
    """``int_0^width f(s) ds`` for ``f`` peaked at ``s = 0`` with width ``scale``.

    A short head ``[0, delta]`` on which ``f`` is flat goes to Gauss-Legendre;
    the rest is integrated in ``u = log s``, which turns both a Lorentzian
    peak (smooth extremum) and a cusp (Lipschitz extremum) into a smooth bump.
    """
    delta = min(width, 1e-3 * scale)
    head = _gauss(f, 0.0, delta)
    if delta >= width:
        return head
    tail, _ = integrate.quad(lambda u: f(math.exp(u)) * math.exp(u), math.log(delta), math.log(width),
                             limit=400, epsabs=0.0, epsrel=epsrel)
    return head + tail


def _crossing_time(q: float, beta: BetaProfile) -> float:
    """Signed time for ``x' = q - beta(x)`` to cross one period."""
    above = q > beta.beta_max
    x0 = beta.argmax if above else beta.argmin
    gap = abs(q - (beta.beta_max if above else beta.beta_min))
    # distance over which q - beta changes by the gap at the extremum
    scale = gap / max(beta.lipschitz, 1e-300)
    half = 0.5 * beta.period
    # q - beta carries an absolute rounding error of order eps * q; near the
    # plateau edge that caps the attainable relative accuracy
    epsrel = min(1e-1, max(1e-11, 1e-14 * max(abs(q), 1.0) / gap))

    def fwd(s):
        return 1.0 / (q - beta(x0 + s))

    def bwd(s):
        return 1.0 / (q - beta(x0 - s))

    return _graded(fwd, half, scale, epsrel) + _graded(bwd, half, scale, epsrel)


def effective_velocity(q: float, beta: BetaProfile) -> float:
    """Mean speed ``r(q)`` of ``x' = q - beta(x)``; zero on ``[min beta, max beta]``."""
    q = float(q)
    if beta.kind == "constant":
        return q - beta.beta_min
    if beta.beta_min <= q <= beta.beta_max:
        return 0.0
    return beta.period / _crossing_time(q, beta)


class EffectiveLaw:
    """``r(q)`` for a periodic beta, with a lazily refined cache.

    Off the plateau the cache is log-spaced in the distance to the nearest
    plateau edge, which resolves the square-root onset of ``r``.  Distances
    outside ``[1e-12, 1e3] * scale`` are solved directly.
    """

    def __init__(self, beta: BetaProfile, *, cached: bool = True, tol: float = 1e-7):
        self.beta = beta
        self.cached = cached and beta.kind != "constant"
        self.plateau = (beta.beta_min, beta.beta_max)
        scale = max(beta.beta_max, 1.0)
        lo, hi = 1e-12 * scale, 1e3 * scale
        self._above = DyadicCache(lambda d: (self.exact(beta.beta_max + d),), lo, hi,
                                  log=True, atol=tol, rtol=tol)
        self._below = DyadicCache(lambda d: (self.exact(beta.beta_min - d),), lo, hi,
                                  log=True, atol=tol, rtol=tol)

    def exact(self, q: float) -> float:
        return effective_velocity(q, self.beta)

    def __call__(self, q: float) -> float:
        q = float(q)
        if not self.cached:
            return self.exact(q)
        bmin, bmax = self.plateau
        if q > bmax:
            return float(self._above(q - bmax)[0])
        if q < bmin:
            return float(self._below(bmin - q)[0])
        return 0.0

    def samples(self, qs):
        return np.array([self(q) for q in qs])

    @classmethod
    def linear(cls, beta0: float) -> "EffectiveLaw":
        """The law ``r(q) = q - beta0`` of a constant coefficient."""
        return cls(BetaProfile.constant(beta0))


def sqrt_degeneracy_check(beta: BetaProfile, lo: float = 1e-6, hi: float = 1e-2) -> float:
    """Fitted exponent of ``r(q) ~ (q - max beta)^p`` on a dyadic ladder in ``[lo, hi]``.

    Requires a twice differentiable beta with a non-degenerate maximum.
    """
    if beta.kind == "constant" or beta.oscillation <= 0:
        raise PreconditionError("constant beta has a degenerate maximum")
    if not beta.smooth:
        raise PreconditionError("degeneracy exponent needs a twice differentiable beta")
    n = int(math.floor(math.log2(hi / lo)))
    etas = lo * 2.0 ** np.arange(n + 1)
    rs = np.array([effective_velocity(beta.beta_max + e, beta) for e in etas])
    slope, _ = np.polyfit(np.log(etas), np.log(rs), 1)
    return float(slope)


@dataclass
class SweepReport:
    eps: list
    sup_err_a: list
    sup_err_b: list
    h: float
    T: float
    trajectories: dict

    @property
    def errors(self):
        return [max(ea, eb) for ea, eb in zip(self.sup_err_a, self.sup_err_b)]

    @property
    def strictly_decreasing(self) -> bool:
        e = self.errors
        return all(e[i + 1] < e[i] for i in range(len(e) - 1))

    def rows(self):
        return list(zip(self.eps, self.sup_err_a, self.sup_err_b))


def epsilon_sweep(initial: DropState, T: float, beta: BetaProfile, eps_list, h: float,
                  tables: SlopeTables, *, max_workers: int | None = None) -> SweepReport:
    """Compare raw dynamics over ``beta(x / eps)`` with the homogenized dynamics.

    One table set is shared by every run; the per-eps simulations run
    concurrently.
    """
    eps_list = [float(e) for e in eps_list]
    if not eps_list or any(e <= 0 for e in eps_list):
        raise PreconditionError("eps list must be non-empty and positive")
    if any(eps_list[i + 1] >= eps_list[i] for i in range(len(eps_list) - 1)):
        raise PreconditionError("eps list must be strictly decreasing")
    vmax = speed_bound(tables.params, beta, tables, initial.ell)
    if h > eps_list[-1] / (10.0 * vmax):
        raise PreconditionError(
            f"h={h!r} does not resolve eps={eps_list[-1]!r}; need h <= {eps_list[-1] / (10 * vmax):.3g}")

    def run(eps):
        if eps is None:
            return simulate(initial, T, h, beta, "homogenized", tables=tables, diagnostics=False)
        return simulate(initial, T, h, beta.rescaled(eps), "raw", tables=tables, diagnostics=False)

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = {e: pool.submit(run, e) for e in [None] + eps_list}
        results = {e: f.result() for e, f in futures.items()}
    ref = results[None]
    err_a = [float(np.max(np.abs(results[e].a - ref.a))) for e in eps_list]
    err_b = [float(np.max(np.abs(results[e].b - ref.b))) for e in eps_list]
    return SweepReport(eps_list, err_a, err_b, h, T, results)
