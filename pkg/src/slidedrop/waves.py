"""Traveling and pulsating waves, homogenized wave speed, and sticking barriers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .beta import BetaProfile
from .equilibrium import PhysicalParams, solve_obstacle
from .errors import NumericalError, PreconditionError
from .tables import SlopeTables

__all__ = [
    "TravelingWave",
    "PulsatingWave",
    "StickingBarrier",
    "traveling_wave",
    "tw_speed_formula",
    "pulsating_wave",
    "homogenized_tw_speed",
    "sticking_barrier",
]


@dataclass(frozen=True)
class TravelingWave:
    ell0: float
    speed: float
    degenerate_rear: bool


def tw_speed_formula(drive: float, beta0: float) -> float:
    """Traveling speed for constant beta: half the drive below ``2 beta0``, else ``drive - beta0``."""
    return 0.5 * drive if drive < 2.0 * beta0 else drive - beta0


def traveling_wave(beta0: float, tables: SlopeTables, params: PhysicalParams | None = None,
                   rel_tol: float = 1e-14) -> TravelingWave:
    """Rigidly translating drop over a constant adhesion ``beta0``.

    The length solves ``F(ell0) = 2 beta0`` when that has a root below the
    critical length; otherwise the drop travels at the critical length with a
    flat rear.
    """
    params = tables.params if params is None else params
    if not beta0 > 0:
        raise PreconditionError(f"beta0 must be positive, got {beta0!r}")
    if not tables.bounded:
        raise PreconditionError("no traveling wave on a flat plane (tilt = 0)")
    drive = params.drive
    if drive >= 2.0 * beta0:
        return TravelingWave(tables.ell_c, drive - beta0, True)

    def F(ell):
        g, h = tables.exact(ell)
        return g + h

    hi = tables.ell_c
    lo = 0.5 * hi
    while F(lo) <= 2.0 * beta0:
        lo *= 0.5
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if F(mid) > 2.0 * beta0:
            lo = mid
        else:
            hi = mid
    return TravelingWave(0.5 * (lo + hi), 0.5 * drive, False)


@dataclass
class PulsatingWave:
    """Periodic length profile ``z`` over one period of beta, indexed by front position."""

    x: np.ndarray
    z: np.ndarray
    time_period: float
    period: float
    sup_diffs: list = field(default_factory=list)
    converged: bool = True

    @property
    def mean_speed(self) -> float:
        return self.period / self.time_period

    def __call__(self, x):
        r = self.x[0] + np.mod(np.asarray(x, dtype=float) - self.x[0], self.period)
        return np.interp(r, self.x, self.z)


def pulsating_wave(beta: BetaProfile, tables: SlopeTables, *, tol: float = 1e-8,
                   samples: int = 257, max_periods: int = 500, rtol: float = 1e-12,
                   atol: float = 1e-13, x0: float = 0.0) -> PulsatingWave:
    """Periodic length profile of the drop parametrized by its front position.

    Integrates ``dy/dx = (F(y) - beta(x - y) - beta(x)) / (H(y) - beta(x))``
    with ``y`` clamped at the critical length, one period at a time, until two
    consecutive periods differ by less than ``tol`` in the sup norm.  The
    elapsed time per period is integrated alongside.
    """
    params = tables.params
    if not tables.bounded:
        raise PreconditionError("pulsating waves need a positive tilt")
    if beta.kind == "constant":
        tw = traveling_wave(beta.beta_min, tables)
        x = np.linspace(x0, x0 + 1.0, samples)
        return PulsatingWave(x, np.full_like(x, tw.ell0), 1.0 / tw.speed, 1.0, [0.0])
    if not beta.oscillation < params.drive:
        raise PreconditionError(
            f"max beta - min beta = {beta.oscillation!r} must be below V0 kappa sin(alpha) = {params.drive!r}")
    ell_c = tables.ell_c
    P = beta.period

    def rhs(x, state):
        y = min(state[0], ell_c)
        g, h = tables.exact(y)
        bx = float(beta(x))
        den = h - bx
        if not den > 0:
            raise NumericalError(
                f"front stalls at x={x!r} (H(y) - beta = {den!r}); tables or tolerance are inconsistent")
        slope = (g + h - float(beta(x - y)) - bx) / den
        if state[0] >= ell_c and slope > 0:
            slope = 0.0
        return [slope, 1.0 / den]

    y = traveling_wave(beta.mean(), tables).ell0
    xs = np.linspace(0.0, P, samples)
    prev = None
    diffs = []
    for n in range(max_periods):
        start = x0 + n * P
        sol = integrate.solve_ivp(rhs, (start, start + P), [y, 0.0], method="DOP853",
                                  t_eval=start + xs, rtol=rtol, atol=atol)
        if not sol.success:
            raise NumericalError(f"pulsating-wave integration failed: {sol.message}")
        z = np.minimum(sol.y[0], ell_c)
        T = float(sol.y[1, -1])
        y = float(z[-1])
        if prev is not None:
            diffs.append(float(np.max(np.abs(z - prev))))
            if diffs[-1] < tol:
                return PulsatingWave(x0 + xs, z, T, P, diffs, True)
        prev = z
    return PulsatingWave(x0 + xs, z, T, P, diffs, False)


def homogenized_tw_speed(r, params: PhysicalParams, *, rel_tol: float = 1e-13) -> float:
    """Traveling speed of the homogenized drop with effective law ``r``.

    Solves ``r(q0 + S) + r(q0) = 0`` for the rear energy ``q0 >= 0`` with
    ``S = V0 tilt``; a non-negative sum at ``q0 = 0`` means a flat rear and
    speed ``r(S)``.
    """
    S = params.drive
    if not S > 0:
        raise PreconditionError("homogenized traveling wave needs a positive tilt")

    def g(q):
        return r(q + S) + r(q)

    if g(0.0) >= 0.0:
        return float(r(S))
    lo, hi = 0.0, max(S, 1.0)
    while g(hi) < 0.0:
        lo, hi = hi, 2.0 * hi
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return float(r(hi + S))


@dataclass(frozen=True)
class StickingBarrier:
    """A stationary support ``(a, b)`` that blocks an advancing drop.

    ``front_margin = H - beta(b)`` and ``rear_margin = beta(a) - G`` are both
    non-positive (within ``1e-9``) on the solved profile.
    """

    a: float
    b: float
    ell0: float
    front_margin: float
    rear_margin: float


def sticking_barrier(beta: BetaProfile, tables: SlopeTables, *, slack: float = 1e-9):
    """Support where the front cannot advance and the rear cannot recede.

    Picks ``a`` at a minimum of beta and ``b`` at the first maximum at
    distance at least ``H^{-1}(max beta)``.  Returns ``None`` when the
    construction does not yield a barrier; that does not rule out pinning.
    """
    if beta.kind != "periodic":
        raise PreconditionError("sticking barrier needs a periodic beta")
    params = tables.params
    if tables.bounded and not params.drive < beta.beta_max:
        return None
    ell0 = tables.H_inverse(beta.beta_max)
    a = beta.argmin
    P = beta.period
    k = math.ceil((a + ell0 - beta.argmax) / P)
    b = beta.argmax + k * P
    if b < a + ell0:
        b += P
    prof = solve_obstacle(a, b, params, ell_c=tables.ell_c)
    front = 0.5 * prof.slope_b ** 2 - float(beta(b))
    rear = float(beta(a)) - 0.5 * prof.slope_a ** 2
    if front <= slack and rear <= slack:
        return StickingBarrier(a, b, ell0, front, rear)
    return None
