"""Explicit time stepping of the two contact points.

Each step moves the front by ``(H(ell) - beta(b)) h`` and the rear by
``(beta(a) - G(ell)) h``, then snaps the rear forward if the new support
would exceed the critical length (the rear detaches tangentially there).
The homogenized law replaces ``q - beta(x)`` by the effective speed ``r(q)``.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .beta import BetaProfile
from .equilibrium import PhysicalParams, energy, solve_obstacle
from .errors import DropCollapseError, PreconditionError
from .tables import SlopeTables

__all__ = [
    "BetaProfile",
    "DropState",
    "Trajectory",
    "ComparisonReport",
    "step",
    "simulate",
    "check_comparison",
    "sliding_onset",
    "speed_bound",
]

log = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = ("t", "a", "b", "ell", "lambda", "slope_a", "slope_b", "energy")


@dataclass(frozen=True)
class DropState:
    t: float
    a: float
    b: float

    @property
    def ell(self) -> float:
        return self.b - self.a


def _advance(a, b, h, beta, tables, effective, ell_floor):
    g, hh = tables.pair(b - a)
    if effective is None:
        a_half = a + (float(beta(a)) - g) * h
        b_next = b + (hh - float(beta(b))) * h
    else:
        a_half = a - effective(g) * h
        b_next = b + effective(hh) * h
    a_next = a_half
    if tables.bounded and b_next - a_half > tables.ell_c:
        a_next = b_next - tables.ell_c
    if not b_next - a_next >= ell_floor:
        raise DropCollapseError(
            f"drop collapse: step size too large or invalid data (ell={b_next - a_next!r} "
            f"< floor {ell_floor!r})")
    return a_next, b_next


def step(state: DropState, h: float, beta: BetaProfile, tables: SlopeTables, *,
         effective=None, ell_floor: float | None = None) -> DropState:
    """One explicit step of size ``h``.

    Pass ``effective`` (a callable ``q -> r(q)``) to step the homogenized law;
    ``beta`` is then ignored.
    """
    if not h > 0:
        raise PreconditionError(f"step size must be positive, got {h!r}")
    floor = tables.ell_floor if ell_floor is None else ell_floor
    a, b = _advance(state.a, state.b, h, beta, tables, effective, floor)
    return DropState(state.t + h, a, b)


@dataclass
class Trajectory:
    """Samples of a simulated drop, one row per stored step."""

    params: PhysicalParams
    beta: BetaProfile
    h: float
    law: str
    stride: int
    t: np.ndarray
    a: np.ndarray
    b: np.ndarray
    ell: np.ndarray
    lam: np.ndarray
    slope_a: np.ndarray
    slope_b: np.ndarray
    energy: np.ndarray
    ell_c: float | object = field(default=None, repr=False)

    @property
    def dt(self) -> float:
        """Spacing between samples."""
        return self.h * self.stride

    def __len__(self):
        return len(self.t)

    def rows(self):
        cols = (self.t, self.a, self.b, self.ell, self.lam, self.slope_a, self.slope_b, self.energy)
        return zip(*(c.tolist() for c in cols))

    def write_csv(self, fh, header_lines=()):
        for line in header_lines:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_COLUMNS)
        for row in self.rows():
            w.writerow([repr(float(v)) for v in row])

    def front_at(self, t):
        """Front position interpolated linearly between samples."""
        return np.interp(t, self.t, self.b)


def speed_bound(params: PhysicalParams, beta: BetaProfile, tables: SlopeTables, ell0: float) -> float:
    """Bound on endpoint speeds along any trajectory started from length ``ell0``.

    The front slope never exceeds ``M = max(2 sqrt(max beta), |u_x(b)|_0)``,
    so both endpoints move slower than ``M**2 / 2 + max beta``.
    """
    h0 = tables.exact(min(ell0, tables.ell_c) if tables.bounded else ell0)[1]
    m = max(2.0 * math.sqrt(beta.beta_max), math.sqrt(2.0 * h0))
    return 0.5 * m * m + beta.beta_max


def simulate(initial: DropState, T: float, h: float, beta: BetaProfile, law: str = "raw", *,
             tables: SlopeTables | None = None, params: PhysicalParams | None = None,
             effective=None, stride: int = 1, diagnostics: bool = True,
             ell_floor: float | None = None, refine: bool = False) -> Trajectory:
    """Advance ``initial`` to time ``T`` with step ``h``.

    ``law`` is ``"raw"`` or ``"homogenized"``; the homogenized law builds the
    effective velocity of ``beta`` unless ``effective`` is given.  Every
    ``stride``-th step is stored; with ``diagnostics`` the equilibrium is
    re-solved there for the pressure, slopes and energy.  ``refine`` takes two
    half steps per stored step of size ``h``.
    """
    if tables is None:
        if params is None:
            raise PreconditionError("simulate needs tables or params")
        tables = SlopeTables(params)
    params = tables.params
    if not T > 0 or not h > 0:
        raise PreconditionError(f"T and h must be positive (T={T!r}, h={h!r})")
    if stride < 1:
        raise PreconditionError(f"stride must be >= 1, got {stride!r}")
    if law not in ("raw", "homogenized"):
        raise PreconditionError(f"unknown law {law!r}")
    if law == "homogenized" and effective is None:
        from .homog import EffectiveLaw

        effective = EffectiveLaw(beta)
    if law == "raw":
        effective = None
    floor = tables.ell_floor if ell_floor is None else ell_floor

    a, b = float(initial.a), float(initial.b)
    if not b > a:
        raise PreconditionError(f"initial support is empty: a={a!r}, b={b!r}")
    if tables.bounded and b - a > tables.ell_c:
        log.warning("initial length %.6g exceeds ell_c = %.6g; rear projected to b - ell_c",
                    b - a, tables.ell_c)
        a = b - tables.ell_c

    nsteps = int(math.ceil(T / h - 1e-9))
    sub = (2, 0.5 * h) if refine else (1, h)
    ts, as_, bs = [initial.t], [a], [b]
    for n in range(1, nsteps + 1):
        for _ in range(sub[0]):
            a, b = _advance(a, b, sub[1], beta, tables, effective, floor)
        if n % stride == 0:
            ts.append(initial.t + n * h)
            as_.append(a)
            bs.append(b)

    t_arr, a_arr, b_arr = np.array(ts), np.array(as_), np.array(bs)
    ell_arr = b_arr - a_arr
    lam = np.full_like(t_arr, np.nan)
    sa = np.full_like(t_arr, np.nan)
    sb = np.full_like(t_arr, np.nan)
    en = np.full_like(t_arr, np.nan)
    if diagnostics:
        for i in range(len(t_arr)):
            prof = solve_obstacle(a_arr[i], b_arr[i], params, ell_c=tables.ell_c)
            lam[i], sa[i], sb[i] = prof.lam, prof.slope_a, prof.slope_b
            en[i] = energy(prof, beta)
    return Trajectory(params, beta, h, law, stride, t_arr, a_arr, b_arr, ell_arr,
                      lam, sa, sb, en, ell_c=tables.ell_c)


@dataclass(frozen=True)
class ComparisonReport:
    ok: bool
    worst_gap: float
    worst_margin: float
    strictly_ordered: bool
    K: float
    C: float


def check_comparison(traj1: Trajectory, traj2: Trajectory, C: float | None = None) -> ComparisonReport:
    """Check that ``traj1`` stays behind ``traj2`` up to ``C h exp(K t)``.

    ``K`` is the Lipschitz constant of beta.  ``C`` defaults to the largest
    endpoint speed observed in either trajectory.  ``worst_gap`` is the
    largest ``max(a1 - a2, b1 - b2)``; ``worst_margin`` subtracts the tolerance.
    """
    if traj1.h != traj2.h or len(traj1) != len(traj2) or not np.allclose(traj1.t, traj2.t, rtol=0, atol=1e-12):
        raise PreconditionError("trajectories must share step size and time grid")
    if traj1.params != traj2.params:
        raise PreconditionError("trajectories must share physical parameters")
    K = 0.0 if traj1.law == "homogenized" else traj1.beta.lipschitz
    if C is None:
        speeds = [np.max(np.abs(np.diff(x))) / traj1.dt for x in (traj1.a, traj1.b, traj2.a, traj2.b)]
        C = max(speeds) if len(traj1) > 1 else 0.0
    t = traj1.t - traj1.t[0]
    gap = np.maximum(traj1.a - traj2.a, traj1.b - traj2.b)
    tol = C * traj1.h * np.exp(K * t)
    margin = gap - tol
    strict = bool(np.all(traj1.a < traj2.a) and np.all(traj1.b < traj2.b))
    return ComparisonReport(bool(np.all(margin <= 0.0)), float(gap.max()), float(margin.max()),
                            strict, K, C)


def sliding_onset(traj: Trajectory, eta: float):
    """First sample time after which the front moves faster than ``eta`` for good.

    Defined only when ``max beta - min beta < V0 tilt``.  Returns ``None`` if
    the front never settles above ``eta`` within the trajectory.
    """
    if not traj.beta.oscillation < traj.params.drive:
        raise PreconditionError("sliding onset is undefined unless max beta - min beta < V0 kappa sin(alpha)")
    speed = np.diff(traj.b) / traj.dt
    slow = np.nonzero(speed <= eta)[0]
    if len(slow) == 0:
        return float(traj.t[0])
    idx = slow[-1] + 1
    if idx >= len(speed):
        return None
    return float(traj.t[idx])
