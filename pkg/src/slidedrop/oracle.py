"""Brute-force finite-difference reference solvers for cross-validation.

Nothing here reuses the closed-form machinery; only :class:`PhysicalParams`
is shared.  Grids are uniform with ``n`` intervals (``n + 1`` nodes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.linalg import solve_banded

from .equilibrium import PhysicalParams
from .errors import NumericalError, PreconditionError

__all__ = [
    "GridSolution",
    "fd_bvp",
    "fd_obstacle",
    "fd_critical_length",
    "fd_slopes_extrapolated",
    "reference_trajectory",
]


@dataclass
class GridSolution:
    x: np.ndarray
    u: np.ndarray
    lam: float
    iterations: int = 0

    @property
    def n(self) -> int:
        return len(self.x) - 1

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def slope_a(self) -> float:
        u, d = self.u, self.dx
        return float((-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * d))

    @property
    def slope_b(self) -> float:
        u, d = self.u, self.dx
        return float((3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * d))

    def volume(self) -> float:
        return float(np.trapezoid(self.u, self.x))

    @property
    def support_left(self) -> float:
        """First node with a positive value, stepped back to the last zero node."""
        pos = np.nonzero(self.u[1:-1] > 0.0)[0]
        return float(self.x[pos[0]]) if len(pos) else float(self.x[-1])


def _check(a, b, n):
    if n < 16:
        raise PreconditionError(f"need at least 16 grid intervals, got {n!r}")
    if not b > a:
        raise PreconditionError(f"empty interval ({a!r}, {b!r})")


def _rhs(x, b, params):
    return (x - b) * params.tilt


def fd_bvp(a: float, b: float, params: PhysicalParams, n: int = 1024) -> GridSolution:
    """Central differences for ``-u'' + k2 u = lam + (x - b) tilt`` with a trapezoid volume row.

    The tridiagonal block is solved twice (for the load and for a unit
    pressure) and the pressure follows from the volume row.
    """
    _check(a, b, n)
    x = np.linspace(a, b, n + 1)
    d = x[1] - x[0]
    m = n - 1
    ab = np.empty((3, m))
    ab[0, :] = -1.0 / d ** 2
    ab[1, :] = 2.0 / d ** 2 + params.k2
    ab[2, :] = -1.0 / d ** 2
    rhs = np.column_stack([_rhs(x[1:-1], b, params), np.ones(m)])
    w = solve_banded((1, 1), ab, rhs)
    s_load, s_unit = w[:, 0].sum() * d, w[:, 1].sum() * d
    if s_unit == 0.0:
        raise NumericalError("singular bordered system")
    lam = (params.V0 - s_load) / s_unit
    u = np.zeros(n + 1)
    u[1:-1] = w[:, 0] + lam * w[:, 1]
    return GridSolution(x, u, float(lam))


def _psor(u, lam, f, d, k2, omega, tol, cap):
    diag = 2.0 / d ** 2 + k2
    off = 1.0 / d ** 2
    nodes = np.arange(len(u))
    colors = [(sl, nodes[sl]) for sl in (slice(1, -1, 2), slice(2, -1, 2))]
    scale = max(1.0, abs(lam) + float(np.max(np.abs(f))))
    for it in range(1, cap + 1):
        delta = 0.0
        for sl, i in colors:
            gs = (lam + f[sl] + off * (u[i - 1] + u[i + 1])) / diag
            new = np.maximum(0.0, u[sl] + omega * (gs - u[sl]))
            delta = max(delta, float(np.max(np.abs(new - u[sl]))))
            u[sl] = new
        if delta < tol:
            # small updates alone can stall; also require complementarity
            lap = diag * u[1:-1] - off * (u[:-2] + u[2:])
            resid = np.minimum(u[1:-1], lap - lam - f[1:-1])
            if float(np.max(np.abs(resid))) < tol * scale:
                return it
    raise NumericalError(f"projected relaxation did not converge in {cap} sweeps")


def fd_obstacle(a: float, b: float, params: PhysicalParams, n: int = 512, *,
                tol: float = 1e-10, max_outer: int = 60) -> GridSolution:
    """Non-negative discrete equilibrium with the volume constraint.

    Projected over-relaxation (red-black ordering) solves the
    complementarity problem at fixed pressure; the pressure is corrected by
    a secant step on the volume, which is linear in it on a fixed active set.
    """
    _check(a, b, n)
    start = fd_bvp(a, b, params, n)
    x = start.x
    d = start.dx
    f = _rhs(x, b, params)
    omega = 2.0 / (1.0 + math.sin(math.pi / n))
    cap = 200 * n
    u = np.maximum(start.u, 0.0)
    sweeps = 0

    def vol_at(lam):
        nonlocal sweeps
        sweeps += _psor(u, lam, f, d, params.k2, omega, tol, cap)
        return float(np.trapezoid(u, x))

    lam0 = start.lam
    v0 = vol_at(lam0)
    lam1 = lam0 * (1.0 + 1e-3) + 1e-3
    for _ in range(max_outer):
        v1 = vol_at(lam1)
        if abs(lam1 - lam0) < tol * max(1.0, abs(lam1)) and abs(v1 - params.V0) < 1e-9 * params.V0:
            return GridSolution(x, u.copy(), float(lam1), sweeps)
        if v1 == v0:
            raise NumericalError("volume insensitive to pressure in obstacle solve")
        lam0, v0, lam1 = lam1, v1, lam1 + (params.V0 - v1) * (lam1 - lam0) / (v1 - v0)
    raise NumericalError(f"pressure iteration did not converge in {max_outer} steps")


def fd_slopes_extrapolated(a: float, b: float, params: PhysicalParams, n: int = 256):
    """``(lam, slope_a, slope_b)`` Richardson-extrapolated from ``n`` and ``2n`` intervals."""
    s1 = fd_bvp(a, b, params, n)
    s2 = fd_bvp(a, b, params, 2 * n)
    q1 = np.array([s1.lam, s1.slope_a, s1.slope_b])
    q2 = np.array([s2.lam, s2.slope_a, s2.slope_b])
    return tuple((4.0 * q2 - q1) / 3.0)


def fd_critical_length(params: PhysicalParams, n: int = 2048, rel_tol: float = 1e-10) -> float:
    """Support length at which the discrete rear slope vanishes."""
    if params.tilt == 0.0:
        return math.inf
    rear = lambda ell: fd_bvp(0.0, ell, params, n).slope_a  # noqa: E731
    lo = hi = 1.0
    while rear(lo) <= 0.0:
        lo *= 0.5
    while rear(hi) > 0.0:
        hi *= 2.0
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if rear(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def reference_trajectory(a0: float, b0: float, T: float, beta, params: PhysicalParams, *,
                         n: int = 256, rtol: float = 1e-9, atol: float = 1e-11, t_eval=None):
    """Adaptive-step integration of the endpoint ODEs with finite-difference slopes.

    Only for the regime where the rear slope stays positive; raises if the
    support reaches the discrete critical length.
    """

    def rhs(_t, y):
        a, b = y
        _, sa, sb = fd_slopes_extrapolated(a, b, params, n)
        if sa <= 0.0:
            raise PreconditionError("reference integrator left the regime with a positive rear slope")
        return [float(beta(a)) - 0.5 * sa * sa, 0.5 * sb * sb - float(beta(b))]

    sol = integrate.solve_ivp(rhs, (0.0, T), [a0, b0], method="RK45", rtol=rtol, atol=atol,
                              t_eval=t_eval)
    if not sol.success:
        raise NumericalError(f"reference integration failed: {sol.message}")
    return sol.t, sol.y[0], sol.y[1]
