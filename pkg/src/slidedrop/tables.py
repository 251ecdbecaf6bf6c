"""Contact-slope energies as functions of the support length.

``G(ell)`` and ``H(ell)`` are half the squared slopes at the rear and front
contact points of the constrained equilibrium on an interval of length
``ell``; ``F = G + H``.  Beyond the critical length the rear detaches and
both freeze at ``G = 0``, ``H = V0 * tilt``.
"""

from __future__ import annotations

import math

import numpy as np

from ._cache import DyadicCache
from .equilibrium import UNBOUNDED, PhysicalParams, _solve_support, critical_length
from .errors import PreconditionError

__all__ = ["SlopeTables", "critical_length", "UNBOUNDED"]


class SlopeTables:
    """``G``, ``H``, ``F`` and the critical length for fixed physical parameters.

    With ``cached=True`` the evaluators read a lazily refined table on
    ``[ell_min_grid, ell_max_grid]`` (log-spaced, interpolation tolerance
    ``tol``) and fall back to the closed-form solve elsewhere.  ``exact``
    always solves.
    """

    def __init__(self, params: PhysicalParams, *, cached: bool = True, tol: float = 1e-7):
        self.params = params
        self.ell_c = critical_length(params)
        self.cached = cached
        if self.bounded:
            self.ell_max_grid = self.ell_c
        else:
            self.ell_max_grid = 1e3 * math.sqrt(params.V0)
        self.ell_min_grid = 1e-3 * self.ell_max_grid
        self._cache = DyadicCache(self._exact_pair, self.ell_min_grid, self.ell_max_grid,
                                  log=True, atol=tol, rtol=tol)

    @property
    def bounded(self) -> bool:
        return self.ell_c is not UNBOUNDED

    @property
    def ell_floor(self) -> float:
        """Default lower guard on the support length used by the stepper."""
        return self.ell_max_grid * 1e-3

    def _exact_pair(self, ell):
        _, sa, sb = _solve_support(0.0, ell, self.params)
        return (0.5 * sa * sa, 0.5 * sb * sb)

    def exact(self, ell: float):
        """``(G(ell), H(ell))`` from a fresh closed-form solve."""
        if not ell > 0:
            raise PreconditionError(f"support length must be positive, got {ell!r}")
        if self.bounded and ell >= self.ell_c:
            return 0.0, self.params.drive
        return self._exact_pair(ell)

    def pair(self, ell: float):
        """``(G(ell), H(ell))`` through the cache."""
        if not ell > 0:
            raise PreconditionError(f"support length must be positive, got {ell!r}")
        if self.bounded and ell >= self.ell_c:
            return 0.0, self.params.drive
        if not self.cached:
            return self._exact_pair(ell)
        g, h = self._cache(ell)
        return float(g), float(h)

    def G(self, ell):
        return self._map(ell, 0)

    def H(self, ell):
        return self._map(ell, 1)

    def F(self, ell):
        if np.ndim(ell):
            return self.G(ell) + self.H(ell)
        g, h = self.pair(ell)
        return g + h

    def _map(self, ell, idx):
        if np.ndim(ell):
            return np.array([self.pair(float(e))[idx] for e in np.ravel(ell)]).reshape(np.shape(ell))
        return self.pair(ell)[idx]

    def H_inverse(self, level: float, rel_tol: float = 1e-13) -> float:
        """Length ``ell < ell_c`` with ``H(ell) = level`` (requires ``level > H(ell_c)``)."""
        top = self.ell_c if self.bounded else self.ell_max_grid
        if not level > self.exact(top)[1]:
            raise PreconditionError(f"H never reaches {level!r} below the critical length")
        lo = top
        while self.exact(lo)[1] <= level:
            lo *= 0.5
        hi = top
        while hi - lo > rel_tol * hi:
            mid = 0.5 * (lo + hi)
            if self.exact(mid)[1] > level:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def table(self, ells):
        """Rows ``(ell, G, H, F)`` evaluated exactly."""
        rows = []
        for ell in ells:
            g, h = self.exact(float(ell))
            rows.append((float(ell), g, h, g + h))
        return rows
