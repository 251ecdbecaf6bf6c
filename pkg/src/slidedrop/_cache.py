"""Lazily refined piecewise-linear tables for expensive monotone functions."""

from __future__ import annotations

import math
import threading

import numpy as np


class DyadicCache:
    """Piecewise-linear interpolant of ``func`` on ``[lo, hi]``, built on demand.

    The coordinate ``s in [0, 1]`` (linear in ``x``, or in ``log x`` when
    ``log=True``) is cut into dyadic cells.  A cell is accepted once the
    interpolant at its midpoint is within half of ``atol + rtol * |f|`` of the
    exact value (the factor covers the cubic term away from the midpoint, so the
    full tolerance holds across the cell); otherwise evaluation descends to the two children.  Solved nodes
    and cell verdicts are memoized, so repeated queries in the same region
    cost a few dictionary lookups.  Linear interpolation between exact nodes
    preserves monotonicity of each component.

    ``func`` maps a float to a 1-D array of values.  Queries outside
    ``[lo, hi]`` or below the finest level fall back to ``func``.
    """

    def __init__(self, func, lo, hi, *, log=False, atol=1e-7, rtol=1e-7,
                 min_level=3, max_level=36):
        if not hi > lo or (log and lo <= 0):
            raise ValueError(f"bad cache range [{lo!r}, {hi!r}]")
        self.func = func
        self.lo, self.hi, self.log = float(lo), float(hi), log
        self.atol, self.rtol = atol, rtol
        self.min_level, self.max_level = min_level, max_level
        if log:
            self._c0, self._span = math.log(lo), math.log(hi) - math.log(lo)
        else:
            self._c0, self._span = lo, hi - lo
        self._nodes = {}
        self._accepted = {}
        self._rejected = set()
        self._lock = threading.Lock()

    def _coord(self, x):
        return ((math.log(x) if self.log else x) - self._c0) / self._span

    def _x(self, s):
        c = self._c0 + s * self._span
        return math.exp(c) if self.log else c

    def _node(self, j, k):
        key = k << (self.max_level - j)
        val = self._nodes.get(key)
        if val is None:
            val = np.asarray(self.func(self._x(k / (1 << j))), dtype=float)
            self._nodes[key] = val
        return val

    def _try_accept(self, j, k):
        with self._lock:
            if (j, k) in self._accepted:
                return True
            if (j, k) in self._rejected:
                return False
            f0 = self._node(j, k)
            f1 = self._node(j, k + 1)
            fm = self._node(j + 1, 2 * k + 1)
            err = np.abs(fm - 0.5 * (f0 + f1))
            if np.all(err <= 0.5 * (self.atol + self.rtol * np.abs(fm))):
                self._accepted[(j, k)] = (f0, f1)
                return True
            self._rejected.add((j, k))
            return False

    def __call__(self, x):
        x = float(x)
        if not self.lo <= x <= self.hi:
            return np.asarray(self.func(x), dtype=float)
        s = self._coord(x)
        for j in range(self.min_level, self.max_level):
            n = 1 << j
            k = min(int(s * n), n - 1)
            cell = self._accepted.get((j, k))
            if cell is None and (j, k) not in self._rejected and self._try_accept(j, k):
                cell = self._accepted[(j, k)]
            if cell is not None:
                f0, f1 = cell
                th = s * n - k
                return f0 + th * (f1 - f0)
        return np.asarray(self.func(x), dtype=float)

    @property
    def size(self) -> int:
        """Number of exact evaluations stored."""
        return len(self._nodes)
