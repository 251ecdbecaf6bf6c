"""Volume-constrained equilibrium profiles of a two-dimensional ridge on an incline.

On a support ``(left, b)`` of length ``ell`` the profile solves

    -u'' + k2 u = lam + (x - b) tilt,   u(left) = u(b) = 0,   int u = V0,

with ``k2 = kappa cos(alpha)`` and ``tilt = kappa sin(alpha)``.  The problem is
linear in ``lam``, so ``u = lam * v1 + v2`` where ``v1`` carries the unit
pressure and ``v2`` the gravity load.  Both are written in the rescaled
coordinate ``sigma = (x - left) / ell`` with the dimensionless rate
``z = sqrt(k2) * ell``:

    v1 = ell**2 * A(sigma, z),      v2 = tilt * ell**3 * B(sigma, z).

Everything below evaluates ``A``, ``B``, their sigma-derivatives and integrals
in closed form, switching to truncated Taylor series in ``z**2`` where the
hyperbolic expressions cancel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import PreconditionError

__all__ = [
    "PhysicalParams",
    "EquilibriumProfile",
    "UNBOUNDED",
    "solve_bvp",
    "solve_obstacle",
    "positivity_check",
    "energy",
    "critical_length",
]

# below this value of z**2 the hyperbolic forms lose digits; four series terms
# leave a truncation error below 1e-14 relative
_SERIES_Z2 = 1e-2


class _Unbounded:
    """Tag for an infinite critical length (no gravity component along the plane)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNBOUNDED"

    def __reduce__(self):
        return (_Unbounded, ())


UNBOUNDED = _Unbounded()


@dataclass(frozen=True)
class PhysicalParams:
    """Drop volume (area per unit span), ``kappa = rho g / sigma`` and inclination."""

    V0: float
    kappa: float
    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.V0) and self.V0 > 0):
            raise PreconditionError(f"V0 must be positive, got {self.V0!r}")
        if not (math.isfinite(self.kappa) and self.kappa >= 0):
            raise PreconditionError(f"kappa must be >= 0, got {self.kappa!r}")
        if not (0.0 <= self.alpha < math.pi / 2):
            raise PreconditionError(f"alpha must lie in [0, pi/2), got {self.alpha!r}")

    @property
    def k2(self) -> float:
        return self.kappa * math.cos(self.alpha)

    @property
    def tilt(self) -> float:
        return self.kappa * math.sin(self.alpha)

    @property
    def drive(self) -> float:
        """``V0 * tilt``, the driving strength that appears in all speed formulas."""
        return self.V0 * self.tilt


# ---------------------------------------------------------------------------
# scalar basis functions of z

def _horner(coeffs, x):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


_TA = (1 / 2, -1 / 24, 1 / 240, -17 / 40320, 31 / 725760)
_IA = (1 / 12, -1 / 120, 17 / 20160, -31 / 362880, 691 / 79833600)
_IB = (-1 / 24, 1 / 240, -17 / 40320, 31 / 725760, -691 / 159667200)
_BP0 = (-1 / 3, 1 / 45, -2 / 945, 1 / 4725, -2 / 93555)
_BP1 = (1 / 6, -7 / 360, 31 / 15120, -127 / 604800, 73 / 3421440)


def _endpoint_coefficients(z: float):
    """Return ``(Ta, IA, IB, Bp0, Bp1)``.

    ``A'(0) = -A'(1) = Ta``, ``int A = IA``, ``int B = IB``, ``B'(0) = Bp0``
    and ``B'(1) = Bp1`` (derivatives with respect to sigma).
    """
    z2 = z * z
    if z2 < _SERIES_Z2:
        return (_horner(_TA, z2), _horner(_IA, z2), _horner(_IB, z2),
                _horner(_BP0, z2), _horner(_BP1, z2))
    th = math.tanh(z / 2)
    ta = th / z
    ia = (z - 2 * th) / z**3
    ib = (ta - 0.5) / z2
    bp0 = (1 - z / math.tanh(z)) / z2
    # z / sinh(z) without overflow
    e = math.exp(-z)
    bp1 = (1 - 2 * z * e / (1 - e * e)) / z2
    return ta, ia, ib, bp0, bp1


# B(sigma, z) = sum_i z^(2i) * p_i(w),  w = 1 - sigma
_B_SERIES = [
    P.polymul([0, -1, 0, 1], c)
    for c in (
        [1 / 6],
        np.array([-7, 0, 3]) / 360,
        np.array([31, 0, -18, 0, 3]) / 15120,
        np.array([-381, 0, 239, 0, -55, 0, 5]) / 1814400,
    )
]
_DB_SERIES = [P.polyder(c) for c in _B_SERIES]


def _shc(x):
    """sinh(x)/x, equal to 1 at the origin."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    nz = x != 0
    out[nz] = np.sinh(x[nz]) / x[nz]
    return out


def _basis_A(s, z):
    if z < 1.0:
        return 0.5 * s * (1 - s) * _shc(z * s / 2) * _shc(z * (1 - s) / 2) / math.cosh(z / 2)
    d = np.abs(z * (s - 0.5))
    ratio = np.exp(d - z / 2) * (1 + np.exp(-2 * d)) / (1 + math.exp(-z))
    return (1 - ratio) / (z * z)


def _basis_dA(s, z):
    d = s - 0.5
    if z < 1.0:
        return -d * _shc(z * d) / math.cosh(z / 2)
    ad = np.abs(z * d)
    return -np.sign(d) * np.exp(ad - z / 2) * (1 - np.exp(-2 * ad)) / ((1 + math.exp(-z)) * z)


def _basis_B(s, z):
    w = 1 - s
    z2 = z * z
    if z2 < _SERIES_Z2:
        return sum(P.polyval(w, c) * z2**i for i, c in enumerate(_B_SERIES))
    ratio = np.exp(-z * s) * (1 - np.exp(-2 * z * w)) / (1 - math.exp(-2 * z))
    return (ratio - w) / z2


def _basis_dB(s, z):
    w = 1 - s
    z2 = z * z
    if z2 < _SERIES_Z2:
        return -sum(P.polyval(w, c) * z2**i for i, c in enumerate(_DB_SERIES))
    ratio = np.exp(-z * s) * (1 + np.exp(-2 * z * w)) / (1 - math.exp(-2 * z))
    return (1 - z * ratio) / z2


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquilibriumProfile:
    """A solved drop shape on the prescribed interval ``(a, b)``.

    The drop is wet on ``(support_left, b)``.  Calling the profile evaluates
    ``u`` (zero outside the support); :meth:`derivative` gives ``u'``.
    """

    a: float
    b: float
    support_left: float
    lam: float
    slope_a: float
    slope_b: float
    params: PhysicalParams = field(repr=False)

    @property
    def ell(self) -> float:
        """Length of the wet support."""
        return self.b - self.support_left

    @property
    def _z(self) -> float:
        return math.sqrt(self.params.k2) * self.ell

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        s = np.clip((x - self.support_left) / self.ell, 0.0, 1.0)
        ell, z = self.ell, self._z
        u = self.lam * ell**2 * _basis_A(s, z) + self.params.tilt * ell**3 * _basis_B(s, z)
        u = np.where((x > self.support_left) & (x < self.b), u, 0.0)
        return u if u.ndim else float(u)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        s = np.clip((x - self.support_left) / self.ell, 0.0, 1.0)
        ell, z = self.ell, self._z
        du = self.lam * ell * _basis_dA(s, z) + self.params.tilt * ell**2 * _basis_dB(s, z)
        du = np.where((x >= self.support_left) & (x <= self.b), du, 0.0)
        return du if du.ndim else float(du)

    def volume(self, order: int = 32, panels: int = 8) -> float:
        return _gauss_integral(self, self.support_left, self.b, order, panels)


def _solve_support(left: float, b: float, params: PhysicalParams):
    ell = b - left
    z = math.sqrt(params.k2) * ell
    ta, ia, ib, bp0, bp1 = _endpoint_coefficients(z)
    tilt = params.tilt
    lam = (params.V0 - tilt * ell**4 * ib) / (ell**3 * ia)
    slope_a = lam * ell * ta + tilt * ell**2 * bp0
    slope_b = -lam * ell * ta + tilt * ell**2 * bp1
    return lam, slope_a, slope_b


def solve_bvp(a: float, b: float, params: PhysicalParams) -> EquilibriumProfile:
    """Solve the linear volume-constrained problem on ``(a, b)``.

    Positivity is not enforced; for ``b - a`` beyond the critical length the
    returned profile dips below zero near ``a``.
    """
    if not b > a:
        raise PreconditionError(f"degenerate interval: a={a!r}, b={b!r}")
    lam, sa, sb = _solve_support(a, b, params)
    return EquilibriumProfile(a, b, a, lam, sa, sb, params)


def solve_obstacle(a: float, b: float, params: PhysicalParams, ell_c=None) -> EquilibriumProfile:
    """Solve the problem with the constraint ``u >= 0``.

    Intervals no longer than the critical length give the linear solution.
    Longer intervals detach at the rear: the drop occupies
    ``(b - ell_c, b)`` and meets the plane tangentially there.
    """
    if not b > a:
        raise PreconditionError(f"degenerate interval: a={a!r}, b={b!r}")
    if ell_c is None:
        ell_c = critical_length(params)
    if ell_c is UNBOUNDED or b - a <= ell_c:
        return solve_bvp(a, b, params)
    left = b - ell_c
    lam, _, sb = _solve_support(left, b, params)
    return EquilibriumProfile(a, b, left, lam, 0.0, sb, params)


def positivity_check(profile: EquilibriumProfile, samples: int = 2049) -> bool:
    """True iff the profile is nonnegative on its interval.

    Nonnegativity is equivalent to a nonnegative rear slope; the sampled
    minimum guards against a wrong sign convention upstream.
    """
    x = np.linspace(profile.support_left, profile.b, samples)[1:-1]
    u = profile(x)
    floor = -1e-12 * max(1.0, float(np.max(np.abs(u))))
    return bool(profile.slope_a >= 0.0 and np.min(u) >= floor)


# ---------------------------------------------------------------------------

def _gauss_nodes(order: int, panels: int, lo: float, hi: float):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _gauss_integral(f, lo, hi, order=32, panels=8):
    nodes, weights = _gauss_nodes(order, panels, lo, hi)
    return float(np.dot(weights, f(nodes)))


def energy(profile: EquilibriumProfile, beta, order: int = 16, panels: int = 8) -> float:
    """Free energy of the profile plus the adhesion energy of its support.

    ``beta`` must provide ``integral(lo, hi)``.  The bulk term is integrated
    with composite Gauss-Legendre on the wet support.
    """
    p = profile.params
    nodes, weights = _gauss_nodes(order, panels, profile.support_left, profile.b)
    u = profile(nodes)
    du = profile.derivative(nodes)
    bulk = 0.5 * du**2 + 0.5 * p.k2 * u**2 - u * nodes * p.tilt
    return float(np.dot(weights, bulk)) + float(beta.integral(profile.support_left, profile.b))


def critical_length(params: PhysicalParams, rel_tol: float = 1e-14):
    """Length at which the rear slope of the linear solution vanishes.

    Returns :data:`UNBOUNDED` when the plane is horizontal or gravity is off;
    the rear contact angle then never degenerates.
    """
    tilt = params.tilt
    if tilt <= 0.0:
        return UNBOUNDED

    def rear(ell):
        return _solve_support(0.0, ell, params)[1]

    # kappa -> 0 limit: rear slope = 6 V0/ell^2 - tilt ell^2 / 12
    lo = (72.0 * params.V0 / tilt) ** 0.25
    while rear(lo) <= 0.0:
        lo *= 0.5
    # integrating -u'' <= lam + (x - b) tilt over a detached support gives
    # ell * tilt <= 2 lam, so 2 lam(ell) < ell * tilt certifies ell > ell_c
    hi = 2.0 * lo
    while rear(hi) > 0.0 and 2.0 * _solve_support(0.0, hi, params)[0] >= hi * tilt:
        hi *= 2.0
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if rear(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return lo if abs(rear(lo)) <= abs(rear(hi)) else hi
