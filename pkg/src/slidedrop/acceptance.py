"""End-to-end acceptance experiments, one function per criterion.

Each function returns a :class:`CriterionResult`; nothing here asserts, so the
same code drives the test suite and ``slidedrop check``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .beta import BetaProfile
from .dynamics import DropState, check_comparison, simulate, speed_bound
from .equilibrium import PhysicalParams, solve_bvp, solve_obstacle
from .homog import EffectiveLaw, effective_velocity, epsilon_sweep, sqrt_degeneracy_check
from .oracle import fd_bvp, fd_obstacle
from .tables import SlopeTables
from .waves import (homogenized_tw_speed, pulsating_wave, sticking_barrier, traveling_wave,
                    tw_speed_formula)

__all__ = ["CriterionResult", "CRITERIA", "run_all", "base_params", "params_for_drive"]

ALPHA = math.pi / 6
KAPPA = 1.0
DEFAULT_SEED = 20240601


def base_params(V0: float = 1.0) -> PhysicalParams:
    return PhysicalParams(V0, KAPPA, ALPHA)


def params_for_drive(drive: float) -> PhysicalParams:
    """Base inclination with the volume chosen so that ``V0 * tilt = drive``."""
    return base_params(drive / (KAPPA * math.sin(ALPHA)))


def closed_form_sine_r(q: float, mean: float = 1.0, amp: float = 0.3) -> float:
    """Effective velocity of ``mean + amp sin``: ``sign(q - mean) sqrt((q - mean)^2 - amp^2)`` off the plateau."""
    d = q - mean
    if abs(d) <= amp:
        return 0.0
    return math.copysign(math.sqrt(d * d - amp * amp), d)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    data: dict = field(default_factory=dict, repr=False)
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] criterion {self.number:2d}: {self.title}: {self.detail} ({self.seconds:.1f}s)"


def _random_params(rng, V0=(0.1, 5.0), kappa=(0.0, 5.0), alpha=(0.05, 1.4)):
    return PhysicalParams(rng.uniform(*V0), rng.uniform(*kappa), rng.uniform(*alpha))


def criterion_1(seed: int = DEFAULT_SEED) -> CriterionResult:
    """Front and rear slope energies differ by exactly the drive."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(50):
        p = _random_params(rng)
        tab = SlopeTables(p)
        ell = rng.uniform(0.2, 1.0) * tab.ell_c
        g, h = tab.exact(ell)
        worst = max(worst, abs(h - g - p.drive))
    return CriterionResult(1, "slope identity H - G = V0 tilt", worst <= 1e-8,
                           f"max |H - G - V0 tilt| = {worst:.2e} over 50 draws (tol 1e-8)",
                           {"worst": worst})


def criterion_2(seed: int = DEFAULT_SEED) -> CriterionResult:
    """Closed-form equilibrium against the finite-difference oracle."""
    rng = np.random.default_rng(seed + 2)
    worst = 0.0
    for _ in range(25):
        # FD truncation is ~k2 |slope| dx^2 / 3; this box keeps it below 1e-6 at n = 4096
        p = _random_params(rng, V0=(0.25, 2.0), kappa=(0.0, 1.0), alpha=(0.05, 1.3))
        tab = SlopeTables(p)
        a = rng.uniform(-1.0, 1.0)
        b = a + rng.uniform(0.5, 1.0) * tab.ell_c
        e = solve_bvp(a, b, p)
        s = fd_bvp(a, b, p, 4096)
        worst = max(worst, abs(e.lam - s.lam), abs(e.slope_a - s.slope_a), abs(e.slope_b - s.slope_b))
    edge_cells = []
    for V0 in (0.5, 1.0, 2.0):
        p = base_params(V0)
        tab = SlopeTables(p)
        b = 1.3 * tab.ell_c
        g = fd_obstacle(0.0, b, p, 256)
        edge_cells.append(abs(g.support_left - (b - tab.ell_c)) / g.dx)
    ok = worst <= 1e-6 and max(edge_cells) <= 2.0
    return CriterionResult(2, "oracle equivalence", ok,
                           f"max |diff| = {worst:.2e} (tol 1e-6); obstacle edge off by "
                           f"{max(edge_cells):.2f} cells (tol 2)",
                           {"worst": worst, "edge_cells": edge_cells})


def criterion_3() -> CriterionResult:
    p = PhysicalParams(1.0, 0.0, 0.0)
    e = solve_bvp(0.0, 2.0, p)
    err = max(abs(e.lam - 1.5), abs(e.slope_a - 1.5), abs(e.slope_b + 1.5))
    return CriterionResult(3, "parabola limit", err <= 1e-10,
                           f"lam = {e.lam!r}, slopes = ({e.slope_a!r}, {e.slope_b!r})", {"err": err})


def measure_tw_speed(drive: float, h: float, T: float = 40.0, beta0: float = 1.0):
    """Long-run front speed from an initial support half the traveling length."""
    p = params_for_drive(drive)
    tab = SlopeTables(p)
    tw = traveling_wave(beta0, tab)
    init = DropState(0.0, -0.5 * tw.ell0, 0.0)
    stride = max(1, int(round(0.5 * T / h / 100)))
    traj = simulate(init, T, h, BetaProfile.constant(beta0), tables=tab, stride=stride, diagnostics=False)
    i = len(traj.t) // 2
    return (traj.b[-1] - traj.b[i]) / (traj.t[-1] - traj.t[i]), tw


def criterion_4(h: float = 2e-3) -> CriterionResult:
    drives = [0.5, 1.0, 1.9, 2.1, 3.0]
    rows = []
    ok = True
    for d in drives:
        c1, tw = measure_tw_speed(d, h)
        c2, _ = measure_tw_speed(d, h / 2)
        expect = tw_speed_formula(d, 1.0)
        rel = abs(c2 - expect) / expect
        halving = abs(c2 - c1) / abs(c2)
        ok &= rel < 0.01 and halving < 0.002
        rows.append((d, c2, expect, rel, halving))
    # kink: intersect the lines through the measured points on either side
    left = np.array([(r[0], r[1]) for r in rows if r[0] < 2.0])
    right = np.array([(r[0], r[1]) for r in rows if r[0] > 2.0])
    sl, il = np.polyfit(left[:, 0], left[:, 1], 1)
    sr, ir = np.polyfit(right[:, 0], right[:, 1], 1)
    kink = (il - ir) / (sr - sl)
    kink_rel = abs(kink - 2.0) / 2.0
    ok &= kink_rel < 0.02
    worst = max(r[3] for r in rows)
    worst_h = max(r[4] for r in rows)
    return CriterionResult(4, "traveling-wave speed", bool(ok),
                           f"max rel err {worst:.2e} (tol 1e-2), h-halving change {worst_h:.2e} "
                           f"(tol 2e-3), kink at {kink:.4f} (tol 2%)",
                           {"rows": rows, "kink": kink})


def criterion_5(h: float = 1e-2, T: float = 60.0) -> CriterionResult:
    details = []
    ok = True
    for drive in (0.5, 1.9):
        p = params_for_drive(drive)
        tab = SlopeTables(p)
        tw = traveling_wave(1.0, tab)
        for f in (0.7, 1.3):
            ell = min(f * tw.ell0, tab.ell_c)
            traj = simulate(DropState(0.0, -ell, 0.0), T, h, BetaProfile.constant(1.0), tables=tab,
                            diagnostics=False)
            d = np.diff(traj.ell)
            # ell = b - a is only resolved to a few ulps of the endpoint positions
            ulp = 4.0 * float(np.spacing(np.max(np.abs(traj.b)) + np.max(np.abs(traj.a))))
            mono = bool(np.all(d <= ulp)) if ell > tw.ell0 else bool(np.all(d >= -ulp))
            gap = abs(traj.ell[-1] - tw.ell0)
            ok &= mono and gap < 1e-4
            details.append((drive, f, mono, gap))
    worst = max(x[3] for x in details)
    return CriterionResult(5, "stability of the traveling length", bool(ok),
                           f"4 runs monotone={all(x[2] for x in details)}, max |ell(T) - ell0| = {worst:.1e} "
                           f"(tol 1e-4)", {"runs": details})


def comparison_campaign(n_pairs: int = 100, seed: int = DEFAULT_SEED, T: float = 3.0, h: float = 2e-3):
    p = params_for_drive(1.0)
    tab = SlopeTables(p)
    beta = BetaProfile.sine(1.0, 0.3, period=0.5)
    rng = np.random.default_rng(seed + 6)
    reports = []
    while len(reports) < n_pairs:
        l1, l2 = rng.uniform(0.5, 1.0, size=2) * tab.ell_c
        a1 = rng.uniform(-1.0, 1.0)
        a2 = a1 + rng.uniform(0.0, 0.5)
        b1, b2 = a1 + l1, a2 + l2
        if b2 < b1:
            continue
        t1 = simulate(DropState(0.0, a1, b1), T, h, beta, tables=tab, stride=5, diagnostics=False)
        t2 = simulate(DropState(0.0, a2, b2), T, h, beta, tables=tab, stride=5, diagnostics=False)
        reports.append(check_comparison(t1, t2))
    return reports


def criterion_6(seed: int = DEFAULT_SEED) -> CriterionResult:
    reports = comparison_campaign(seed=seed)
    good = sum(r.ok for r in reports)
    strict = sum(r.worst_gap <= 0.0 for r in reports)
    return CriterionResult(6, "comparison principle", good == len(reports),
                           f"{good}/{len(reports)} pairs within C h e^(Kt); {strict} with no crossing at all",
                           {"ok": good, "no_crossing": strict})


def criterion_7() -> CriterionResult:
    beta = BetaProfile.sine(1.0, 0.3)
    errs = [abs(effective_velocity(q, beta) - closed_form_sine_r(q)) for q in (1.31, 1.4, 2.0, 5.0)]
    plateau = [effective_velocity(q, beta) for q in np.linspace(0.7, 1.3, 61)]
    expo = sqrt_degeneracy_check(beta)
    ok = max(errs) <= 1e-6 and all(r == 0.0 for r in plateau) and abs(expo - 0.5) <= 0.05
    return CriterionResult(7, "effective velocity", ok,
                           f"max err {max(errs):.1e} (tol 1e-6), plateau zero={all(r == 0.0 for r in plateau)}, "
                           f"exponent {expo:.4f}", {"errs": errs, "exponent": expo})


def criterion_8(T: float = 8.0) -> CriterionResult:
    p = params_for_drive(1.0)
    tab = SlopeTables(p)
    beta = BetaProfile.sine(1.0, 0.3)
    tw = traveling_wave(1.0, tab)
    init = DropState(0.0, -tw.ell0, 0.0)
    eps = [0.1, 0.05, 0.025]
    h = eps[-1] / (10.0 * speed_bound(p, beta, tab, init.ell))
    rep = epsilon_sweep(init, T, beta, eps, h, tab)
    cols = ", ".join(f"{e}: {x:.3e}" for e, x in zip(eps, rep.errors))
    return CriterionResult(8, "homogenization convergence", rep.strictly_decreasing,
                           f"sup errors {cols} (h = {h:.2e})", {"errors": rep.errors, "h": h})


def pulsating_periodicity(drive: float, beta: BetaProfile, h: float = 1e-3, periods: int = 40):
    p = params_for_drive(drive)
    tab = SlopeTables(p)
    pw = pulsating_wave(beta, tab)
    tw = traveling_wave(beta.mean(), tab)
    T = periods * pw.time_period
    traj = simulate(DropState(0.0, -tw.ell0, 0.0), T, h, beta, tables=tab, diagnostics=False)
    late = traj.t > 0.5 * T
    shifted = np.interp(traj.t[late] + pw.time_period, traj.t, traj.b, right=np.nan)
    dev = shifted - traj.b[late] - beta.period
    return pw, float(np.nanmax(np.abs(dev))), traj


def criterion_9() -> CriterionResult:
    beta = BetaProfile.sine(1.0, 0.1)
    ok = True
    parts = []
    data = {}
    for drive in (1.0, 2.0):
        pw, dev, _ = pulsating_periodicity(drive, beta)
        d = pw.sup_diffs
        mono = all(d[i + 1] < d[i] for i in range(len(d) - 1))
        ok &= pw.converged and mono and d[-1] < 1e-8 and dev < 5e-3
        parts.append(f"V0 tilt={drive}: {len(d)} periods, last diff {d[-1]:.1e}, monotone={mono}, "
                     f"|b(t+T)-b(t)-P| <= {dev:.1e}")
        data[drive] = {"diffs": d, "dev": dev, "T": pw.time_period}
    return CriterionResult(9, "pulsating wave", bool(ok), "; ".join(parts), data)


def criterion_10(h: float = 5e-4, T: float = 10.0) -> CriterionResult:
    p = base_params(1.0)
    tab = SlopeTables(p)
    beta = BetaProfile.sine(1.0, 0.4, period=0.05)
    bar = sticking_barrier(beta, tab)
    if bar is None:
        return CriterionResult(10, "sticking barrier", False, "no barrier found")
    # a short support pushes the front forward; the second run starts on the barrier itself
    b0 = bar.b - 0.3
    starts = [DropState(0.0, b0 - 0.5 * tab.ell_c, b0), DropState(0.0, bar.a, bar.b)]
    over, advance = [], []
    for init in starts:
        traj = simulate(init, T, h, beta, tables=tab, stride=10, diagnostics=False)
        over.append(float(np.max(traj.b) - bar.b))
        advance.append(float(traj.b[-1] - init.b))
    return CriterionResult(10, "sticking barrier", max(over) <= 0.0,
                           f"barrier ({bar.a:.4f}, {bar.b:.4f}); max b(t) - b* = {over[0]:.3e} after the front "
                           f"advanced {advance[0]:.3f}, {over[1]:.3e} from the barrier itself",
                           {"barrier": bar, "over": over, "advance": advance})


def criterion_11() -> CriterionResult:
    drives = np.linspace(0.1, 4.0, 40)
    lin = EffectiveLaw.linear(1.0)
    err_lin = max(abs(homogenized_tw_speed(lin, params_for_drive(d)) - tw_speed_formula(d, 1.0))
                  for d in drives)
    r = EffectiveLaw(BetaProfile.sine(1.0, 0.3))
    grid = np.linspace(0.2, 4.0, 77)
    c = np.array([homogenized_tw_speed(r, params_for_drive(d)) for d in grid])
    mono = bool(np.all(np.diff(c) >= 0.0))
    slower = bool(np.all(c < np.array([tw_speed_formula(d, 1.0) for d in grid])))
    fine = np.linspace(1.5, 2.5, 101)
    cf = np.array([homogenized_tw_speed(r, params_for_drive(d)) for d in fine])
    slopes = np.diff(cf) / np.diff(fine)
    jumps = np.diff(slopes)
    corner = float(fine[1:-1][np.argmax(jumps)])
    left = (cf[50] - cf[49]) / (fine[50] - fine[49])
    right = (cf[51] - cf[50]) / (fine[51] - fine[50])
    ok = err_lin <= 1e-12 and mono and slower and abs(corner - 2.0) <= 0.02 and right > 1.5 * left
    return CriterionResult(11, "homogenized traveling speed", ok,
                           f"linear-law err {err_lin:.1e}, monotone={mono}, slower than constant beta={slower}, "
                           f"corner at {corner:.3f} (slopes {left:.3f} -> {right:.3f})",
                           {"corner": corner, "curve": list(zip(grid.tolist(), c.tolist()))})


ENERGY_C = 1.0


def energy_increase_constant(h: float, T: float = 10.0):
    """``max_n (E_{n+1} - E_n) / h^2`` over constant-beta runs from both sides of the traveling length."""
    worst = -math.inf
    for drive in (0.5, 3.0):
        p = params_for_drive(drive)
        tab = SlopeTables(p)
        tw = traveling_wave(1.0, tab)
        for f in (0.5, 1.3):
            ell = min(f * tw.ell0, tab.ell_c)
            traj = simulate(DropState(0.0, -ell, 0.0), T, h, BetaProfile.constant(1.0), tables=tab)
            worst = max(worst, float(np.max(np.diff(traj.energy))) / h ** 2)
    return worst


def criterion_12(h: float = 1e-2) -> CriterionResult:
    c1 = energy_increase_constant(h)
    c2 = energy_increase_constant(h / 2)
    ok = c1 <= ENERGY_C and c2 <= ENERGY_C
    return CriterionResult(12, "energy dissipation", ok,
                           f"max (E[n+1] - E[n]) / h^2 = {c1:.3e} at h={h}, {c2:.3e} at h={h / 2} "
                           f"(C = {ENERGY_C})", {"c": (c1, c2)})


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6,
    7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10, 11: criterion_11, 12: criterion_12,
}


def run_criterion(number: int) -> CriterionResult:
    t0 = time.perf_counter()
    res = CRITERIA[number]()
    res.seconds = time.perf_counter() - t0
    return res


def run_all(numbers=None):
    return [run_criterion(n) for n in (numbers or sorted(CRITERIA))]
