import math

import numpy as np
import pytest

from slidedrop.acceptance import closed_form_sine_r, params_for_drive, pulsating_periodicity
from slidedrop.beta import BetaProfile
from slidedrop.dynamics import DropState, simulate
from slidedrop.equilibrium import PhysicalParams
from slidedrop.errors import PreconditionError
from slidedrop.homog import EffectiveLaw
from slidedrop.tables import SlopeTables
from slidedrop.waves import (homogenized_tw_speed, pulsating_wave, sticking_barrier, traveling_wave,
                             tw_speed_formula)


def tables_for(drive):
    return SlopeTables(params_for_drive(drive))


@pytest.mark.parametrize("drive, speed, degenerate", [
    (1.0, 0.5, False),
    (3.0, 2.0, True),
    (0.5, 0.25, False),
    (2.0, 1.0, True),
])
def test_traveling_wave_speed(drive, speed, degenerate):
    tw = traveling_wave(1.0, tables_for(drive))
    assert tw.speed == pytest.approx(speed, rel=1e-14)
    assert tw.degenerate_rear is degenerate


@pytest.mark.parametrize("drive", [0.3, 1.0, 1.9, 2.5, 4.0])
def test_traveling_wave_complementarity(drive):
    tab = tables_for(drive)
    tw = traveling_wave(1.0, tab)
    g, h = tab.exact(tw.ell0)
    assert max(-(g + h - 2.0), tw.ell0 - tab.ell_c) == pytest.approx(0.0, abs=1e-10)


def test_traveling_length_matches_oracle():
    # F(ell0) = 2 solved with Richardson-extrapolated finite-difference slopes
    assert traveling_wave(1.0, tables_for(0.5)).ell0 == pytest.approx(2.1330780751148106, abs=1e-8)


def test_speed_formula_kink():
    eps = 1e-6
    left = (tw_speed_formula(2.0, 1.0) - tw_speed_formula(2.0 - eps, 1.0)) / eps
    right = (tw_speed_formula(2.0 + eps, 1.0) - tw_speed_formula(2.0, 1.0)) / eps
    assert left == pytest.approx(0.5) and right == pytest.approx(1.0)
    assert tw_speed_formula(2.0 - 1e-15, 1.0) == pytest.approx(tw_speed_formula(2.0, 1.0), abs=1e-14)


@pytest.mark.parametrize("factor", [0.7, 1.3])
def test_traveling_length_is_attracting(factor):
    tab = tables_for(0.5)
    tw = traveling_wave(1.0, tab)
    traj = simulate(DropState(0.0, -factor * tw.ell0, 0.0), 40.0, 1e-2, BetaProfile.constant(1.0),
                    tables=tab, diagnostics=False)
    assert abs(traj.ell[-1] - tw.ell0) < 1e-4


def test_traveling_wave_needs_tilt():
    with pytest.raises(PreconditionError):
        traveling_wave(1.0, SlopeTables(PhysicalParams(1.0, 1.0, 0.0)))


def test_pulsating_constant_beta_reduces_to_traveling_wave():
    tab = tables_for(1.0)
    pw = pulsating_wave(BetaProfile.constant(1.0), tab)
    tw = traveling_wave(1.0, tab)
    assert np.all(pw.z == tw.ell0)
    assert pw.mean_speed == pytest.approx(tw.speed)


@pytest.mark.parametrize("drive", [1.0, 2.0])
def test_pulsating_iteration_monotone(drive):
    tab = tables_for(drive)
    pw = pulsating_wave(BetaProfile.sine(1.0, 0.1), tab)
    d = pw.sup_diffs
    assert pw.converged and d[-1] < 1e-8
    assert all(d[i + 1] < d[i] for i in range(len(d) - 1))
    assert np.all(pw.z <= tab.ell_c)
    assert pw.z[0] == pytest.approx(pw.z[-1], abs=1e-8)
    h = tab.H(pw.z) - BetaProfile.sine(1.0, 0.1)(pw.x)
    assert np.all(h > 0)


def test_pulsating_matches_trajectory():
    beta = BetaProfile.sine(1.0, 0.1)
    pw, dev, traj = pulsating_periodicity(1.0, beta, h=2e-3, periods=25)
    assert dev < 5e-3
    late = traj.t > 0.5 * traj.t[-1]
    t, b = traj.t[late], traj.b[late]
    assert (b[-1] - b[0]) / (t[-1] - t[0]) == pytest.approx(pw.mean_speed, rel=1e-2)
    assert np.max(np.abs(traj.ell[late] - pw(b))) < 1e-3


def test_pulsating_refuses_pinned_regime():
    with pytest.raises(PreconditionError):
        pulsating_wave(BetaProfile.sine(1.0, 0.4), tables_for(0.5))


@pytest.mark.parametrize("drive", np.linspace(0.2, 4.0, 9).tolist())
def test_homogenized_speed_with_linear_law(drive):
    r = EffectiveLaw.linear(1.0)
    assert homogenized_tw_speed(r, params_for_drive(drive)) == pytest.approx(
        tw_speed_formula(drive, 1.0), abs=1e-12)


def homog_speed_closed_form(drive):
    # corner where the sum r(q + S) + r(q) first vanishes at q = 0: S = 2
    if drive <= 0.6:
        return 0.0
    if drive < 2.0:
        return math.sqrt(drive**2 / 4 - 0.09)
    return math.sqrt((drive - 1) ** 2 - 0.09)


@pytest.mark.parametrize("drive", [0.3, 0.8, 1.5, 1.99, 2.01, 3.0])
def test_homogenized_speed_with_sine_law(drive):
    beta = BetaProfile.sine(1.0, 0.3)
    c = homogenized_tw_speed(lambda q: closed_form_sine_r(q), params_for_drive(drive))
    assert c == pytest.approx(homog_speed_closed_form(drive), abs=1e-9)
    c_num = homogenized_tw_speed(EffectiveLaw(beta, cached=False), params_for_drive(drive))
    assert c_num == pytest.approx(homog_speed_closed_form(drive), abs=1e-9)


def test_homogenized_speed_monotone_and_slower():
    r = EffectiveLaw(BetaProfile.sine(1.0, 0.3))
    grid = np.linspace(0.1, 4.0, 40)
    c = [homogenized_tw_speed(r, params_for_drive(d)) for d in grid]
    assert np.all(np.diff(c) >= 0)
    assert all(ci < tw_speed_formula(d, 1.0) for ci, d in zip(c, grid))


def test_sticking_barrier_found_for_short_period(base_tables):
    beta = BetaProfile.sine(1.0, 0.4, period=0.05)
    bar = sticking_barrier(beta, base_tables)
    assert bar is not None
    assert bar.front_margin <= 1e-9 and bar.rear_margin <= 1e-9
    assert beta(bar.a) == pytest.approx(beta.beta_min)
    assert beta(bar.b) == pytest.approx(beta.beta_max)
    assert bar.ell0 <= bar.b - bar.a <= bar.ell0 + beta.period
    traj = simulate(DropState(0.0, bar.a - 1.0, bar.b - 0.2), 5.0, 5e-4, beta, tables=base_tables,
                    diagnostics=False)
    assert np.max(traj.b) <= bar.b


def test_no_barrier_when_drive_beats_oscillation(base_tables):
    assert sticking_barrier(BetaProfile.sine(1.0, 0.2, period=0.05), base_tables) is None


def test_no_barrier_for_long_period(base_tables):
    assert sticking_barrier(BetaProfile.sine(1.0, 0.4, period=1.0), base_tables) is None
