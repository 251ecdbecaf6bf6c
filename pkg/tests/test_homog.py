import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from slidedrop.acceptance import closed_form_sine_r, params_for_drive
from slidedrop.beta import BetaProfile
from slidedrop.dynamics import DropState
from slidedrop.errors import PreconditionError
from slidedrop.homog import EffectiveLaw, effective_velocity, epsilon_sweep, sqrt_degeneracy_check
from slidedrop.tables import SlopeTables

SINE = BetaProfile.sine(1.0, 0.3)


@pytest.mark.parametrize("q", [1.31, 1.4, 2.0, 5.0, 0.69, 0.5, -2.0, 1.3 + 1e-9])
def test_matches_closed_form(q):
    assert effective_velocity(q, SINE) == pytest.approx(closed_form_sine_r(q), abs=1e-12, rel=1e-6)


def test_value_at_two():
    assert effective_velocity(2.0, SINE) == pytest.approx(math.sqrt(0.91), abs=1e-14)


@pytest.mark.parametrize("q", np.linspace(0.7, 1.3, 13).tolist())
def test_plateau_is_exactly_zero(q):
    assert effective_velocity(q, SINE) == 0.0


@pytest.mark.parametrize("q", [-1.0, 0.5, 2.0])
def test_constant_beta_is_linear(q):
    assert effective_velocity(q, BetaProfile.constant(0.8)) == q - 0.8


@given(q1=st.floats(-3.0, 5.0), q2=st.floats(-3.0, 5.0))
def test_monotone_and_signed(q1, q2):
    lo, hi = sorted((q1, q2))
    r_lo, r_hi = effective_velocity(lo, SINE), effective_velocity(hi, SINE)
    assert r_lo <= r_hi + 1e-12
    for q, r in ((lo, r_lo), (hi, r_hi)):
        if q > 1.3:
            assert r > 0
        elif q < 0.7:
            assert r < 0


def test_period_does_not_change_r():
    short = BetaProfile.sine(1.0, 0.3, period=0.05, phase=0.01)
    for q in (1.35, 2.0, 0.2):
        assert effective_velocity(q, short) == pytest.approx(effective_velocity(q, SINE), rel=1e-10)


def test_continuity_at_plateau_edges():
    vals = [effective_velocity(1.3 + 2.0**-k, SINE) for k in range(4, 40, 4)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-5


def test_locally_lipschitz_off_plateau():
    qs = np.linspace(1.35, 4.0, 200)
    r = np.array([effective_velocity(q, SINE) for q in qs])
    quot = np.diff(r) / np.diff(qs)
    assert np.all(quot > 0) and np.max(quot) < 5.0


def test_degeneracy_exponent():
    assert sqrt_degeneracy_check(SINE) == pytest.approx(0.5, abs=0.05)


def test_degeneracy_refusals():
    with pytest.raises(PreconditionError):
        sqrt_degeneracy_check(BetaProfile.constant(1.0))
    with pytest.raises(PreconditionError):
        sqrt_degeneracy_check(BetaProfile.piecewise_linear([0.0, 0.5], [0.7, 1.3], 1.0))


def test_lipschitz_beta_has_log_law():
    tent = BetaProfile.piecewise_linear([0.0, 0.5], [0.7, 1.3], 1.0)
    # symmetric tent: each half-period takes (1 / 1.2) ln((d + 0.6) / d)
    for d in (1e-2, 1e-5, 1e-9):
        expect = 0.6 / math.log((d + 0.6) / d)
        assert effective_velocity(1.3 + d, tent) == pytest.approx(expect, rel=1e-8)
        assert effective_velocity(1.3 + d, tent) * -math.log(d) < 0.7


def test_cached_law_close_to_exact():
    law = EffectiveLaw(SINE)
    for q in np.linspace(-1.0, 4.0, 51):
        assert law(q) == pytest.approx(law.exact(q), abs=1e-6)
    assert law(1.0) == 0.0
    assert law.plateau == (0.7, 1.3)


def test_sweep_refuses_coarse_step():
    tab = SlopeTables(params_for_drive(1.0))
    with pytest.raises(PreconditionError):
        epsilon_sweep(DropState(0.0, -2.0, 0.0), 1.0, SINE, [0.1, 0.05], 1e-2, tab)
    with pytest.raises(PreconditionError):
        epsilon_sweep(DropState(0.0, -2.0, 0.0), 1.0, SINE, [0.05, 0.1], 1e-5, tab)


def test_sweep_with_constant_beta_is_eps_independent():
    tab = SlopeTables(params_for_drive(1.0))
    rep = epsilon_sweep(DropState(0.0, -2.0, 0.0), 1.0, BetaProfile.constant(1.0), [0.5, 0.25], 2e-3, tab)
    assert max(rep.errors) < 1e-12


def test_sweep_pinned_regime_stays_close():
    tab = SlopeTables(params_for_drive(0.5))
    beta = BetaProfile.sine(1.0, 0.4)
    h = 2e-4
    rep = epsilon_sweep(DropState(0.0, -2.0, 0.0), 3.0, beta, [0.1, 0.05], h, tab)
    hom = rep.trajectories[None]
    late = hom.t > 2.0
    assert np.ptp(hom.b[late]) < 1e-9
    assert rep.errors[1] < rep.errors[0] < 0.2
