"""Quasi-static two-dimensional drops sliding down heterogeneous inclined planes."""

__version__ = "0.1.0"

from .beta import BetaProfile
from .dynamics import DropState, Trajectory, check_comparison, simulate, sliding_onset, step
from .equilibrium import (UNBOUNDED, EquilibriumProfile, PhysicalParams, critical_length, energy,
                          positivity_check, solve_bvp, solve_obstacle)
from .errors import (ConfigError, DropCollapseError, NumericalError, PreconditionError,
                     SlidingDropError)
from .homog import EffectiveLaw, effective_velocity, epsilon_sweep, sqrt_degeneracy_check
from .tables import SlopeTables
from .waves import (PulsatingWave, StickingBarrier, TravelingWave, homogenized_tw_speed,
                    pulsating_wave, sticking_barrier, traveling_wave)

__all__ = [
    "BetaProfile", "DropState", "Trajectory", "check_comparison", "simulate", "sliding_onset", "step",
    "UNBOUNDED", "EquilibriumProfile", "PhysicalParams", "critical_length", "energy",
    "positivity_check", "solve_bvp", "solve_obstacle",
    "ConfigError", "DropCollapseError", "NumericalError", "PreconditionError", "SlidingDropError",
    "EffectiveLaw", "effective_velocity", "epsilon_sweep", "sqrt_degeneracy_check",
    "SlopeTables",
    "PulsatingWave", "StickingBarrier", "TravelingWave", "homogenized_tw_speed", "pulsating_wave",
    "sticking_barrier", "traveling_wave",
]
