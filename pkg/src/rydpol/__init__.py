"""Numerical model of a Rydberg-EIT photon-photon controlled-phase gate."""
from .blockade import BlockadeResult, blockade_radius, chi_at_distance, conditional_response
from .eit import Drive, MediumParams, propagate, susceptibility
from .errors import (ConfigError, GainForbidden, Infeasible, MissingSetting, NoCrossing, NonPhysical, NoRoot,
                     PhysicsError, RydpolError, ZeroCoincidences, ZeroPower)
from .optimizer import OperatingPoint, analytic_optimum, brute_force_optimum, zeta
from .visibility import solve_bulk_phase_for_pi, visibility_phasor

__version__ = "0.1.0"
