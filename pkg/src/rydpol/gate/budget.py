"""Efficiency bookkeeping, shot coincidence probability, and the excitation-hopping comparison."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .. import eit
from ..eit import MediumParams
from ..errors import ConfigError


@dataclass(frozen=True)
class EfficiencyBudget:
    """Per-polarization storage/transmission efficiencies and detection factors.

    ``path_transmission`` lumps the fixed optical losses between the medium
    and the detectors (second interferometer, fibres); ``target_window`` is
    the fraction of the target pulse kept in the analysis window.
    """

    eta_r: float = 1.0
    eta_l: float = 1.0
    t_r: float = 1.0
    t_l: float = 1.0
    detector_qe: float = 1.0
    n_c: float = 1.0
    n_t: float = 1.0
    shots: int = 1
    path_transmission: float = 1.0
    target_window: float = 1.0

    def __post_init__(self):
        for name in ("eta_r", "eta_l", "t_r", "t_l", "detector_qe", "path_transmission",
                     "target_window"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ConfigError(f"{name} = {v!r} outside [0, 1]")
        if not (self.n_c > 0 and self.n_t > 0):
            raise ConfigError("mean photon numbers must be > 0")
        if self.shots < 1:
            raise ConfigError("shots must be >= 1")

    @property
    def control_efficiency(self) -> float:
        """Detection probability of a control photon after balancing R and L."""
        return min(self.eta_r, self.eta_l) * self.detector_qe * self.path_transmission

    @property
    def target_efficiency(self) -> float:
        return min(self.t_r, self.t_l) * self.detector_qe * self.path_transmission * self.target_window


@dataclass(frozen=True)
class EfficiencyReport:
    table: dict[str, float]
    pair_min: float
    pair_max: float
    p_shot: float


def efficiency_matrix(budget: EfficiencyBudget) -> EfficiencyReport:
    """eta_i T_j for i, j in {R, L}, its range, and the per-shot coincidence probability.

    The single-qubit compensation attenuates the stronger arm of each qubit,
    so a balanced gate runs at min(eta) * min(T).  Each Poissonian pulse gives
    at least one click with probability 1 - exp(-n * efficiency).
    """
    table = {
        i + j: eta * t
        for i, eta in (("R", budget.eta_r), ("L", budget.eta_l))
        for j, t in (("R", budget.t_r), ("L", budget.t_l))
    }
    p_shot = (-math.expm1(-budget.n_c * budget.control_efficiency)) * (
        -math.expm1(-budget.n_t * budget.target_efficiency))
    return EfficiencyReport(table=table, pair_min=min(table.values()),
                            pair_max=max(table.values()), p_shot=p_shot)


def coincidences_per_minute(p_shot: float, shots_per_sample: int = 10_000,
                            sample_period_s: float = 18.0) -> float:
    return p_shot * shots_per_sample * 60.0 / sample_period_s


def target_r_channel(medium: MediumParams, delta_s: float, od_ratio: float = 6.0) -> dict[str, float]:
    """Transmission and phase of the R-polarized target, a two-level line with reduced resonant OD."""
    weak = medium.with_od_max(medium.od_max / od_ratio)
    prop = eit.propagate(weak, eit.two_level_susceptibility(weak, delta_s))
    return {"od": prop.od, "beta": prop.beta, "transmission": prop.transmission}


def thermal_decay_factor(t_d: float, tau: float) -> float:
    """Retrieval loss from doubling the dark time under exp(-(t/tau)^2) decay."""
    if t_d < 0 or tau <= 0:
        raise ConfigError("need t_d >= 0 and tau > 0")
    return math.exp(-((2 * t_d / tau) ** 2) + (t_d / tau) ** 2)


def hopping_comparison(t_d: float, tau: float, eta: float, t_single: float,
                       interaction_factor: float = 0.82, c6_over_chi6: float = 29.0) -> dict[str, float]:
    """Optimistic efficiency of a double-pass excitation-hopping phase gate."""
    decay = thermal_decay_factor(t_d, tau)
    return {
        "decay_factor": decay,
        "extrapolated_efficiency": interaction_factor * decay * t_single**2 * eta,
        "interaction_factor": interaction_factor,
        "c6_over_chi6": c6_over_chi6,
    }
