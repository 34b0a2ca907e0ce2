"""Single-photon Stokes parameters, visibility and azimuth."""
from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from ..errors import ZeroPower
from .states import KETS

_PAIRS = (("H", "V"), ("D", "A"), ("R", "L"))


@dataclass(frozen=True)
class StokesVector:
    s_h: float
    s_d: float
    s_r: float
    azimuth_defined: bool = True

    @property
    def visibility(self) -> float:
        return math.hypot(self.s_h, self.s_d)

    @property
    def azimuth(self) -> float:
        """phi in (-pi, pi] with S_H = V cos(phi), S_D = V sin(phi); 0 when V = 0."""
        if not self.azimuth_defined:
            return 0.0
        phi = math.atan2(self.s_d, self.s_h)
        return math.pi if phi == -math.pi else phi

    def flipped(self) -> "StokesVector":
        """Stokes vector after an extra relative phase of pi between R and L."""
        return StokesVector(-self.s_h, -self.s_d, self.s_r, self.azimuth_defined)


def _from_pairs(values: dict[str, float], atol: float) -> StokesVector:
    s = []
    for a, b in _PAIRS:
        total = values[a] + values[b]
        if total <= 0:
            raise ZeroPower(f"no power in the {a}/{b} analysis")
        s.append((values[a] - values[b]) / total)
    defined = math.hypot(s[0], s[1]) > atol
    return StokesVector(*s, azimuth_defined=defined)


def stokes(state, atol: float = 1e-12) -> StokesVector:
    """Stokes vector from measured powers, a 2x2 density matrix, or a 2-vector (R/L basis).

    ``state`` may be a mapping with keys H, V, D, A, R, L.
    """
    if isinstance(state, Mapping):
        return _from_pairs({k: float(state[k]) for k in "HVDARL"}, atol)
    arr = np.asarray(state, dtype=complex)
    rho = np.outer(arr, arr.conj()) if arr.ndim == 1 else arr
    powers = {k: float(np.real(v.conj() @ rho @ v)) for k, v in KETS.items()}
    return _from_pairs(powers, atol)
