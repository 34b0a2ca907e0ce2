"""Linear susceptibility of a ladder-type Rydberg EIT medium and its propagation map.

The susceptibility is

    chi = i chi0 Gamma_e / (Gamma_e - 2i Delta_s + |Omega_c|^2 / (gamma_rg - 2i (Delta_c + Delta_s)))

with chi0 = 2 rho d_ge^2 / (eps0 hbar Gamma_e).  A homogeneous 1D medium of
length L multiplies the field amplitude by exp(-OD/2 + i beta) with
OD = k_s L Im chi and beta = k_s L Re chi / 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import ConfigError, NoRoot
from .units import EPSILON_0, HBAR


@dataclass(frozen=True)
class MediumParams:
    """Atomic and geometric constants of the medium (SI units, rates in rad/s).

    ``chi0_override`` replaces the value derived from ``rho`` and ``d_ge``;
    fitting workflows parameterize the medium through OD_max instead.
    """

    gamma_e: float
    gamma_rg: float
    rho: float
    d_ge: float
    k_s: float
    length: float
    c6: float
    chi0_override: float | None = None

    def __post_init__(self):
        for name in ("gamma_e", "rho", "d_ge", "k_s", "length"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be finite and > 0, got {value!r}")
        # gamma_rg = 0 is the ideal-dark-state limit and stays allowed
        if not (math.isfinite(self.gamma_rg) and self.gamma_rg >= 0):
            raise ConfigError(f"gamma_rg must be finite and >= 0, got {self.gamma_rg!r}")
        if not math.isfinite(self.c6) or self.c6 == 0:
            raise ConfigError("c6 must be finite and nonzero")
        if self.chi0_override is not None and not self.chi0_override > 0:
            raise ConfigError("chi0_override must be > 0")

    @property
    def chi0(self) -> float:
        return chi0(self)

    @property
    def od_max(self) -> float:
        return self.k_s * self.length * self.chi0

    def with_od_max(self, od_max: float) -> "MediumParams":
        """Copy whose chi0 is fixed so that k_s L chi0 equals ``od_max``."""
        return replace(self, chi0_override=od_max / (self.k_s * self.length))

    def scaled_density(self, factor: float) -> "MediumParams":
        """Copy with the atomic density (and any chi0 override) multiplied by ``factor``."""
        override = None if self.chi0_override is None else self.chi0_override * factor
        return replace(self, rho=self.rho * factor, chi0_override=override)


@dataclass(frozen=True)
class Drive:
    """One EIT operating point: coupling Rabi frequency and the two detunings (rad/s)."""

    omega_c: float
    delta_s: float
    delta_c: float

    def __post_init__(self):
        if not self.omega_c >= 0:
            raise ConfigError(f"omega_c must be >= 0, got {self.omega_c!r}")

    @property
    def two_photon_detuning(self) -> float:
        return self.delta_c + self.delta_s


class Propagation(NamedTuple):
    od: float
    beta: float
    transmission: float


def chi0(medium: MediumParams) -> float:
    """Peak resonant susceptibility 2 rho d_ge^2 / (eps0 hbar Gamma_e)."""
    if medium.chi0_override is not None:
        return medium.chi0_override
    return 2.0 * medium.rho * medium.d_ge**2 / (EPSILON_0 * HBAR * medium.gamma_e)


def chi_ladder(chi_0, gamma_e, gamma_rg, omega_c, delta_s, delta_c):
    """Array version of the ladder susceptibility; broadcasts over every argument.

    Multiplied through by the EIT denominator d = gamma_rg - 2i(delta_c + delta_s)
    so that d -> 0 (the dark-state limit) gives chi = 0 without dividing by zero.
    """
    delta_s = np.asarray(delta_s, dtype=float)
    delta_c = np.asarray(delta_c, dtype=float)
    om2 = np.abs(np.asarray(omega_c, dtype=float)) ** 2
    eit_den = gamma_rg - 2j * (delta_c + delta_s)
    two_level = gamma_e - 2j * delta_s
    # om2 = 0 is the bare two-level line, also when d = 0
    num = np.where(om2 > 0, eit_den, 1.0)
    den = np.where(om2 > 0, two_level * eit_den + om2, two_level)
    out = 1j * chi_0 * gamma_e * num / den
    return out[()] if out.ndim == 0 else out


def susceptibility(medium: MediumParams, drive: Drive) -> complex:
    return complex(chi_ladder(medium.chi0, medium.gamma_e, medium.gamma_rg,
                              drive.omega_c, drive.delta_s, drive.delta_c))


def two_level_susceptibility(medium: MediumParams, delta_s):
    """Response with the coupling light switched off (the fully blocked value)."""
    delta_s = np.asarray(delta_s, dtype=float)
    out = 1j * medium.chi0 * medium.gamma_e / (medium.gamma_e - 2j * delta_s)
    return complex(out) if out.ndim == 0 else out


def propagate(medium: MediumParams, chi) -> Propagation:
    """Optical depth, phase shift and intensity transmission for a susceptibility.

    Works elementwise when ``chi`` is an array.
    """
    kl = medium.k_s * medium.length
    chi = np.asarray(chi)
    od = kl * chi.imag
    beta = kl * chi.real / 2.0
    trans = np.exp(-od)
    if chi.ndim == 0:
        return Propagation(float(od), float(beta), float(trans))
    return Propagation(od, beta, trans)


def spectrum(medium: MediumParams, drive: Drive, delta_s_grid) -> dict[str, np.ndarray]:
    """Evaluate chi and its propagation over a grid of signal detunings (rad/s).

    The coupling detuning of ``drive`` is held fixed.
    """
    grid = np.asarray(delta_s_grid, dtype=float)
    chi = chi_ladder(medium.chi0, medium.gamma_e, medium.gamma_rg,
                     drive.omega_c, grid, drive.delta_c)
    prop = propagate(medium, chi)
    return {
        "delta_s": grid,
        "chi": chi,
        "od": prop.od,
        "beta": prop.beta,
        "transmission": prop.transmission,
    }


def eit_peak_detuning(medium: MediumParams, drive: Drive, half_width: float | None = None) -> float:
    """Signal detuning of the local transmission maximum nearest two-photon resonance."""
    def im_chi(x):
        return chi_ladder(1.0, medium.gamma_e, medium.gamma_rg,
                          drive.omega_c, x, drive.delta_c).imag

    centre = -drive.delta_c
    hw = half_width if half_width is not None else medium.gamma_e
    grid = np.linspace(centre - hw, centre + hw, 2001)
    k = int(np.argmin(im_chi(grid)))
    step = grid[1] - grid[0]
    res = minimize_scalar(im_chi, bounds=(grid[k] - step, grid[k] + step), method="bounded",
                          options={"xatol": 1e-9 * medium.gamma_e})
    return float(res.x)


def coupling_detuning_for_peak(medium: MediumParams, omega_c: float, peak_delta_s: float) -> float:
    """Coupling detuning that puts the EIT transmission maximum at ``peak_delta_s``.

    Useful when a measured spectrum is characterized by the position of its
    EIT peak rather than by the coupling laser frequency.
    """
    def offset(delta_c):
        return eit_peak_detuning(medium, Drive(omega_c, 0.0, delta_c)) - peak_delta_s

    g = medium.gamma_e
    lo, hi = -peak_delta_s - 2 * g, -peak_delta_s + 2 * g
    try:
        return float(brentq(offset, lo, hi, xtol=1e-9 * g))
    except ValueError as exc:
        raise NoRoot("EIT peak cannot be placed at the requested detuning") from exc
