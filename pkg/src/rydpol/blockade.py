"""Van der Waals blockade of the EIT resonance around a stored Rydberg excitation.

A stored excitation at distance r shifts the target coupling detuning to
Delta_c(r) = Delta_c,u + C6 / (hbar r^6).  The susceptibility interpolates
between the unblocked value chi_u (r -> inf) and the two-level value chi_b
(r -> 0); the blockade radii are where Re chi and Im chi reach the midpoint
of those two limits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import eit
from .eit import Drive, MediumParams
from .errors import ConfigError, NoCrossing
from .roots import bisect_log, expand_bracket
from .units import HBAR

R_MIN = 1e-9
R_MAX = 1e-3
# relative size below which Re/Im(chi_b - chi_u) counts as exactly zero
DEGENERATE_RTOL = 1e-9


@dataclass(frozen=True)
class BlockadeResult:
    r_b: float
    r_b_im: float | None
    chi_u: complex
    chi_b: complex
    z_s: float | None
    l_b: float
    l_b_im: float
    delta_od: float
    delta_beta: float
    od_b: float
    convention: str


def interaction_shift(medium: MediumParams, r):
    """-V(r)/hbar = C6 / (hbar r^6), in rad/s."""
    return medium.c6 / (HBAR * np.asarray(r, dtype=float) ** 6)


def chi_at_distance(medium: MediumParams, drive: Drive, r):
    """Susceptibility seen by the target at distance ``r`` (m) from the stored excitation."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ConfigError("distance must be > 0")
    out = eit.chi_ladder(medium.chi0, medium.gamma_e, medium.gamma_rg, drive.omega_c,
                         drive.delta_s, drive.delta_c + interaction_shift(medium, r))
    return complex(out) if np.ndim(out) == 0 else out


def blocked_susceptibility(medium: MediumParams, drive: Drive) -> complex:
    return eit.two_level_susceptibility(medium, drive.delta_s)


def analytic_radius(medium: MediumParams, drive: Drive) -> float:
    """|4 C6 Delta_s / (hbar Omega_c^2)|^(1/6): exact only for gamma_rg = 0, |Delta_s| >> Gamma_e
    on two-photon resonance, but a good starting point in general."""
    if drive.omega_c == 0 or drive.delta_s == 0:
        return math.sqrt(R_MIN * R_MAX)
    return abs(4 * medium.c6 * drive.delta_s / (HBAR * drive.omega_c**2)) ** (1 / 6)


def _midpoint_radius(medium, drive, part, chi_u, chi_b, rtol):
    lim_b, lim_u = part(chi_b), part(chi_u)
    target = 0.5 * (lim_b + lim_u)

    def h(r):
        return part(chi_at_distance(medium, drive, r)) - target

    lo, hi = expand_bracket(h, analytic_radius(medium, drive), R_MIN, R_MAX,
                            np.sign(lim_b - lim_u), np.sign(lim_u - lim_b))
    return bisect_log(h, lo, hi, rtol=rtol)


def _degenerate(diff: float, medium: MediumParams) -> bool:
    return abs(diff) <= DEGENERATE_RTOL * medium.chi0


def blockade_radius(medium: MediumParams, drive: Drive, rtol: float = 1e-4):
    """Return (r_b, r_b_im).

    ``r_b_im`` is None when Im chi_b equals Im chi_u: then the imaginary part
    has no midpoint crossing and the conditional optical depth vanishes
    identically in the step approximation.
    """
    chi_u = eit.susceptibility(medium, drive)
    chi_b = blocked_susceptibility(medium, drive)
    if _degenerate(chi_b.real - chi_u.real, medium):
        raise NoCrossing("Re chi_b == Re chi_u: no real-part blockade radius")
    r_b = _midpoint_radius(medium, drive, lambda c: np.real(c), chi_u, chi_b, rtol)
    if _degenerate(chi_b.imag - chi_u.imag, medium):
        return r_b, None
    r_b_im = _midpoint_radius(medium, drive, lambda c: np.imag(c), chi_u, chi_b, rtol)
    return r_b, r_b_im


def blocked_length(radius: float, length: float, z_s: float) -> float:
    """min(r, z_s) + min(r, L - z_s)."""
    return min(radius, z_s) + min(radius, length - z_s)


def conditional_response(medium: MediumParams, drive: Drive, z_s: float | None = None,
                         convention: str = "position", rtol: float = 1e-4) -> BlockadeResult:
    """Conditional OD and phase in the step-function approximation.

    ``convention="position"`` uses the blocked length for storage position
    ``z_s`` (default L/2); ``convention="bulk"`` sets L_b = 2 r_b regardless
    of the medium length.
    """
    L = medium.length
    if convention == "position":
        z_s = L / 2 if z_s is None else z_s
        if not 0 <= z_s <= L:
            raise ConfigError(f"storage position {z_s} outside [0, {L}]")
    elif convention == "bulk":
        z_s = None
    else:
        raise ConfigError(f"unknown convention {convention!r}")

    chi_u = eit.susceptibility(medium, drive)
    chi_b = blocked_susceptibility(medium, drive)
    r_b, r_b_im = blockade_radius(medium, drive, rtol=rtol)
    if convention == "bulk":
        l_b = 2 * r_b
        l_b_im = 0.0 if r_b_im is None else 2 * r_b_im
    else:
        l_b = blocked_length(r_b, L, z_s)
        l_b_im = 0.0 if r_b_im is None else blocked_length(r_b_im, L, z_s)
    diff = chi_b - chi_u
    delta_od = 0.0 if r_b_im is None else medium.k_s * l_b_im * diff.imag
    delta_beta = medium.k_s * l_b * diff.real / 2
    return BlockadeResult(
        r_b=r_b, r_b_im=r_b_im, chi_u=chi_u, chi_b=chi_b, z_s=z_s,
        l_b=l_b, l_b_im=l_b_im, delta_od=delta_od, delta_beta=delta_beta,
        od_b=medium.k_s * l_b * medium.chi0, convention=convention,
    )


def _integrated_difference(medium: MediumParams, drive: Drive, z_s: float | None) -> complex:
    """Integral over the medium of chi(|z - z_s|) - chi_u (m), by adaptive quadrature."""
    L = medium.length
    z_s = L / 2 if z_s is None else z_s
    chi_u = eit.susceptibility(medium, drive)
    chi_b = blocked_susceptibility(medium, drive)

    def diff(z):
        r = abs(z - z_s)
        return (chi_b if r == 0 else chi_at_distance(medium, drive, r)) - chi_u

    total = 0j
    for a, b in ((0.0, z_s), (z_s, L)):
        if b > a:
            re, _ = quad(lambda z: diff(z).real, a, b, limit=200, epsabs=0, epsrel=1e-9)
            im, _ = quad(lambda z: diff(z).imag, a, b, limit=200, epsabs=0, epsrel=1e-9)
            total += complex(re, im)
    return total


def exact_delta_beta(medium: MediumParams, drive: Drive, z_s: float | None = None) -> float:
    """Conditional phase without the step approximation (default z_s = L/2)."""
    return medium.k_s * _integrated_difference(medium, drive, z_s).real / 2


def exact_delta_od(medium: MediumParams, drive: Drive, z_s: float | None = None) -> float:
    return medium.k_s * _integrated_difference(medium, drive, z_s).imag


def storage_sweep(medium: MediumParams, drive: Drive, z_grid) -> list[dict]:
    """Blocked length, conditional OD and phase for each storage position in ``z_grid`` (m)."""
    chi_u = eit.susceptibility(medium, drive)
    chi_b = blocked_susceptibility(medium, drive)
    r_b, r_b_im = blockade_radius(medium, drive)
    diff = chi_b - chi_u
    rows = []
    for z in np.asarray(z_grid, dtype=float):
        if not 0 <= z <= medium.length:
            raise ConfigError(f"storage position {z} outside the medium")
        l_b = blocked_length(r_b, medium.length, z)
        l_bi = 0.0 if r_b_im is None else blocked_length(r_b_im, medium.length, z)
        rows.append({
            "z_s": float(z),
            "l_b": l_b,
            "delta_od": medium.k_s * l_bi * diff.imag + 0.0,
            "delta_beta": medium.k_s * l_b * diff.real / 2,
        })
    return rows


def mean_phase_factor(medium: MediumParams, drive: Drive, samples: int = 4001) -> complex:
    """Average of exp(i delta_beta(z_s)) over uniformly distributed storage positions."""
    rows = storage_sweep(medium, drive, np.linspace(0.0, medium.length, samples))
    phases = np.array([row["delta_beta"] for row in rows])
    return complex(np.trapezoid(np.exp(1j * phases), dx=1.0 / (samples - 1)))


def crossing_points(medium: MediumParams, drive_template: Drive, window, points: int = 4001):
    """All signal detunings in ``window`` where Im chi_u and Im chi_b coincide.

    The coupling detuning of ``drive_template`` stays fixed while Delta_s is
    scanned, which mirrors taking transmission spectra with and without the
    coupling light.
    """
    if drive_template.omega_c == 0:
        raise NoCrossing("without coupling light the two spectra are identical")
    def diff(ds):
        chi_u = eit.chi_ladder(1.0, medium.gamma_e, medium.gamma_rg, drive_template.omega_c,
                               ds, drive_template.delta_c)
        chi_b = 1j * medium.gamma_e / (medium.gamma_e - 2j * np.asarray(ds))
        return np.imag(chi_u - chi_b)

    grid = np.linspace(window[0], window[1], points)
    values = diff(grid)
    roots = []
    for k in np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]:
        roots.append(float(brentq(diff, grid[k], grid[k + 1], xtol=1e-12 * medium.gamma_e)))
    roots.extend(float(x) for x in grid[values == 0])
    return sorted(roots)


def crossing_two_photon_detuning(medium: MediumParams, drive_template: Drive,
                                 window: tuple[float, float] | None = None) -> float:
    """Signal detuning where Delta OD = 0 in the step approximation.

    Of all crossings inside ``window`` the one closest to two-photon resonance
    (Delta_s = -Delta_c) is returned; that is the crossing flanking the EIT
    peak.
    """
    if window is None:
        span = 10 * medium.gamma_e + abs(drive_template.delta_c) + drive_template.omega_c
        window = (-span, span)
    roots = crossing_points(medium, drive_template, window)
    if not roots:
        raise NoCrossing("EIT and two-level transmission curves do not cross in the window")
    return min(roots, key=lambda x: abs(x + drive_template.delta_c))
