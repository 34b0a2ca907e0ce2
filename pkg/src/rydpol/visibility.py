"""Target-photon visibility limit caused by the random storage position.

With a uniform spatial distribution of the stored excitation, the averaged
phase factor V_t exp(i beta_4) has a closed form in two variables: the ratio
L / r_b and the bulk conditional phase Delta_beta_b = k_s r_b Re(chi_b - chi_u).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigError, NoRoot

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class VisibilityPoint:
    l_over_rb: float
    delta_beta_b: float
    v_t: float
    beta_4: float
    alternates: tuple[float, ...] = field(default=())


def _ratio_term(x: float) -> complex:
    """(1 - exp(-i x/2)) / x, continued to i/2 at x = 0."""
    if abs(x) < 1e-5:
        return 0.5j + x / 8 - 1j * x * x / 48
    return complex(-np.expm1(-0.5j * x) / x)


def _long_medium(l: float, db: float) -> complex:
    a = 1.0 / l
    return np.exp(1j * db) * (1 - 2 * a - 4j * a * _ratio_term(db))


def _intermediate(l: float, db: float) -> complex:
    a = 1.0 / l
    # (1 - exp(i db (1 - l)/2)) / db, written through the same helper
    tail = (l - 1) * _ratio_term(db * (l - 1)) if l != 1 else 0.0
    return np.exp(0.5j * db * l) * (-1 + 2 * a - 4j * a * tail)


def _short_medium(l: float, db: float) -> complex:
    return np.exp(0.5j * db * l)


def phasor(l_over_rb: float, delta_beta_b: float) -> complex:
    """V_t exp(i beta_4) for a uniformly distributed storage position."""
    l = float(l_over_rb)
    if not l > 0:
        raise ConfigError("l_over_rb must be > 0")
    if l > 2:
        return complex(_long_medium(l, delta_beta_b))
    if l > 1:
        return complex(_intermediate(l, delta_beta_b))
    return complex(_short_medium(l, delta_beta_b))


def visibility_phasor(l_over_rb: float, delta_beta_b: float) -> tuple[float, float]:
    """(V_t, beta_4) with beta_4 in (-pi, pi]."""
    p = phasor(l_over_rb, delta_beta_b)
    beta_4 = math.atan2(p.imag, p.real)
    if beta_4 == -math.pi:
        beta_4 = math.pi
    return abs(p), beta_4


def phasor_by_quadrature(l_over_rb: float, delta_beta_b: float, profile=None,
                         points: int = 20001) -> complex:
    """Average exp(i Delta_beta(z_s)) directly, weighting by an optional sampled |u(z)|^2.

    ``profile`` holds |u|^2 on an even grid over the medium; it is normalized here.
    Positions are measured in units of r_b.
    """
    l = float(l_over_rb)
    z = np.linspace(0.0, l, points if profile is None else len(profile))
    weight = np.ones_like(z) if profile is None else np.asarray(profile, dtype=float)
    if np.any(weight < 0):
        raise ConfigError("|u(z)|^2 must be non-negative")
    l_b = np.minimum(1.0, z) + np.minimum(1.0, l - z)
    norm = np.trapezoid(weight, z)
    return complex(np.trapezoid(weight * np.exp(0.5j * delta_beta_b * l_b), z) / norm)


def phasor_by_sampling(l_over_rb: float, delta_beta_b: float, samples: int,
                       rng: np.random.Generator) -> complex:
    """Monte Carlo mean of exp(i Delta_beta(z_s)) with z_s uniform in the medium.

    One position is drawn in each of ``samples`` equal strata (jittered
    sampling): still unbiased, with far less variance than plain draws.
    """
    l = float(l_over_rb)
    z = (np.arange(samples) + rng.uniform(0.0, 1.0, samples)) * (l / samples)
    l_b = np.minimum(1.0, z) + np.minimum(1.0, l - z)
    return complex(np.mean(np.exp(0.5j * delta_beta_b * l_b)))


def _unwrapped_phase(l, grid):
    return np.unwrap([math.atan2(p.imag, p.real) for p in (phasor(l, d) for d in grid)])


def solve_bulk_phase_for_pi(l_over_rb: float, max_phase: float = 4 * math.pi,
                            scan_points: int = 4001) -> VisibilityPoint:
    """Smallest Delta_beta_b in (0, max_phase] whose averaged phase beta_4 reaches pi.

    The phase is unwrapped along increasing Delta_beta_b; later crossings are
    kept in ``alternates``.
    """
    l = float(l_over_rb)
    if not l > 0:
        raise ConfigError("l_over_rb must be > 0")
    grid = np.linspace(0.0, max_phase, scan_points)
    phase = _unwrapped_phase(l, grid) - math.pi

    def g(d):
        p = phasor(l, d) * np.exp(-1j * math.pi)
        return math.atan2(p.imag, p.real)

    roots = []
    for k in range(1, len(grid)):
        a, b = phase[k - 1], phase[k]
        if b == 0:
            roots.append(float(grid[k]))
        elif a * b < 0:
            roots.append(float(brentq(g, grid[k - 1], grid[k], xtol=1e-13)))
    if not roots:
        raise NoRoot(f"beta_4 never reaches pi for L/r_b = {l:g} with Delta_beta_b <= {max_phase:g}")
    db = roots[0]
    v_t, beta_4 = visibility_phasor(l, db)
    return VisibilityPoint(l_over_rb=l, delta_beta_b=db, v_t=v_t, beta_4=beta_4,
                           alternates=tuple(roots[1:]))


def visibility_curve(l_grid) -> tuple[list[VisibilityPoint], list[dict]]:
    """Solve for beta_4 = pi along ``l_grid``; points without a root go to the warning list."""
    points, warnings = [], []
    for l in l_grid:
        try:
            points.append(solve_bulk_phase_for_pi(float(l)))
        except NoRoot as exc:
            log.warning("skipping L/r_b = %g: %s", l, exc)
            warnings.append({"l_over_rb": float(l), "reason": str(exc)})
    return points, warnings
