"""Operating point that reaches a conditional pi phase with zero conditional OD.

Two independent routes are provided: the closed-form Lagrange-multiplier
optimum, and a brute-force grid search that only uses the susceptibility,
root-found blockade radii and the constraint Delta_beta = pi (with the
Delta_OD = 0 constraint eliminated through the closed-form Delta_c,u).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import blockade, eit
from .eit import Drive, MediumParams
from .errors import ConfigError, Infeasible
from .roots import bisect_log_vec
from .units import HBAR


@dataclass(frozen=True)
class OperatingPoint:
    delta_s: float
    omega_c: float
    delta_cu: float
    zeta: float
    im_chi_b: float
    predicted_transmission: float

    @property
    def two_photon_detuning(self) -> float:
        return self.delta_cu + self.delta_s

    def drive(self) -> Drive:
        return Drive(omega_c=self.omega_c, delta_s=self.delta_s, delta_c=self.delta_cu)


@dataclass(frozen=True)
class GridSpec:
    """Brute-force search grid; spans are in units of Gamma_e and sampled logarithmically."""

    n_delta: int = 200
    n_omega: int = 200
    delta_span: tuple[float, float] = (0.5, 10.0)
    omega_span: tuple[float, float] = (0.01, 5.0)
    tolerance: float = 0.02


@dataclass(frozen=True)
class BoundReport:
    od_b: float
    max_delta_beta: float
    feasible: bool
    # the bound is attained only for gamma_rg = 0, |Delta_s| = Gamma_e/2 and
    # Delta_c,u + Delta_s = |Omega_c|^2 / (8 Delta_s)
    ceiling_lb_equals_l: float = math.exp(-math.pi)
    ceiling_lb_half_l: float = math.exp(-2 * math.pi)


def zeta(medium: MediumParams) -> float:
    """(2/7) |C6 / (hbar gamma_rg)|^(1/7) (3 chi0 k_s / pi)^(6/7); infinite for gamma_rg = 0."""
    if medium.gamma_rg == 0:
        return math.inf
    return (2 / 7) * abs(medium.c6 / (HBAR * medium.gamma_rg)) ** (1 / 7) * (
        3 * medium.chi0 * medium.k_s / math.pi) ** (6 / 7)


def zero_od_coupling_detuning(medium: MediumParams, delta_s, omega_c):
    """Delta_c,u for which Im chi_u = Im chi_b, i.e. Delta_OD = 0 in the step approximation."""
    g, gr = medium.gamma_e, medium.gamma_rg
    delta_s = np.asarray(delta_s, dtype=float)
    om2 = np.asarray(omega_c, dtype=float) ** 2
    out = -delta_s + (om2 * g + gr * (g**2 - 4 * delta_s**2)) / (8 * g * delta_s)
    return float(out) if out.ndim == 0 else out


def _sign_for(medium: MediumParams) -> float:
    return -math.copysign(1.0, medium.c6)


def _two_level_im(medium: MediumParams, delta_s):
    g = medium.gamma_e
    return medium.chi0 * g**2 / (4 * np.asarray(delta_s) ** 2 + g**2)


def analytic_optimum(medium: MediumParams) -> OperatingPoint:
    z = zeta(medium)
    if not z >= 1:
        raise Infeasible(f"zeta = {z:.4g} < 1: Delta_beta = pi and Delta_OD = 0 cannot both be met")
    if math.isinf(z):
        raise Infeasible("gamma_rg = 0: optimum runs off to infinite detuning")
    g = medium.gamma_e
    delta_s = 0.5 * g * (z + math.sqrt(z * z - 1)) * _sign_for(medium)
    om2 = 6 * medium.gamma_rg * (4 * delta_s**2 + g**2) / g
    omega_c = math.sqrt(om2)
    im_b = medium.chi0 * g / (4 * z * abs(delta_s))
    return OperatingPoint(
        delta_s=delta_s,
        omega_c=omega_c,
        delta_cu=zero_od_coupling_detuning(medium, delta_s, omega_c),
        zeta=z,
        im_chi_b=im_b,
        predicted_transmission=math.exp(-medium.k_s * medium.length * im_b),
    )


def grid_delta_beta(medium: MediumParams, delta_s, omega_c, iterations: int = 48):
    """Bulk conditional phase k_s r_b Re(chi_b - chi_u) on arrays of (Delta_s, Omega_c).

    Delta_c,u is fixed by the zero-OD constraint.  Returns (delta_beta, ok)
    where ``ok`` flags entries with a bracketed blockade radius.
    """
    ds = np.asarray(delta_s, dtype=float)
    om = np.asarray(omega_c, dtype=float)
    ds, om = np.broadcast_arrays(ds, om)
    dcu = zero_od_coupling_detuning(medium, ds, om)
    chi_b = eit.two_level_susceptibility(medium, ds)
    chi_u = eit.chi_ladder(medium.chi0, medium.gamma_e, medium.gamma_rg, om, ds, dcu)
    target = 0.5 * (chi_b + chi_u).real

    def h(r):
        shift = blockade.interaction_shift(medium, r)
        return eit.chi_ladder(medium.chi0, medium.gamma_e, medium.gamma_rg,
                              om, ds, dcu + shift).real - target

    r_b, ok = bisect_log_vec(h, np.full(ds.shape, blockade.R_MIN),
                             np.full(ds.shape, blockade.R_MAX), iterations=iterations)
    dbeta = medium.k_s * r_b * (chi_b - chi_u).real
    return dbeta, ok


def brute_force_optimum(medium: MediumParams, grid: GridSpec | None = None) -> OperatingPoint:
    """Smallest Im chi_b over Delta_s rows on which some Omega_c reaches Delta_beta = pi.

    Im chi_b depends on Delta_s only.  A row is feasible when the largest
    Delta_beta over its Omega_c values is at least pi - tolerance (Delta_beta
    falls off at both ends of the Omega_c axis, so by continuity some Omega_c
    then hits pi within tolerance).  Near the optimum Delta_beta(Omega_c) has
    a flat maximum, so picking an arbitrary Omega_c with Delta_beta ~ pi is
    ill-conditioned; the reported Omega_c is the row's maximizer, refined by
    a parabola through its log-spaced neighbours.  Rows with equal Im chi_b
    are broken by the smaller Delta_s.
    """
    grid = grid or GridSpec()
    g = medium.gamma_e
    sign = _sign_for(medium)
    ds_axis = sign * np.geomspace(grid.delta_span[0] * g, grid.delta_span[1] * g, grid.n_delta)
    om_axis = np.geomspace(grid.omega_span[0] * g, grid.omega_span[1] * g, grid.n_omega)
    ds, om = np.meshgrid(ds_axis, om_axis, indexing="ij")
    dbeta, ok = grid_delta_beta(medium, ds, om)
    dbeta = np.where(ok, dbeta, -np.inf)
    row_max = dbeta.max(axis=1)
    feasible = row_max >= math.pi - grid.tolerance
    if not feasible.any():
        raise Infeasible("no grid point satisfies Delta_beta = pi within tolerance")
    im_rows = _two_level_im(medium, ds_axis)
    rows = np.flatnonzero(feasible)
    i = int(rows[np.lexsort((ds_axis[rows], im_rows[rows]))[0]])
    j = int(np.argmax(dbeta[i]))
    omega_c = float(om_axis[j])
    if 0 < j < grid.n_omega - 1 and np.all(np.isfinite(dbeta[i, j - 1:j + 2])):
        y0, y1, y2 = dbeta[i, j - 1:j + 2]
        curv = y0 - 2 * y1 + y2
        if curv < 0:
            step = math.log(om_axis[j + 1] / om_axis[j])
            omega_c = float(om_axis[j] * math.exp(0.5 * (y0 - y2) / curv * step))
    delta_s = float(ds_axis[i])
    im = float(im_rows[i])
    return OperatingPoint(
        delta_s=delta_s,
        omega_c=omega_c,
        delta_cu=zero_od_coupling_detuning(medium, delta_s, omega_c),
        zeta=zeta(medium),
        im_chi_b=im,
        predicted_transmission=math.exp(-medium.k_s * medium.length * im),
    )


def fine_tune_density(medium: MediumParams, point: OperatingPoint,
                      target: float = math.pi) -> tuple[float, MediumParams]:
    """Scale the density (hence rho*L) so the bulk conditional phase equals ``target``.

    chi scales linearly with density while the blockade radius does not, so
    one multiplicative correction is exact.
    """
    res = blockade.conditional_response(medium, point.drive(), convention="bulk")
    factor = target / res.delta_beta
    return factor, medium.scaled_density(factor)


def necessary_condition_bound(od_b: float) -> BoundReport:
    if od_b < 0:
        raise ConfigError("od_b must be >= 0")
    return BoundReport(od_b=od_b, max_delta_beta=od_b / 2, feasible=od_b >= 2 * math.pi)


def bound_attaining_drive(medium: MediumParams, omega_c: float) -> Drive:
    """Drive that saturates |Delta_beta| <= OD_b / 2 (meaningful for gamma_rg = 0)."""
    delta_s = 0.5 * medium.gamma_e * _sign_for(medium)
    return Drive(omega_c=omega_c, delta_s=delta_s,
                 delta_c=-delta_s + omega_c**2 / (8 * delta_s))


def im_chi_b_expansion(medium: MediumParams) -> dict[str, float]:
    """Leading large-zeta form of Im chi_b at the optimum, in two algebraic forms, and the exact value."""
    z = zeta(medium)
    if not z > 1:
        raise Infeasible(f"zeta = {z:.4g} must exceed 1")
    leading = medium.chi0 / (4 * z * z)
    expanded = (49 / 16) * (math.pi / (3 * medium.k_s)) ** (12 / 7) * (
        HBAR * medium.gamma_rg / abs(medium.c6)) ** (2 / 7) * (1 / medium.chi0) ** (5 / 7)
    exact = analytic_optimum(medium).im_chi_b
    return {"leading": leading, "expanded": expanded, "exact": exact, "zeta": z}


def gamma_rg_sweep(medium: MediumParams, gammas) -> list[dict]:
    """Analytic optimum as a function of the dephasing rate; infeasible points are flagged."""
    rows = []
    for gr in np.asarray(gammas, dtype=float):
        m = replace(medium, gamma_rg=float(gr))
        try:
            p = analytic_optimum(m)
        except Infeasible:
            rows.append({"gamma_rg": float(gr), "zeta": zeta(m), "feasible": False})
            continue
        rows.append({"gamma_rg": float(gr), "zeta": p.zeta, "feasible": True,
                     "delta_s": p.delta_s, "omega_c": p.omega_c,
                     "im_chi_b": p.im_chi_b, "transmission": p.predicted_transmission})
    return rows
