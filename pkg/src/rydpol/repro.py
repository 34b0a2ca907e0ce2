"""Reproduction targets: reference numbers recomputed from the bundled configuration.

Every target returns a list of ``Check`` rows; ``run`` evaluates one target or
all of them.  Targets only read the bundled ``paper.toml``.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from . import blockade, eit, optimizer, tomography, units, visibility
from .config import RunConfig, reference_config
from .eit import Drive, MediumParams
from .gate import budget as gbudget
from .gate import fidelity
from .gate.states import ideal_output
from .units import HBAR


@dataclass(frozen=True)
class Check:
    criterion: int
    name: str
    value: float
    target: str
    passed: bool
    seconds: float = 0.0

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{self.criterion:2d}] {verdict} {self.name}: {self.value:.6g} (want {self.target})"


def _within(value, centre, tol) -> bool:
    return abs(value - centre) <= tol


def _rel(value, centre, rel) -> bool:
    return abs(value - centre) <= rel * abs(centre)


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def _cfg(cfg: RunConfig | None) -> RunConfig:
    return cfg or reference_config()


def check_od_max(cfg=None):
    od, dt = _timed(lambda: _cfg(cfg).medium().od_max)
    return [Check(1, "OD_max", od, "35 +- 1", _within(od, 35, 1), dt)]


def check_zeta(cfg=None):
    z, dt = _timed(lambda: optimizer.zeta(_cfg(cfg).medium()))
    return [Check(2, "zeta", z, "2.6 +- 0.1", _within(z, 2.6, 0.1), dt)]


def check_optimum(cfg=None):
    medium = _cfg(cfg).medium()
    p, dt = _timed(lambda: optimizer.analytic_optimum(medium))
    ds = units.rad_to_mhz(p.delta_s)
    om = units.rad_to_mhz(p.omega_c)
    tp = units.rad_to_mhz(p.two_photon_detuning)
    return [
        Check(3, "Delta_s/2pi [MHz]", ds, "-15 +- 5%", _rel(ds, -15, 0.05), dt),
        Check(3, "Omega_c/2pi [MHz]", om, "13 +- 5%", _rel(om, 13, 0.05), dt),
        Check(3, "(Delta_cu + Delta_s)/2pi [MHz]", tp, "-1.3 +- 5%", _rel(tp, -1.3, 0.05), dt),
    ]


def check_im_chi_b(cfg=None):
    medium = _cfg(cfg).medium()
    p, dt = _timed(lambda: optimizer.analytic_optimum(medium))
    return [
        Check(4, "Im chi_b", p.im_chi_b, "2.6e-3 +- 5%", _rel(p.im_chi_b, 2.6e-3, 0.05), dt),
        Check(4, "L transmission", p.predicted_transmission, "0.26 +- 0.02",
              _within(p.predicted_transmission, 0.26, 0.02), dt),
    ]


def check_blockade(cfg=None):
    medium = _cfg(cfg).medium()
    drive = optimizer.analytic_optimum(medium).drive()
    res, dt = _timed(lambda: blockade.conditional_response(medium, drive, convention="bulk"))
    r_um = units.m_to_um(res.r_b)
    return [
        Check(5, "r_b [um]", r_um, "16 +- 1", _within(r_um, 16, 1), dt),
        Check(5, "OD_b (L_b = 2 r_b)", res.od_b, "19 +- 1", _within(res.od_b, 19, 1), dt),
    ]


def random_feasible_medium(base: MediumParams, rng: np.random.Generator,
                           zeta_range=(1.2, 5.0)) -> MediumParams:
    """Random medium with zeta drawn uniformly in ``zeta_range``.

    gamma_rg is drawn log-uniformly, capped so the optimal Omega_c stays
    within four linewidths; C6 is then solved for the drawn zeta.
    """
    z = rng.uniform(*zeta_range)
    x = 0.5 * (z + math.sqrt(z * z - 1))
    g_hi = min(0.05, 16.0 / (6.0 * (4 * x * x + 1)))
    g_ratio = math.exp(rng.uniform(math.log(0.005), math.log(g_hi)))
    gamma_rg = g_ratio * base.gamma_e
    a = 3 * base.chi0 * base.k_s / math.pi
    c6 = HBAR * gamma_rg * (3.5 * z / a ** (6 / 7)) ** 7
    return replace(base, gamma_rg=gamma_rg, c6=math.copysign(c6, base.c6))


def oracle_mismatch(medium: MediumParams) -> float:
    an = optimizer.analytic_optimum(medium)
    bf = optimizer.brute_force_optimum(medium)
    return max(abs(bf.delta_s / an.delta_s - 1), abs(bf.omega_c / an.omega_c - 1))


def check_oracle(cfg=None, draws: int = 20, seed: int = 6):
    base = _cfg(cfg).medium()
    rng = np.random.default_rng(seed)

    def run():
        media = [base] + [random_feasible_medium(base, rng) for _ in range(draws)]
        return [oracle_mismatch(m) for m in media]

    worst, dt = _timed(run)
    return [
        Check(6, "analytic vs brute force, reference medium", worst[0], "<= 3%", worst[0] <= 0.03, dt),
        Check(6, f"analytic vs brute force, worst of {draws} random media", max(worst[1:]),
              "<= 3%", max(worst[1:]) <= 0.03, dt),
        Check(6, "oracle runtime [s]", dt, "< 30", dt < 30, dt),
    ]


def check_blockade_limit(cfg=None):
    medium = replace(_cfg(cfg).medium(), gamma_rg=0.0)
    ds = -20 * medium.gamma_e * math.copysign(1, medium.c6)
    drive = Drive(omega_c=medium.gamma_e, delta_s=ds, delta_c=-ds)
    (r_b, r_b_im), dt = _timed(lambda: blockade.blockade_radius(medium, drive))
    ratio = r_b / r_b_im
    want = (1 + math.sqrt(2)) ** (1 / 6)
    return [Check(7, "r_b / r_b_im", ratio, f"{want:.5f} +- 2%", _rel(ratio, want, 0.02), dt)]


def check_visibility(cfg=None, seed: int = 8):
    pt, dt = _timed(lambda: visibility.solve_bulk_phase_for_pi(4.0))
    rng = np.random.default_rng(seed)
    jumps = []
    for edge in (1.0, 2.0):
        for db in rng.uniform(0.1, 4 * math.pi, 50):
            below = visibility.phasor(edge * (1 - 1e-12), db)
            above = visibility.phasor(edge * (1 + 1e-12), db)
            jumps.append(abs(below - above))
    mc_err = 0.0
    for l in (0.5, 1.5, 3.0, 6.0):
        exact = visibility.phasor(l, math.pi)
        mc = visibility.phasor_by_sampling(l, math.pi, 10**6, rng)
        mc_err = max(mc_err, abs(exact - mc))
    return [
        Check(8, "V_t at L/r_b = 4", pt.v_t, "0.85 +- 0.02", _within(pt.v_t, 0.85, 0.02), dt),
        Check(8, "branch jump at L = r_b, 2 r_b", max(jumps), "<= 1e-9", max(jumps) <= 1e-9),
        Check(8, "closed form vs sampled storage position", mc_err, "<= 1e-3", mc_err <= 1e-3),
    ]


def check_fidelity(cfg=None, seed: int = 9):
    noise = _cfg(cfg).section("noise")
    v_c, v_t = noise.get("v_c", 0.66), noise.get("v_t", 0.75)
    rng = np.random.default_rng(seed)
    b = rng.uniform(-2 * math.pi, 2 * math.pi, (1000, 3))
    gap = float(np.max(np.abs(fidelity.fidelity_f_beta(*b.T) - fidelity.overlap_fidelity(*b.T))))
    bound = fidelity.entangling_fidelity_bound(v_c, v_t)
    v = (0.8, 0.9, 0.7)
    mc, dt = _timed(lambda: fidelity.monte_carlo_entangling_fidelity(*v, samples=10**6, seed=seed))
    mc_gap = abs(mc - fidelity.entangling_fidelity(*v))
    ideal = fidelity.fidelity_f_beta(0.0, math.pi, math.pi)
    return [
        Check(9, "F_beta(0, pi, pi)", ideal, "== 1", ideal == 1.0),
        Check(9, "F_beta vs state vectors", gap, "<= 1e-12", gap <= 1e-12),
        Check(9, "F_e bound", bound, "0.76 +- 0.01", _within(bound, 0.76, 0.01)),
        Check(9, "Monte Carlo F_e gap", mc_gap, "<= 1e-3", mc_gap <= 1e-3, dt),
        Check(9, "Monte Carlo runtime [s]", dt, "< 10", dt < 10, dt),
    ]


def check_memory(cfg=None):
    n = _cfg(cfg).section("noise")
    f = fidelity.memory_fidelity(n.get("v_c", 0.66), n.get("eps_r", 0.048), n.get("eps_l", 0.025))
    return [Check(10, "F_m", f, "0.875 +- 0.002", _within(f, 0.875, 0.002))]


def check_hopping(cfg=None):
    h = _cfg(cfg).section("hopping")
    rep = gbudget.hopping_comparison(h.get("t_d_us", 1.4) * 1e-6, h.get("tau_us", 4.5) * 1e-6,
                                     h.get("eta", 0.049), h.get("t_single", 0.43),
                                     h.get("interaction_factor", 0.82), h.get("c6_over_chi6", 29.0))
    return [
        Check(11, "decay factor", rep["decay_factor"], "0.75 +- 0.01", _within(rep["decay_factor"], 0.75, 0.01)),
        Check(11, "extrapolated efficiency", rep["extrapolated_efficiency"], "0.0056 +- 0.0003",
              _within(rep["extrapolated_efficiency"], 0.0056, 0.0003)),
    ]


def random_density_matrix(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def error_scaling_slope(rho: np.ndarray, sizes=(100, 1000, 10000), trials: int = 1000,
                        seed: int = 12) -> tuple[float, list[float]]:
    """Slope of log RMS(rho_est - rho) against log N for fixed-total count draws."""
    rng = np.random.default_rng(seed)
    rms = []
    for n in sizes:
        est = tomography.reconstruct_from_array(tomography.multinomial_counts(rho, n, trials, rng))
        rms.append(float(np.sqrt(np.mean(np.sum(np.abs(est - rho) ** 2, axis=(-2, -1))))))
    slope = float(np.polyfit(np.log(sizes), np.log(rms), 1)[0])
    return slope, rms


def check_tomography(cfg=None, seed: int = 12):
    def run():
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(100):
            rho = random_density_matrix(rng)
            counts = np.array([tomography.born_probabilities(rho, a, b) for a, b in tomography.SETTINGS])
            worst = max(worst, float(np.max(np.abs(tomography.reconstruct_from_array(counts) - rho))))
        slope, _ = error_scaling_slope(random_density_matrix(rng), seed=seed)
        return worst, slope

    (worst, slope), dt = _timed(run)
    return [
        Check(12, "round-trip error, 100 random states", worst, "<= 1e-10", worst <= 1e-10, dt),
        Check(12, "error scaling slope", slope, "-0.5 +- 0.05", _within(slope, -0.5, 0.05), dt),
        Check(12, "tomography runtime [s]", dt, "< 60", dt < 60, dt),
    ]


def check_efficiency(cfg=None):
    rep = gbudget.efficiency_matrix(_cfg(cfg).budget())
    return [
        Check(13, "max eta_i T_j", rep.pair_max, "0.077", _within(rep.pair_max, 0.077, 1e-12)),
        Check(13, "min eta_i T_j", rep.pair_min, "0.0045", _within(rep.pair_min, 0.0045, 1e-12)),
    ]


def eit_fit_crossing_mhz(cfg: RunConfig) -> float:
    f = cfg.require("eit_fit")
    medium = replace(cfg.medium(), gamma_rg=units.per_us_to_per_s(f["gamma_rg_per_us"]))
    omega = units.mhz_to_rad(f["omega_c_mhz"])
    delta_c = eit.coupling_detuning_for_peak(medium, omega, units.mhz_to_rad(f["eit_peak_mhz"]))
    drive = Drive(omega_c=omega, delta_s=0.0, delta_c=delta_c)
    return units.rad_to_mhz(blockade.crossing_two_photon_detuning(medium, drive))


def check_crossing(cfg=None):
    x, dt = _timed(lambda: eit_fit_crossing_mhz(_cfg(cfg)))
    return [Check(14, "transmission crossing [MHz]", x, "-17 +- 1", _within(x, -17, 1), dt)]


TARGETS = {
    "od_max": check_od_max,
    "zeta": check_zeta,
    "optimum": check_optimum,
    "im_chi_b": check_im_chi_b,
    "blockade": check_blockade,
    "oracle": check_oracle,
    "blockade_limit": check_blockade_limit,
    "visibility": check_visibility,
    "fidelity": check_fidelity,
    "memory": check_memory,
    "hopping": check_hopping,
    "tomography": check_tomography,
    "efficiency": check_efficiency,
    "crossing": check_crossing,
}


def run(target: str = "all") -> list[Check]:
    if target == "all":
        return [c for fn in TARGETS.values() for c in fn()]
    return TARGETS[target]()
