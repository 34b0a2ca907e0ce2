"""Fidelity algebra for the entangling-gate operation and the control-qubit memory."""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq
from scipy.special import i0e, i1e

from ..errors import ConfigError
from ..parallel import pmap, spawn_generators, split_evenly
from .states import ideal_output


def psi_beta(beta0, beta1, beta2, beta3) -> np.ndarray:
    """Equal-population output state with four real phases, shape (..., 4)."""
    b0, b1, b2, b3 = np.broadcast_arrays(*(np.asarray(b, dtype=float) for b in (beta0, beta1, beta2, beta3)))
    comps = np.stack([np.zeros_like(b1), b2, b1, b1 + b2 + b3], axis=-1)
    return 0.5 * np.exp(1j * b0)[..., None] * np.exp(1j * comps)


def fidelity_f_beta(beta1, beta2, beta3):
    """|<psi_i|psi_beta>|^2 in closed form."""
    b1, b2, b3 = (np.asarray(b, dtype=float) for b in (beta1, beta2, beta3))
    out = (2 + np.cos(b1) - np.cos(b2) + np.cos(b1 + b2 + b3) - np.cos(b1 - b2)
           - np.cos(b1 + b3) + np.cos(b2 + b3)) / 8
    return float(out) if out.ndim == 0 else out


def overlap_fidelity(beta1, beta2, beta3):
    """Same quantity as :func:`fidelity_f_beta`, from explicit state vectors."""
    psi = psi_beta(0.0, beta1, beta2, beta3)
    out = np.abs(psi @ ideal_output().conj()) ** 2
    return float(out) if out.ndim == 0 else out


def _check_visibility(*vs):
    for v in vs:
        if not 0 <= v <= 1:
            raise ConfigError(f"visibility {v!r} outside [0, 1]")


def entangling_fidelity(v1: float, v2: float, v3: float) -> float:
    """Phase-averaged F_beta for independent symmetric fluctuations at optimal mean phases."""
    _check_visibility(v1, v2, v3)
    return (1 + v1) / 2 * (1 + v2) / 2 * (1 + v3) / 2 + (1 - v3) / 8


def target_visibility(v2: float, v3: float) -> float:
    """Target visibility with a stored control excitation."""
    return v2 * v3


def entangling_fidelity_bound(v_c: float, v_t: float) -> float:
    """Upper bound on F_e given only the measured control and target visibilities."""
    _check_visibility(v_c, v_t)
    return (1 + v_c) * (1 + v_t) / 4 + (1 - v_t) / 8


def memory_fidelity(v_c: float, eps_r: float, eps_l: float) -> float:
    """Average post-selected fidelity of the polarization memory."""
    _check_visibility(v_c)
    for e in (eps_r, eps_l):
        if not 0 <= e <= 1:
            raise ConfigError(f"leakage fraction {e!r} outside [0, 1]")
    return (2 + 2 * v_c + 1 / (1 + eps_r) + 1 / (1 + eps_l)) / 6


def von_mises_kappa(visibility: float) -> float:
    """Concentration kappa with I1(kappa)/I0(kappa) equal to ``visibility``; inf for 1."""
    _check_visibility(visibility)
    if visibility == 0:
        return 0.0
    if visibility == 1:
        return math.inf

    def f(k):
        return i1e(k) / i0e(k) - visibility

    hi = 1.0
    while f(hi) < 0:
        hi *= 2
    return float(brentq(f, 0.0, hi, xtol=1e-14, rtol=1e-14))


def sample_phases(visibility: float, mean: float, size: int, rng: np.random.Generator) -> np.ndarray:
    kappa = von_mises_kappa(visibility)
    if math.isinf(kappa):
        return np.full(size, float(mean))
    return rng.vonmises(mean, kappa, size)


def monte_carlo_entangling_fidelity(v1: float, v2: float, v3: float, samples: int, seed: int,
                                    tasks: int = 8, means=(0.0, math.pi, math.pi)) -> float:
    """Sample mean of F_beta with von Mises phases; reproducible from (seed, samples, tasks)."""
    rngs = spawn_generators(seed, tasks)
    counts = split_evenly(samples, tasks)

    def work(arg):
        rng, n = arg
        b1 = sample_phases(v1, means[0], n, rng)
        b2 = sample_phases(v2, means[1], n, rng)
        b3 = sample_phases(v3, means[2], n, rng)
        return float(np.sum(fidelity_f_beta(b1, b2, b3)))

    return sum(pmap(work, zip(rngs, counts))) / samples


def population_fluctuation_fidelity(sigma1: float, sigma2: float, sigma3: float,
                                    order: int = 40) -> dict[str, float]:
    """Entangling fidelity when only the populations fluctuate.

    Each amplitude factor exp(-x_k), x_k ~ N(0, sigma_k^2), replaces a phase
    factor; phases stay at their ideal values.  Gauss-Hermite quadrature gives
    the mean post-selected fidelity and the matching visibilities
    V_k = <sech x_k> (the visibility of a single qubit with amplitude ratio e^-x).
    """
    nodes, weights = np.polynomial.hermite_e.hermegauss(order)
    weights = weights / weights.sum()
    xs = [s * nodes for s in (sigma1, sigma2, sigma3)]
    x1, x2, x3 = np.meshgrid(*xs, indexing="ij")
    w = weights[:, None, None] * weights[None, :, None] * weights[None, None, :]
    amps = np.stack([np.ones_like(x1), -np.exp(-x2), np.exp(-x1), np.exp(-x1 - x2 - x3)], axis=-1)
    amps = amps / np.linalg.norm(amps, axis=-1, keepdims=True)
    fid = np.abs(amps @ ideal_output().conj()) ** 2
    vis = [float(np.sum(weights / np.cosh(x))) for x in xs]
    return {"fidelity": float(np.sum(w * fid)), "v1": vis[0], "v2": vis[1], "v3": vis[2]}
