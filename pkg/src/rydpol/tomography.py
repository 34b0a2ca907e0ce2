"""Coincidence-count simulation and linear-inversion tomography of two polarization qubits.

Each qubit is analysed in one of H/V, D/A, R/L; the nine combinations form the
measurement set.  Outcome '+' is the first label of a pair (H, D, R).
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, MissingSetting, ZeroCoincidences
from .gate.budget import EfficiencyBudget, efficiency_matrix
from .gate.states import (ANALYSES, BASIS, KETS, GateState, XiParams, _labels, gate_output_density,
                          ket, truth_table)
from .parallel import pmap, spawn_generators

SETTINGS = tuple(itertools.product(ANALYSES, ANALYSES))
OUTCOMES = ((0, 0), (0, 1), (1, 0), (1, 1))

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "HV": np.array([[0, 1], [1, 0]], dtype=complex),
    "DA": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "RL": np.array([[1, 0], [0, -1]], dtype=complex),
}
_SIGNS = np.array([1, -1, -1, 1])


@dataclass(frozen=True)
class CountRecord:
    setting_q1: str
    setting_q2: str
    counts: tuple  # (++, +-, -+, --), ints or expected floats
    shots: int = 0

    def __post_init__(self):
        if (self.setting_q1, self.setting_q2) not in SETTINGS:
            raise MissingSetting(f"unknown setting {self.setting_q1}/{self.setting_q2}")
        if len(self.counts) != 4 or min(self.counts) < 0:
            raise ConfigError("need four non-negative counts")

    @property
    def total(self) -> float:
        return float(sum(self.counts))

    def rows(self):
        a, b = ANALYSES[self.setting_q1], ANALYSES[self.setting_q2]
        for (i, j), n in zip(OUTCOMES, self.counts):
            yield {"setting_q1": self.setting_q1, "setting_q2": self.setting_q2,
                   "outcome_q1": a[i], "outcome_q2": b[j], "count": n}


@dataclass(frozen=True)
class DensityMatrix4:
    matrix: np.ndarray
    flavor: str = "raw"
    records: tuple = field(default=(), repr=False, compare=False)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))

    @property
    def has_negative_eigenvalues(self) -> bool:
        return bool(self.eigenvalues.min() < -1e-12)

    def hermitized(self) -> "DensityMatrix4":
        m = 0.5 * (self.matrix + self.matrix.conj().T)
        return DensityMatrix4(m, "hermitized", self.records)

    def trace_normalized(self) -> "DensityMatrix4":
        return DensityMatrix4(self.matrix / np.trace(self.matrix), "trace-normalized", self.records)

    def to_json(self) -> str:
        return json.dumps({
            "basis": list(BASIS),
            "flavor": self.flavor,
            "real": self.matrix.real.tolist(),
            "imag": self.matrix.imag.tolist(),
            "min_eigenvalue": float(self.eigenvalues.min()),
        }, indent=2)


def _as_density(state) -> np.ndarray:
    if isinstance(state, DensityMatrix4):
        return state.matrix
    if isinstance(state, GateState):
        psi = state.post_selected()
        return np.outer(psi, psi.conj())
    arr = np.asarray(state, dtype=complex)
    if arr.shape == (4,):
        arr = arr / np.linalg.norm(arr)
        return np.outer(arr, arr.conj())
    if arr.shape != (4, 4):
        raise ConfigError("state must be a 4-vector or a 4x4 matrix")
    return arr


def _projector(setting: str, outcome: int) -> np.ndarray:
    v = KETS[ANALYSES[setting][outcome]]
    return np.outer(v, v.conj())


def born_probabilities(rho, setting_q1: str, setting_q2: str) -> np.ndarray:
    rho = _as_density(rho)
    out = np.array([np.real(np.trace(rho @ np.kron(_projector(setting_q1, i), _projector(setting_q2, j))))
                    for i, j in OUTCOMES])
    return np.clip(out, 0.0, None)


def _marginals(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    r = rho.reshape(2, 2, 2, 2)
    return np.einsum("ijkj->ik", r), np.einsum("ijil->jl", r)


def _sample_setting(rho, setting, budget: EfficiencyBudget, shots: int, rng) -> CountRecord:
    """Per-shot Poisson photon numbers, independent loss, and click registration.

    Detected photon numbers are Poisson with thinned means.  A shot counts as
    a coincidence when both qubits register at least one photon.  One
    detected photon per qubit is registered, picked uniformly; with
    probability 1/(k_c k_t) the registered pair is the gate pair (joint
    statistics), otherwise the excess photons follow the marginal states.
    """
    s1, s2 = setting
    k_c = rng.poisson(budget.n_c * budget.control_efficiency, shots)
    k_t = rng.poisson(budget.n_t * budget.target_efficiency, shots)
    hit = (k_c > 0) & (k_t > 0)
    kc, kt = k_c[hit], k_t[hit]
    paired = rng.random(kc.size) < 1.0 / (kc * kt)
    joint = born_probabilities(rho, s1, s2)
    m1, m2 = _marginals(rho)
    p1 = np.real([np.trace(m1 @ _projector(s1, 0)), np.trace(m1 @ _projector(s1, 1))])
    p2 = np.real([np.trace(m2 @ _projector(s2, 0)), np.trace(m2 @ _projector(s2, 1))])
    p1, p2 = np.clip(p1, 0, None), np.clip(p2, 0, None)
    n_pair = int(paired.sum())
    n_free = kc.size - n_pair
    counts = rng.multinomial(n_pair, joint / joint.sum())
    if n_free:
        o1 = rng.choice(2, n_free, p=p1 / p1.sum())
        o2 = rng.choice(2, n_free, p=p2 / p2.sum())
        counts = counts + np.bincount(2 * o1 + o2, minlength=4)
    return CountRecord(s1, s2, tuple(int(c) for c in counts), shots)


def simulate_counts(state, budget: EfficiencyBudget, settings=SETTINGS, seed: int | None = None,
                    shots: int | None = None, mode: str = "sample") -> list[CountRecord]:
    """Coincidence counts for each setting.

    ``mode='expected'`` returns expected (float) counts shots * P_shot * p_Born
    and needs no seed.  ``mode='sample'`` draws photon statistics per shot with
    one PRNG substream per setting; results depend only on (seed, settings).
    """
    rho = _as_density(state)
    shots = budget.shots if shots is None else shots
    settings = list(settings)
    if mode == "expected":
        p_shot = efficiency_matrix(budget).p_shot
        return [CountRecord(a, b, tuple(float(x) for x in shots * p_shot * born_probabilities(rho, a, b)), shots)
                for a, b in settings]
    if mode != "sample":
        raise ConfigError(f"unknown mode {mode!r}")
    if seed is None:
        raise ConfigError("sampling needs a seed")
    rngs = spawn_generators(seed, len(settings))
    return pmap(lambda arg: _sample_setting(rho, arg[0], budget, shots, arg[1]), zip(settings, rngs))


def multinomial_counts(rho, n: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    """Fixed-total count draws, shape (trials, 9, 4), in SETTINGS order."""
    probs = np.array([born_probabilities(rho, a, b) for a, b in SETTINGS])
    probs = probs / probs.sum(axis=1, keepdims=True)
    return np.stack([rng.multinomial(n, p, size=trials) for p in probs], axis=1)


def _correlations(counts: np.ndarray) -> dict[tuple[str, str], np.ndarray]:
    """Pauli expectation values from counts of shape (..., 9, 4)."""
    counts = np.asarray(counts, dtype=float)
    tot = counts.sum(axis=-1)
    both = (counts @ _SIGNS) / tot
    first = (counts @ np.array([1, 1, -1, -1])) / tot
    second = (counts @ np.array([1, -1, 1, -1])) / tot
    out: dict[tuple[str, str], list] = {}
    for k, (a, b) in enumerate(SETTINGS):
        out.setdefault((a, b), []).append(both[..., k])
        out.setdefault((a, "I"), []).append(first[..., k])
        out.setdefault(("I", b), []).append(second[..., k])
    return {key: np.mean(vals, axis=0) for key, vals in out.items()}


def reconstruct_from_array(counts: np.ndarray) -> np.ndarray:
    """Vectorized linear inversion; counts shape (..., 9, 4) -> rho shape (..., 4, 4)."""
    corr = _correlations(counts)
    lead = np.asarray(counts).shape[:-2]
    rho = np.broadcast_to(np.kron(_PAULI["I"], _PAULI["I"]), lead + (4, 4)).astype(complex)
    for (a, b), t in corr.items():
        rho = rho + np.asarray(t)[..., None, None] * np.kron(_PAULI[a], _PAULI[b])
    return rho / 4


def _records_to_array(records) -> np.ndarray:
    by_setting = {}
    for r in records:
        key = (r.setting_q1, r.setting_q2)
        prev = by_setting.get(key)
        by_setting[key] = r.counts if prev is None else tuple(x + y for x, y in zip(prev, r.counts))
    missing = [s for s in SETTINGS if s not in by_setting]
    if missing:
        raise MissingSetting("missing settings: " + ", ".join("/".join(s) for s in missing))
    arr = np.array([by_setting[s] for s in SETTINGS], dtype=float)
    empty = [SETTINGS[k] for k in np.flatnonzero(arr.sum(axis=1) <= 0)]
    if empty:
        raise ZeroCoincidences("no coincidences for: " + ", ".join("/".join(s) for s in empty))
    return arr


def reconstruct_linear(records) -> DensityMatrix4:
    """rho = 1/4 sum_ij <s_i s_j> s_i (x) s_j; negative eigenvalues are kept."""
    records = tuple(records)
    return DensityMatrix4(reconstruct_from_array(_records_to_array(records)), "raw", records)


@dataclass(frozen=True)
class FidelityEstimate:
    fidelity: float
    stderr: float
    entangled: bool


def fidelity_estimate(rho: DensityMatrix4, target: np.ndarray, bootstrap: int = 200,
                      seed: int = 0) -> FidelityEstimate:
    """<psi|rho|psi>, with a parametric bootstrap error when counts are attached."""
    target = np.asarray(target, dtype=complex)
    target = target / np.linalg.norm(target)
    f = float(np.real(target.conj() @ rho.matrix @ target))
    stderr = 0.0
    if rho.records and bootstrap > 0:
        arr = _records_to_array(rho.records)
        rng = np.random.default_rng(seed)
        tot = arr.sum(axis=1)
        if np.all(tot == np.round(tot)):
            draws = np.stack([rng.multinomial(int(n), p / n, size=bootstrap) for n, p in zip(tot, arr)], axis=1)
            mats = reconstruct_from_array(draws)
            fs = np.real(np.einsum("i,nij,j->n", target.conj(), mats, target))
            stderr = float(np.std(fs, ddof=1))
    return FidelityEstimate(f, stderr, f > 0.5)


@dataclass(frozen=True)
class MeasuredTruthTable:
    inputs: tuple
    outputs: tuple
    probabilities: np.ndarray
    errors: np.ndarray
    coincidences: np.ndarray
    desired: tuple

    @property
    def fidelity(self) -> float:
        return float(np.mean([self.probabilities[i, j] for i, j in enumerate(self.desired)]))

    @property
    def fidelity_error(self) -> float:
        return float(math.sqrt(sum(self.errors[i, j] ** 2 for i, j in enumerate(self.desired))) / 4)


def truth_table_measurement(xi: XiParams, budget: EfficiencyBudget, shots: int,
                            visibilities=(1.0, 1.0, 1.0), layout: str = "hv_control",
                            seed: int | None = None, mode: str = "sample") -> MeasuredTruthTable:
    """Prepare each input ``shots`` times, analyse in the layout bases, post-select coincidences."""
    labels = _labels(layout)
    ideal = truth_table(XiParams.ideal(), layout)
    p_shot = efficiency_matrix(budget).p_shot
    truth = np.array([
        [np.real(np.vdot(ket(o), gate_output_density(xi, lab, visibilities) @ ket(o))) for o in labels]
        for lab in labels])
    truth = np.clip(truth, 0, None)
    truth /= truth.sum(axis=1, keepdims=True)
    if mode == "expected":
        n = np.full(4, shots * p_shot)
        probs = truth
    elif mode == "sample":
        if seed is None:
            raise ConfigError("sampling needs a seed")
        rngs = spawn_generators(seed, 4)
        n = np.array([rng.binomial(shots, p_shot) for rng in rngs], dtype=float)
        counts = np.array([rng.multinomial(int(k), p) for rng, k, p in zip(rngs, n, truth)], dtype=float)
        probs = np.divide(counts, n[:, None], out=np.zeros_like(counts), where=n[:, None] > 0)
    else:
        raise ConfigError(f"unknown mode {mode!r}")
    with np.errstate(divide="ignore", invalid="ignore"):
        err = np.where(n[:, None] > 0, np.sqrt(probs * (1 - probs) / n[:, None]), np.nan)
    return MeasuredTruthTable(tuple(labels), tuple(labels), probs, err, n, ideal.desired)


def counts_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, ["setting_q1", "setting_q2", "outcome_q1", "outcome_q2", "count"],
                       lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerows(r.rows())
    return buf.getvalue()


def counts_from_csv(text: str) -> list[CountRecord]:
    grouped: dict[tuple[str, str], list] = {}
    for row in csv.DictReader(io.StringIO(text)):
        s1, s2 = row["setting_q1"], row["setting_q2"]
        if s1 not in ANALYSES or s2 not in ANALYSES:
            raise MissingSetting(f"unknown setting {s1}/{s2}")
        i = ANALYSES[s1].index(row["outcome_q1"])
        j = ANALYSES[s2].index(row["outcome_q2"])
        c = float(row["count"])
        bucket = grouped.setdefault((s1, s2), [0, 0, 0, 0])
        bucket[2 * i + j] += int(c) if c.is_integer() else c
    return [CountRecord(a, b, tuple(v)) for (a, b), v in grouped.items()]
