"""Two-photon polarization states of the controlled-phase gate.

Basis ordering is {RR, RL, LR, LL} with the control qubit listed first.
Linear polarizations follow |H> = (|R> + |L>)/sqrt2 and |V> = i(|R> - |L>)/sqrt2;
diagonal ones are |D> = (|R> + i|L>)/sqrt2 and |A> = (|R> - i|L>)/sqrt2, so that
S_H, S_D, S_R are the expectation values of sigma_x, sigma_y, sigma_z in the
R/L basis.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import ConfigError, GainForbidden, NonPhysical

BASIS = ("RR", "RL", "LR", "LL")
_S = 1 / math.sqrt(2)

KETS = {
    "R": np.array([1, 0], dtype=complex),
    "L": np.array([0, 1], dtype=complex),
    "H": np.array([_S, _S], dtype=complex),
    "V": np.array([1j * _S, -1j * _S], dtype=complex),
    "D": np.array([_S, 1j * _S], dtype=complex),
    "A": np.array([_S, -1j * _S], dtype=complex),
}
#: analysis bases, each a (positive, negative) outcome pair
ANALYSES = {"HV": ("H", "V"), "DA": ("D", "A"), "RL": ("R", "L")}

# which of (beta_1, beta_2, beta_3) each basis component carries
_PHASE_PATTERN = np.array([[0, 0, 0], [0, 1, 0], [1, 0, 0], [1, 1, 1]])


def ket(label: str) -> np.ndarray:
    """Product state for a label such as 'HR' (control first) or a single 'H'."""
    out = np.array([1.0 + 0j])
    for ch in label:
        try:
            out = np.kron(out, KETS[ch])
        except KeyError:
            raise ConfigError(f"unknown polarization {ch!r}") from None
    return out


def ideal_output() -> np.ndarray:
    """(|LH> - i|RV>)/sqrt2, the ideal gate output for input |HH>."""
    return (ket("LH") - 1j * ket("RV")) / math.sqrt(2)


@dataclass(frozen=True)
class XiParams:
    """Complex loss/phase parameters: Re xi_i = OD_i / 2, Im xi_i = -beta_i."""

    xi0: complex = 0j
    xi1: complex = 0j
    xi2: complex = 0j
    xi3: complex = 0j

    @classmethod
    def from_components(cls, od=(0.0, 0.0, 0.0, 0.0), beta=(0.0, 0.0, 0.0, 0.0)) -> "XiParams":
        return cls(*(complex(o / 2, -b) for o, b in zip(od, beta)))

    @classmethod
    def ideal(cls) -> "XiParams":
        return cls(0j, 0j, 1j * math.pi, 1j * math.pi)

    @property
    def values(self) -> tuple[complex, complex, complex, complex]:
        return (self.xi0, self.xi1, self.xi2, self.xi3)

    @property
    def od(self) -> tuple[float, ...]:
        return tuple(2 * x.real for x in self.values)

    @property
    def beta(self) -> tuple[float, ...]:
        return tuple(-x.imag for x in self.values)

    def amplitudes(self) -> np.ndarray:
        x0, x1, x2, x3 = self.values
        return 0.5 * cmath.exp(-x0) * np.array(
            [1, cmath.exp(-x2), cmath.exp(-x1), cmath.exp(-x1 - x2 - x3)], dtype=complex)

    def diagonal(self) -> np.ndarray:
        """Per-component gate factors exp(-xi0) * (1, e^-xi2, e^-xi1, e^-(xi1+xi2+xi3))."""
        return 2 * self.amplitudes()


@dataclass(frozen=True)
class GateState:
    amplitudes: np.ndarray
    c_abs: complex

    @property
    def pair_probability(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def post_selected(self) -> np.ndarray:
        p = self.pair_probability
        if p == 0:
            raise NonPhysical("no two-photon component left to post-select")
        return self.amplitudes / math.sqrt(p)


def output_state(xi: XiParams) -> GateState:
    """Gate output for input |HH>; c_abs takes up the absorbed probability."""
    amps = xi.amplitudes()
    p = float(np.sum(np.abs(amps) ** 2))
    if p > 1 + 1e-12:
        raise NonPhysical(f"two-photon norm {p:.6g} exceeds 1 (gain in the medium?)")
    return GateState(amplitudes=amps, c_abs=complex(math.sqrt(max(0.0, 1 - p))))


def compensate_single_qubit(xi: XiParams, qubit: str, arm: str, attenuation: float = 1.0,
                            phase: float = 0.0) -> XiParams:
    """Apply a passive single-qubit operation to one polarization arm.

    The amplitude of the ``arm`` ('R' or 'L') component of the ``qubit``
    ('control' or 'target') is multiplied by sqrt(attenuation) * exp(i phase).
    Only xi0 and xi1 (control) or xi0 and xi2 (target) change.
    """
    if not 0 < attenuation <= 1:
        raise GainForbidden(f"intensity factor {attenuation!r} not in (0, 1]")
    if qubit not in ("control", "target") or arm not in ("R", "L"):
        raise ConfigError(f"bad qubit/arm {qubit!r}/{arm!r}")
    log_f = 0.5 * math.log(attenuation) + 1j * phase
    idx = 1 if qubit == "control" else 2
    vals = list(xi.values)
    if arm == "L":
        vals[idx] -= log_f
    else:
        vals[0] -= log_f
        vals[idx] += log_f
    out = XiParams(*vals)
    assert out.xi3 == xi.xi3
    return out


def dephasing_mask(visibilities=(1.0, 1.0, 1.0)) -> np.ndarray:
    """4x4 factors that uncorrelated, symmetric fluctuations of beta_1..3 imprint on rho.

    Element (a, b) is the product of V_k over the phases carried by exactly
    one of the two components.
    """
    v = np.asarray(visibilities, dtype=float)
    diff = _PHASE_PATTERN[:, None, :] != _PHASE_PATTERN[None, :, :]
    return np.prod(np.where(diff, v, 1.0), axis=2)


def apply_gate(xi: XiParams, rho_in: np.ndarray, visibilities=(1.0, 1.0, 1.0)) -> np.ndarray:
    """Unnormalized two-photon output density matrix (trace = pair survival probability)."""
    g = xi.diagonal()
    return np.outer(g, g.conj()) * np.asarray(rho_in) * dephasing_mask(visibilities)


def gate_output_density(xi: XiParams, input_label: str = "HH",
                        visibilities=(1.0, 1.0, 1.0)) -> np.ndarray:
    """Post-selected output density matrix for a product input state."""
    psi = ket(input_label)
    out = apply_gate(xi, np.outer(psi, psi.conj()), visibilities)
    tr = np.trace(out).real
    if tr <= 0:
        raise NonPhysical("no two-photon component left to post-select")
    return out / tr


@dataclass(frozen=True)
class NoiseModel:
    """Visibilities and mean values of the three fluctuating phases."""

    v1: float = 1.0
    v2: float = 1.0
    v3: float = 1.0
    mean_beta1: float = 0.0
    mean_beta2: float = math.pi
    mean_beta3: float = math.pi

    def __post_init__(self):
        for v in (self.v1, self.v2, self.v3):
            if not 0 <= v <= 1:
                raise ConfigError(f"visibility {v!r} outside [0, 1]")

    @property
    def visibilities(self) -> tuple[float, float, float]:
        return (self.v1, self.v2, self.v3)

    def to_xi(self, od=(0.0, 0.0, 0.0, 0.0)) -> XiParams:
        return XiParams.from_components(
            od=od, beta=(0.0, self.mean_beta1, self.mean_beta2, self.mean_beta3))

    def with_means_from(self, xi: XiParams) -> "NoiseModel":
        b = xi.beta
        return replace(self, mean_beta1=b[1], mean_beta2=b[2], mean_beta3=b[3])


# truth-table layouts: (control labels, target labels)
LAYOUTS = {
    "rl": ("RL", "RL"),
    "hv_control": ("HV", "RL"),
    "hv_target": ("RL", "HV"),
}


@dataclass(frozen=True)
class TruthTable:
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    probabilities: np.ndarray
    desired: tuple[int, ...]

    @property
    def fidelity(self) -> float:
        return float(np.mean([self.probabilities[i, j] for i, j in enumerate(self.desired)]))

    def rows(self) -> list[dict]:
        return [
            {"input": a, "output": b, "probability": float(self.probabilities[i, j])}
            for i, a in enumerate(self.inputs) for j, b in enumerate(self.outputs)
        ]


def _labels(layout: str) -> list[str]:
    try:
        ctrl, tgt = LAYOUTS[layout]
    except KeyError:
        raise ConfigError(f"unknown truth-table layout {layout!r}") from None
    return [c + t for c in ctrl for t in tgt]


def output_probabilities(rho: np.ndarray, outputs) -> np.ndarray:
    return np.array([np.real(ket(o).conj() @ rho @ ket(o)) for o in outputs])


def truth_table(xi: XiParams, layout: str = "hv_control", visibilities=(1.0, 1.0, 1.0)) -> TruthTable:
    """Post-selected output probabilities for the four product inputs of ``layout``.

    The desired output of each input is the one the ideal gate produces; the
    table fidelity is the mean probability of the desired outputs.
    """
    labels = _labels(layout)
    probs = np.array([output_probabilities(gate_output_density(xi, lab, visibilities), labels)
                      for lab in labels])
    ideal = XiParams.ideal()
    desired = tuple(int(np.argmax(output_probabilities(gate_output_density(ideal, lab), labels)))
                    for lab in labels)
    return TruthTable(tuple(labels), tuple(labels), probs, desired)
