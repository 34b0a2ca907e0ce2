import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rydpol import blockade
from rydpol.errors import ConfigError, GainForbidden, NonPhysical
from rydpol.gate.states import (NoiseModel, XiParams, compensate_single_qubit, gate_output_density, ideal_output,
                                ket, output_state, truth_table)


def test_basis_conventions():
    h, v = ket("H"), ket("V")
    r, l = ket("R"), ket("L")
    assert np.allclose(h, (r + l) / math.sqrt(2))
    assert np.allclose(v, 1j * (r - l) / math.sqrt(2))
    assert abs(np.vdot(ket("D"), ket("A"))) < 1e-15
    assert np.allclose(ket("HR"), np.kron(h, r))


def test_ideal_gate_output():
    st_ = output_state(XiParams.ideal())
    psi = st_.post_selected()
    # xi1 = 0, xi2 = xi3 = i pi
    assert np.allclose(psi, 0.5 * np.array([1, -1, 1, 1]))
    assert abs(np.vdot(ideal_output(), psi)) == pytest.approx(1.0)
    assert st_.c_abs == 0


def test_trivial_gate_is_identity():
    assert np.allclose(output_state(XiParams()).post_selected(), ket("HH"))
    assert np.allclose(ket("HH"), 0.5 * np.ones(4))


def test_blockade_pipeline_gives_pi(medium, optimum):
    res = blockade.conditional_response(medium, optimum.drive(), convention="bulk", rtol=1e-10)
    xi3 = complex(res.delta_od / 2, -res.delta_beta)
    xi = XiParams(0j, 0j, 1j * math.pi, xi3)
    assert xi.beta[3] == pytest.approx(math.pi, abs=1e-6)
    assert xi.od[3] == 0.0


xi_parts = st.tuples(st.floats(0, 3), st.floats(-10, 10))


@settings(max_examples=200, deadline=None)
@given(st.lists(xi_parts, min_size=4, max_size=4))
def test_normalization(parts):
    xi = XiParams.from_components(od=[p[0] for p in parts], beta=[p[1] for p in parts])
    s = output_state(xi)
    assert s.pair_probability + abs(s.c_abs) ** 2 == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(s.post_selected()) == pytest.approx(1.0)


def test_gain_is_nonphysical():
    with pytest.raises(NonPhysical):
        output_state(XiParams(xi0=-0.5 + 0j))


def test_components_roundtrip():
    xi = XiParams.from_components(od=(0.2, 0.4, 0.6, 0.8), beta=(0.1, -0.2, 3.0, 2.0))
    assert xi.od == pytest.approx((0.2, 0.4, 0.6, 0.8))
    assert xi.beta == pytest.approx((0.1, -0.2, 3.0, 2.0))


def test_compensation_zeroes_od1():
    xi = XiParams.from_components(od=(0.0, 1.2, 0.0, 0.0))
    # control L arm loses e^-1.2 relative to R; attenuate R by the same factor
    fixed = compensate_single_qubit(xi, "control", "R", attenuation=math.exp(-1.2))
    assert fixed.xi1.real == pytest.approx(0.0, abs=1e-15)
    assert fixed.xi0.real == pytest.approx(0.6)


def test_target_phase_to_pi():
    xi = XiParams.from_components(beta=(0.0, 0.0, 0.4, math.pi))
    fixed = compensate_single_qubit(xi, "target", "L", phase=math.pi - 0.4)
    assert fixed.beta[2] == pytest.approx(math.pi)


compensation = st.tuples(st.sampled_from(["control", "target"]), st.sampled_from(["R", "L"]),
                         st.floats(1e-3, 1.0), st.floats(-7, 7))


@settings(max_examples=200, deadline=None)
@given(st.lists(compensation, max_size=12), st.complex_numbers(max_magnitude=5))
def test_xi3_untouchable(ops, xi3):
    xi = XiParams(0.1 + 0.2j, 0.3 - 1j, 0.05 + 2j, xi3)
    for qubit, arm, att, ph in ops:
        xi = compensate_single_qubit(xi, qubit, arm, att, ph)
    assert xi.xi3 == xi3


def test_gain_forbidden():
    with pytest.raises(GainForbidden):
        compensate_single_qubit(XiParams(), "control", "R", attenuation=1.5)
    with pytest.raises(ConfigError):
        compensate_single_qubit(XiParams(), "both", "R")


def test_compensation_is_a_local_operation():
    """Compensating arm R of the control equals applying diag(f, 1) to the control qubit."""
    xi = XiParams.from_components(od=(0.1, 0.5, 0.2, 0.3), beta=(0.0, 0.7, 2.0, 3.0))
    f = math.sqrt(0.4) * cmath.exp(0.9j)
    direct = np.kron(np.diag([f, 1]), np.eye(2)) @ xi.amplitudes()
    assert np.allclose(compensate_single_qubit(xi, "control", "R", 0.4, 0.9).amplitudes(), direct)


@pytest.mark.parametrize("layout", ["hv_control", "hv_target", "rl"])
def test_ideal_truth_tables(layout):
    assert truth_table(XiParams.ideal(), layout).fidelity == pytest.approx(1.0)


def test_cnot_mapping():
    t = truth_table(XiParams.ideal(), "hv_control")
    mapping = {t.inputs[i]: t.outputs[j] for i, j in enumerate(t.desired)}
    assert mapping == {"HR": "HR", "HL": "VL", "VR": "VR", "VL": "HL"}
    t = truth_table(XiParams.ideal(), "hv_target")
    mapping = {t.inputs[i]: t.outputs[j] for i, j in enumerate(t.desired)}
    assert mapping == {"RH": "RV", "RV": "RH", "LH": "LH", "LV": "LV"}


def test_no_interaction_halves_fidelity():
    xi = XiParams(0j, 0j, 1j * math.pi, 0j)
    assert truth_table(xi, "hv_control").fidelity == pytest.approx(0.5)


def test_noisy_tables_below_one():
    nm = NoiseModel(v1=0.66, v2=1.0, v3=0.75)
    f = truth_table(nm.to_xi(), "hv_control", nm.visibilities).fidelity
    assert 0.5 < f < 1


@settings(max_examples=50, deadline=None)
@given(st.floats(-10, 10), st.floats(0, 2))
def test_global_phase_invisible(phase, od0):
    base = XiParams.from_components(od=(0.0, 0.3, 0.1, 0.2), beta=(0.0, 0.2, 3.0, 2.9))
    shifted = XiParams.from_components(od=(od0, 0.3, 0.1, 0.2), beta=(phase, 0.2, 3.0, 2.9))
    for layout in ("hv_control", "hv_target"):
        assert np.allclose(truth_table(base, layout).probabilities, truth_table(shifted, layout).probabilities)


def test_dephased_state_fidelity_matches_closed_form():
    nm = NoiseModel(0.8, 0.9, 0.7)
    rho = gate_output_density(nm.to_xi(), "HH", nm.visibilities)
    f = np.real(ideal_output().conj() @ rho @ ideal_output())
    assert f == pytest.approx(0.9 * 0.95 * 0.85 + 0.3 / 8, abs=1e-12)


def test_noise_model_validation():
    with pytest.raises(ConfigError):
        NoiseModel(v1=1.2)
