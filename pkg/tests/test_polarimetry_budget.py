import math

import numpy as np
import pytest

from rydpol import units
from rydpol.errors import ConfigError, ZeroPower
from rydpol.gate import budget as gb
from rydpol.gate.polarimetry import stokes
from rydpol.gate.states import ket


def test_pure_states():
    s = stokes(ket("H"))
    assert (s.s_h, s.s_d, s.s_r) == pytest.approx((1, 0, 0), abs=1e-12)
    assert s.visibility == pytest.approx(1) and s.azimuth == pytest.approx(0)
    assert stokes(ket("D")).azimuth == pytest.approx(math.pi / 2)
    assert stokes(ket("V")).azimuth == math.pi
    assert stokes(ket("R")).s_r == pytest.approx(1)


def test_relative_phase_sets_azimuth():
    for phi in np.linspace(-3, 3, 13):
        s = stokes(np.array([1, np.exp(1j * phi)]) / math.sqrt(2))
        assert s.azimuth == pytest.approx(-phi, abs=1e-12) or s.azimuth == pytest.approx(phi, abs=1e-12)
        assert s.visibility == pytest.approx(1)


def test_mixed_state_has_no_azimuth():
    s = stokes(np.eye(2) / 2)
    assert s.visibility == 0 and not s.azimuth_defined and s.azimuth == 0.0


def test_powers_and_flip():
    s = stokes({"H": 3, "V": 1, "D": 2, "A": 2, "R": 1, "L": 1})
    assert (s.s_h, s.s_d, s.s_r) == (0.5, 0.0, 0.0)
    f = s.flipped()
    assert f.s_h == -0.5 and f.azimuth == pytest.approx(math.pi)
    with pytest.raises(ZeroPower):
        stokes({"H": 0, "V": 0, "D": 1, "A": 1, "R": 1, "L": 1})


def test_partially_dephased_visibility():
    v = 0.66
    rho = 0.5 * np.array([[1, v], [v, 1]])
    assert stokes(rho).visibility == pytest.approx(v)


def test_efficiency_matrix_range(cfg):
    rep = gb.efficiency_matrix(cfg.budget())
    assert rep.pair_max == pytest.approx(0.077)
    assert rep.pair_min == pytest.approx(0.0045)
    assert rep.table["RR"] == rep.pair_max


def test_unity_budget():
    rep = gb.efficiency_matrix(gb.EfficiencyBudget(n_c=50, n_t=50))
    assert all(v == 1 for v in rep.table.values())
    assert rep.p_shot == pytest.approx(1.0)


def test_shot_probability_order_of_magnitude(cfg):
    b = cfg.budget()
    rep = gb.efficiency_matrix(b)
    reported = cfg.section("budget")["p_shot_reported"]
    assert reported / 2 <= rep.p_shot <= reported * 2
    rate = gb.coincidences_per_minute(rep.p_shot, b.shots, cfg.section("budget")["sample_period_s"])
    assert 0.2 <= rate <= 0.8


def test_small_number_limit():
    b = gb.EfficiencyBudget(eta_r=0.1, eta_l=0.2, t_r=0.5, t_l=0.3, n_c=1e-3, n_t=1e-3)
    p = gb.efficiency_matrix(b).p_shot
    assert p == pytest.approx(1e-6 * 0.1 * 0.3, rel=2e-3)


def test_budget_validation():
    with pytest.raises(ConfigError):
        gb.EfficiencyBudget(eta_r=1.5)
    with pytest.raises(ConfigError):
        gb.EfficiencyBudget(n_c=0)


def test_hopping_numbers(cfg):
    h = cfg.section("hopping")
    rep = gb.hopping_comparison(h["t_d_us"] * 1e-6, h["tau_us"] * 1e-6, h["eta"], h["t_single"])
    assert rep["decay_factor"] == pytest.approx(0.75, abs=0.01)
    assert rep["extrapolated_efficiency"] == pytest.approx(0.0056, abs=0.0003)
    assert gb.thermal_decay_factor(0.0, 4.5e-6) == 1.0
    with pytest.raises(ConfigError):
        gb.thermal_decay_factor(1e-6, 0.0)


def test_target_r_channel(medium):
    ds = units.mhz_to_rad(-17.0)
    r = gb.target_r_channel(medium, ds)
    assert r["transmission"] == pytest.approx(math.exp(-r["od"]))
    # a sixth of the OD means a sixth of the two-level phase and attenuation
    full = gb.target_r_channel(medium, ds, od_ratio=1.0)
    assert r["od"] == pytest.approx(full["od"] / 6, rel=1e-9)
    assert r["beta"] == pytest.approx(full["beta"] / 6, rel=1e-9)
    assert 0 < r["transmission"] < 1
