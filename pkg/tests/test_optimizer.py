import math
from dataclasses import replace

import numpy as np
import pytest

from rydpol import blockade, eit, optimizer, units
from rydpol.errors import Infeasible
from rydpol.repro import random_feasible_medium


def test_zeta_by_hand(medium):
    a = 3 * medium.chi0 * medium.k_s / math.pi
    z = (2 / 7) * (abs(medium.c6) / (units.HBAR * medium.gamma_rg)) ** (1 / 7) * a ** (6 / 7)
    assert optimizer.zeta(medium) == pytest.approx(z, rel=1e-12)


def test_zero_od_detuning_zeroes_od(medium):
    rng = np.random.default_rng(1)
    for _ in range(50):
        ds = -rng.uniform(0.5, 10) * medium.gamma_e
        om = rng.uniform(0.1, 5) * medium.gamma_e
        dcu = optimizer.zero_od_coupling_detuning(medium, ds, om)
        chi_u = eit.susceptibility(medium, eit.Drive(om, ds, dcu))
        chi_b = eit.two_level_susceptibility(medium, ds)
        assert chi_u.imag == pytest.approx(chi_b.imag, rel=1e-9)


def test_optimum_meets_both_constraints(medium, optimum):
    res = blockade.conditional_response(medium, optimum.drive(), convention="bulk", rtol=1e-10)
    assert abs(res.delta_od) <= 1e-6 * medium.od_max
    assert res.delta_beta == pytest.approx(math.pi, abs=1e-6)
    factor, tuned = optimizer.fine_tune_density(medium, optimum)
    again = blockade.conditional_response(tuned, optimum.drive(), convention="bulk", rtol=1e-10)
    assert again.delta_beta == pytest.approx(math.pi, abs=1e-3)
    assert factor == pytest.approx(1.0, abs=1e-3)


def test_optimum_is_constrained_minimum(medium, optimum):
    # moving |Delta_s| outward at the optimal Omega_c must break Delta_beta = pi from below
    g = medium.gamma_e
    om = np.geomspace(0.2, 5, 400) * g
    db_out, ok = optimizer.grid_delta_beta(medium, np.full_like(om, optimum.delta_s * 1.02), om)
    assert np.all(db_out[ok] < math.pi)
    db_in, ok = optimizer.grid_delta_beta(medium, np.full_like(om, optimum.delta_s * 0.98), om)
    assert np.max(db_in[ok]) > math.pi


def test_brute_force_agrees_on_reference_medium(medium, optimum):
    bf = optimizer.brute_force_optimum(medium)
    assert bf.delta_s == pytest.approx(optimum.delta_s, rel=0.03)
    assert bf.omega_c == pytest.approx(optimum.omega_c, rel=0.03)


def test_brute_force_is_deterministic(medium):
    assert optimizer.brute_force_optimum(medium) == optimizer.brute_force_optimum(medium)


def test_infeasible_zeta(medium):
    weak = replace(medium, c6=medium.c6 * 1e-6)
    assert optimizer.zeta(weak) < 1
    with pytest.raises(Infeasible):
        optimizer.analytic_optimum(weak)
    with pytest.raises(Infeasible):
        optimizer.brute_force_optimum(weak)


def test_no_dephasing_is_unbounded(medium):
    assert optimizer.zeta(replace(medium, gamma_rg=0.0)) == math.inf


def test_leading_term_forms_agree(medium):
    rng = np.random.default_rng(4)
    for _ in range(20):
        m = random_feasible_medium(medium, rng)
        e = optimizer.im_chi_b_expansion(m)
        assert e["leading"] == pytest.approx(e["expanded"], rel=1e-10)


def test_leading_term_accuracy_at_reference(medium):
    e = optimizer.im_chi_b_expansion(medium)
    assert abs(e["exact"] / e["leading"] - 1) <= 1 / e["zeta"] ** 2


def test_vanishing_dephasing_gives_transparency(medium):
    ims = [optimizer.analytic_optimum(replace(medium, gamma_rg=g)).im_chi_b for g in (1e5, 1e3, 1e1)]
    assert ims[0] > ims[1] > ims[2]
    # large-zeta scaling Im chi_b ~ gamma_rg^(2/7) drives it to zero
    assert ims[1] / ims[2] == pytest.approx(100 ** (2 / 7), rel=0.02)


def test_monotone_in_c6_and_dephasing(medium):
    rng = np.random.default_rng(5)
    for _ in range(10):
        m = random_feasible_medium(medium, rng)
        c6s = np.geomspace(1, 4, 5) * m.c6
        ims = [optimizer.analytic_optimum(replace(m, c6=c)).im_chi_b for c in c6s]
        assert np.all(np.diff(ims) <= 0)
        gs = np.geomspace(1, 1.5, 5) * m.gamma_rg
        ims = [optimizer.analytic_optimum(replace(m, gamma_rg=g)).im_chi_b for g in gs]
        assert np.all(np.diff(ims) >= 0)


def test_necessary_condition_bound():
    rep = optimizer.necessary_condition_bound(19.0)
    assert rep.feasible and rep.max_delta_beta == 9.5
    assert not optimizer.necessary_condition_bound(6.0).feasible
    assert rep.ceiling_lb_equals_l == pytest.approx(math.exp(-math.pi))


def test_bound_attaining_drive(medium):
    m = replace(medium, gamma_rg=0.0)
    drive = optimizer.bound_attaining_drive(m, 0.3 * m.gamma_e)
    chi_u = eit.susceptibility(m, drive)
    chi_b = eit.two_level_susceptibility(m, drive.delta_s)
    # |Re(chi_b - chi_u)| = chi0 saturates |Delta_beta| <= OD_b / 2
    assert abs((chi_b - chi_u).real) == pytest.approx(m.chi0, rel=1e-9)


def test_gamma_sweep_flags_infeasible(medium):
    rows = optimizer.gamma_rg_sweep(medium, [1e6, 1e12])
    assert rows[0]["feasible"] and not rows[1]["feasible"]
