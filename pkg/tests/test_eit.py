import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rydpol import eit, units
from rydpol.eit import Drive, MediumParams
from rydpol.errors import ConfigError
from rydpol.units import EPSILON_0, HBAR


def steady_state_chi(medium, drive):
    """Weak-probe coherences from the 2x2 linear steady-state system, independent of the closed form."""
    g, gr = medium.gamma_e, medium.gamma_rg
    om = drive.omega_c
    a = np.array([
        [-(g / 2 - 1j * drive.delta_s), 0.5j * om],
        [0.5j * om, -(gr / 2 - 1j * (drive.delta_s + drive.delta_c))],
    ])
    probe = 1e-3
    sigma_eg, _ = np.linalg.solve(a, np.array([-0.5j * probe, 0.0]))
    return medium.chi0 * g * sigma_eg / probe


def test_od_max_by_hand(medium):
    rho, d, gam = 2e12 * 1e6, 2.54e-29, 2 * math.pi * 6.07e6
    chi0 = 2 * rho * d * d / (EPSILON_0 * HBAR * gam)
    assert medium.od_max == pytest.approx(2 * math.pi / 780.24e-9 * 60e-6 * chi0, rel=1e-12)


def test_higher_density_gives_about_40(medium):
    assert medium.scaled_density(1.2).od_max == pytest.approx(42.0, abs=2.5)


def test_empty_medium_limit(medium):
    assert replace(medium, rho=1e-30).chi0 < 1e-40


def test_resonant_two_level(medium):
    chi = eit.susceptibility(medium, Drive(0.0, 0.0, 0.0))
    assert chi == pytest.approx(1j * medium.chi0)
    prop = eit.propagate(medium, chi)
    assert prop.od == pytest.approx(medium.od_max)
    assert prop.beta == pytest.approx(0.0, abs=1e-12)


def test_dark_state_limit(medium):
    m = replace(medium, gamma_rg=0.0)
    assert eit.susceptibility(m, Drive(1e7, 3e7, -3e7)) == 0
    assert eit.propagate(m, 0j) == (0.0, 0.0, 1.0)


def test_chi_zero_propagation(medium):
    p = eit.propagate(medium, 0j)
    assert (p.od, p.beta, p.transmission) == (0.0, 0.0, 1.0)


drives = st.tuples(
    st.floats(0, 5e8), st.floats(-5e8, 5e8), st.floats(-5e8, 5e8), st.floats(0, 1e7))


@settings(max_examples=300, deadline=None)
@given(drives)
def test_passive_and_bounded(medium, d):
    om, ds, dc, gr = d
    m = replace(medium, gamma_rg=gr)
    chi = eit.susceptibility(m, Drive(om, ds, dc))
    assert chi.imag >= 0
    assert abs(chi) <= m.chi0 * (1 + 1e-12)
    assert abs(chi.real) <= m.chi0 / 2 * (1 + 1e-12)


@settings(max_examples=200, deadline=None)
@given(drives)
def test_matches_steady_state_solution(medium, d):
    om, ds, dc, gr = d
    m = replace(medium, gamma_rg=max(gr, 1.0))
    drive = Drive(om, ds, dc)
    assert eit.susceptibility(m, drive) == pytest.approx(steady_state_chi(m, drive), rel=1e-9, abs=1e-15)


def test_small_coupling_approaches_two_level(medium):
    ds = 2 * math.pi * 7e6
    two = eit.two_level_susceptibility(medium, ds)
    chi = eit.susceptibility(medium, Drive(1e-3, ds, 2e7))
    assert abs(chi - two) <= 1e-10 * abs(two)


def test_two_level_parity(medium):
    x = np.linspace(1e6, 5e8, 50)
    plus, minus = eit.two_level_susceptibility(medium, x), eit.two_level_susceptibility(medium, -x)
    np.testing.assert_allclose(plus.real, -minus.real, rtol=1e-12)
    np.testing.assert_allclose(plus.imag, minus.imag, rtol=1e-12)


def test_unit_rescaling_invariance(medium, optimum):
    drive = optimum.drive()
    base = eit.propagate(medium, eit.susceptibility(medium, drive))
    # time unit x s, length unit x q: rates scale by 1/s, density by q^-3, d by q (in C m), k by 1/q, L by q
    s = 7.0
    m2 = replace(medium, gamma_e=medium.gamma_e / s, gamma_rg=medium.gamma_rg / s)
    d2 = Drive(drive.omega_c / s, drive.delta_s / s, drive.delta_c / s)
    # chi0 carries 1/gamma_e; pin it to keep the same physical medium
    m2 = m2.with_od_max(medium.od_max)
    again = eit.propagate(m2, eit.susceptibility(m2, d2))
    assert again.od == pytest.approx(base.od, rel=1e-12)
    assert again.beta == pytest.approx(base.beta, rel=1e-12)
    q = 1e3
    m3 = replace(medium, length=medium.length * q, k_s=medium.k_s / q)
    again = eit.propagate(m3, eit.susceptibility(m3, drive))
    assert again.od == pytest.approx(base.od, rel=1e-12)


def test_spectrum_and_peak(medium):
    omega = units.mhz_to_rad(12.5)
    dc = eit.coupling_detuning_for_peak(medium, omega, units.mhz_to_rad(-15.0))
    peak = eit.eit_peak_detuning(medium, Drive(omega, 0.0, dc))
    assert units.rad_to_mhz(peak) == pytest.approx(-15.0, abs=1e-6)
    grid = units.mhz_to_rad(np.linspace(-16, -14, 2001))
    sp = eit.spectrum(medium, Drive(omega, 0.0, dc), grid)
    assert units.rad_to_mhz(grid[np.argmax(sp["transmission"])]) == pytest.approx(-15.0, abs=2e-3)


@pytest.mark.parametrize("field", ["gamma_e", "rho", "d_ge", "k_s", "length"])
def test_rejects_nonpositive(medium, field):
    with pytest.raises(ConfigError):
        replace(medium, **{field: 0.0})


def test_rejects_negative_coupling():
    with pytest.raises(ConfigError):
        Drive(-1.0, 0.0, 0.0)


def test_zero_c6_rejected(medium):
    with pytest.raises(ConfigError):
        replace(medium, c6=0.0)


def test_chi0_override(medium):
    m = MediumParams(medium.gamma_e, medium.gamma_rg, 1.0, 1.0, medium.k_s, medium.length, medium.c6,
                     chi0_override=0.01)
    assert m.chi0 == 0.01
