"""Physical constants and unit conversions used at the config/CLI boundary.

Internally every angular frequency is in rad/s, lengths in m, densities in
1/m^3 and the van der Waals coefficient in J m^6.
"""
from __future__ import annotations

import math

from scipy.constants import epsilon_0, hbar

EPSILON_0 = epsilon_0
HBAR = hbar
#: one atomic unit of C6 in J m^6
C6_ATOMIC_UNIT = 9.573e-80
TWO_PI = 2.0 * math.pi


def mhz_to_rad(nu_mhz):
    """Frequency quoted as nu/2pi in MHz -> angular frequency in rad/s."""
    return TWO_PI * 1e6 * nu_mhz


def rad_to_mhz(omega):
    return omega / (TWO_PI * 1e6)


def per_us_to_per_s(rate):
    return rate * 1e6


def per_s_to_per_us(rate):
    return rate * 1e-6


def um_to_m(x):
    return x * 1e-6


def m_to_um(x):
    return x * 1e6


def per_cm3_to_per_m3(rho):
    return rho * 1e6


def au_to_c6(c6_au):
    return c6_au * C6_ATOMIC_UNIT


def wavenumber(wavelength_m):
    return TWO_PI / wavelength_m
