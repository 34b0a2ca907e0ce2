"""Bracketed bisection on a logarithmic axis, scalar and vectorized."""
from __future__ import annotations

import math

import numpy as np

from .errors import NoCrossing


def expand_bracket(f, guess, lower, upper, sign_low, sign_high, max_steps=60):
    """Grow [guess/2^k, guess*2^k] until f has the expected signs at both ends.

    ``sign_low`` / ``sign_high`` are the signs f takes near ``lower`` and
    ``upper``; the bracket is clipped to those limits.
    """
    guess = min(max(guess, lower), upper)
    lo = hi = guess
    for _ in range(max_steps):
        if np.sign(f(lo)) == sign_low and np.sign(f(hi)) == sign_high:
            return lo, hi
        if lo <= lower and hi >= upper:
            break
        lo = max(lo / 2.0, lower)
        hi = min(hi * 2.0, upper)
    raise NoCrossing(f"no sign change bracketed within [{lower:g}, {upper:g}]")


def bisect_log(f, lo, hi, rtol=1e-4, max_iter=200):
    """Bisection in log(x) on a bracket where f(lo) and f(hi) differ in sign."""
    flo = f(lo)
    if flo == 0:
        return lo
    a, b = math.log(lo), math.log(hi)
    target = math.log1p(rtol)
    for _ in range(max_iter):
        if b - a <= target:
            break
        m = 0.5 * (a + b)
        fm = f(math.exp(m))
        if fm == 0:
            return math.exp(m)
        if np.sign(fm) == np.sign(flo):
            a, flo = m, fm
        else:
            b = m
    return math.exp(0.5 * (a + b))


def bisect_log_vec(f, lo, hi, iterations=48):
    """Elementwise log-axis bisection.

    Returns (roots, ok) where ``ok`` marks entries whose end points actually
    bracket a sign change; other entries are NaN.
    """
    lo = np.log(np.asarray(lo, dtype=float))
    hi = np.log(np.asarray(hi, dtype=float))
    lo, hi = np.broadcast_arrays(lo, hi)
    lo, hi = lo.copy(), hi.copy()
    flo = f(np.exp(lo))
    fhi = f(np.exp(hi))
    ok = np.sign(flo) != np.sign(fhi)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        fm = f(np.exp(mid))
        same = np.sign(fm) == np.sign(flo)
        lo = np.where(same, mid, lo)
        flo = np.where(same, fm, flo)
        hi = np.where(same, hi, mid)
    root = np.exp(0.5 * (lo + hi))
    return np.where(ok, root, np.nan), ok
