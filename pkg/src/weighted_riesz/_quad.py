"""Quadrature building blocks shared by the profile, kernel and operator modules.

Everything here works in the logarithmic variable ``t = log r`` where the
integrands of this package are products of exponentials and powers of
affine functions of ``t``.
"""

from __future__ import annotations

import math
from functools import lru_cache

import mpmath
import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import DivergentNormError

_MP_DPS = 40


@lru_cache(maxsize=None)
def gauss_legendre01(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre rule mapped to [0, 1]."""
    x, w = roots_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def gauss_jacobi01(n: int, e: float) -> tuple[np.ndarray, np.ndarray]:
    """Rule for int_0^1 x**e f(x) dx (weight singular at x = 0)."""
    # roots_jacobi uses weight (1-x)^a (1+x)^b on [-1, 1]
    x, w = roots_jacobi(n, 0.0, e)
    return 0.5 * (x + 1.0), w * 0.5 ** (1.0 + e)


def panel_rule(edges: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights on consecutive panels."""
    edges = np.asarray(edges, dtype=float)
    x, w = gauss_legendre01(n)
    lo, width = edges[:-1, None], np.diff(edges)[:, None]
    return (lo + width * x).ravel(), (width * w).ravel()


def graded_edges(a: float, b: float, toward_a: bool, levels: int, min_rel: float = 0.0) -> np.ndarray:
    """Panel edges on [a, b] halving in width toward one end.

    The innermost panel ends at distance ``(b-a) * 2**-levels`` from the
    graded end; it is returned as the first (or last) panel.
    """
    width = b - a
    k = np.arange(levels + 1)
    offs = width * 0.5 ** k
    offs = offs[offs > min_rel * width] if min_rel else offs
    if toward_a:
        return np.concatenate(([a], a + offs[::-1]))
    return np.concatenate((b - offs, [b]))


def power_log_integral(m: float, b: int, lo: float, hi: float) -> float:
    """int_lo^hi s**(m-1) * log(s)**b ds for integer b >= 0.

    ``lo`` may be 0 and ``hi`` may be inf; divergence raises
    :class:`DivergentNormError`.
    """
    if lo >= hi:
        return 0.0
    if lo == 0.0 and not m > 0:
        raise DivergentNormError(f"integral diverges at 0 (m={m})")
    if math.isinf(hi) and not m < 0:
        raise DivergentNormError(f"integral diverges at infinity (m={m})")
    if b == 0:
        if m == 0:
            return math.log(hi / lo)
        if lo == 0.0:
            return hi**m / m
        if math.isinf(hi):
            return -(lo**m) / m
        return lo**m * math.expm1(m * math.log(hi / lo)) / m
    return float(exp_affine_integral(m, [(1.0, 0.0, b)], _log_or_inf(lo), _log_or_inf(hi)))


def _log_or_inf(r: float) -> float:
    if r == 0.0:
        return -math.inf
    return math.log(r)


def _single_factor_tail(m, A, B, gam, T):
    """int_T^inf exp(m t) (A t + B)**gam dt, m < 0, A t + B > 0 on the range (mpmath)."""
    m, A, B, gam, T = (mpmath.mpf(v) for v in (m, A, B, gam, T))
    if A == 0:
        return B**gam * mpmath.exp(m * T) / (-m)
    if A < 0:
        raise ValueError("decreasing affine factor on an unbounded range")
    X = A * T + B
    if X <= 0:
        raise ValueError("affine factor not positive on the tail range")
    lam = -m / A
    return mpmath.exp(-m * B / A) / A * mpmath.gammainc(gam + 1, lam * X) / lam ** (gam + 1)


def exp_affine_integral(m: float, factors, t0: float, t1: float):
    """int_{t0}^{t1} exp(m t) * prod_i (A_i t + B_i)**g_i dt.

    Either limit may be infinite.  One non-trivial factor or all-integer
    exponents use incomplete-gamma closed forms; other cases fall back to
    ``mpmath.quad``.  Returns an mpmath number.
    """
    with mpmath.workdps(_MP_DPS):
        if t0 >= t1:
            return mpmath.mpf(0)
        merged: dict = {}
        for A, B, g in factors:
            if g != 0:
                key = (float(A), float(B))
                merged[key] = merged.get(key, 0) + g
        factors = [(A, B, g) for (A, B), g in merged.items() if g != 0]
        if math.isinf(t0) and math.isinf(t1):
            raise ValueError("doubly infinite range")
        if math.isinf(t0):
            # reflect t -> -t so the unbounded end is +inf
            return exp_affine_integral(-m, [(-A, B, g) for A, B, g in factors], -t1, -t0)
        if not math.isinf(t1):
            return _finite_or_split(m, factors, t0, t1)
        if not m < 0:
            raise DivergentNormError(f"tail integral diverges (rate {m})")
        nontrivial = [(A, B, g) for A, B, g in factors if A != 0]
        const = mpmath.mpf(1)
        for A, B, g in factors:
            if A == 0:
                const *= mpmath.mpf(B) ** g
        if not nontrivial:
            return const * mpmath.exp(m * t0) / (-m)
        if len(nontrivial) == 1:
            A, B, g = nontrivial[0]
            if A > 0:
                return const * _single_factor_tail(m, A, B, g, t0)
        if all(float(g).is_integer() and g >= 0 for _, _, g in nontrivial):
            coeffs = _expand(nontrivial)
            # sum_k c_k int_{t0}^inf t^k e^{mt} dt, t0 may be negative
            total = mpmath.mpf(0)
            for k, c in enumerate(coeffs):
                if c == 0:
                    continue
                total += c * _monomial_tail(m, k, t0)
            return const * total
        f = _integrand(m, factors)
        return mpmath.quad(f, [t0, t0 + 1, t0 + 1 - 1 / m, mpmath.inf])


def _monomial_tail(m, k, t0):
    """int_{t0}^inf t^k e^{mt} dt for m < 0 and any real t0."""
    lam = -mpmath.mpf(m)
    t0 = mpmath.mpf(t0)
    if t0 >= 0:
        return mpmath.gammainc(k + 1, lam * t0) / lam ** (k + 1)
    # split at 0: the finite piece by antiderivative
    return _monomial_finite(m, k, t0, mpmath.mpf(0)) + mpmath.factorial(k) / lam ** (k + 1)


def _monomial_finite(m, k, t0, t1):
    """int_{t0}^{t1} t^k e^{mt} dt via the exact antiderivative."""
    m = mpmath.mpf(m)
    if m == 0:
        return (mpmath.mpf(t1) ** (k + 1) - mpmath.mpf(t0) ** (k + 1)) / (k + 1)

    def F(t):
        t = mpmath.mpf(t)
        s = mpmath.mpf(0)
        for j in range(k + 1):
            s += (-1) ** j * mpmath.factorial(k) / mpmath.factorial(k - j) * t ** (k - j) / m ** (j + 1)
        return mpmath.exp(m * t) * s

    return F(t1) - F(t0)


def _expand(factors):
    poly = np.polynomial.Polynomial([1.0])
    for A, B, g in factors:
        poly = poly * np.polynomial.Polynomial([B, A]) ** int(g)
    return [mpmath.mpf(c) for c in poly.coef]


def _integrand(m, factors):
    def f(t):
        v = mpmath.exp(m * t)
        for A, B, g in factors:
            v *= (A * t + B) ** g
        return v

    return f


def _finite_or_split(m, factors, t0, t1):
    if all(float(g).is_integer() and g >= 0 for _, _, g in factors):
        coeffs = _expand(factors)
        return sum((c * _monomial_finite(m, k, t0, t1) for k, c in enumerate(coeffs) if c != 0), mpmath.mpf(0))
    return mpmath.quad(_integrand(m, factors), [t0, t1])
