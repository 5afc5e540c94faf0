"""Spherical average of the Riesz kernel.

For radial inputs the d-dimensional potential reduces to a one-dimensional
radial integral against

    Phi(r, s) = int_{S^{d-1}} |r e_1 - s w|^{-lam} dsigma(w),

which is homogeneous of degree -lam and symmetric in (r, s).  All routines
work with the log-ratio ``x = log(s / r)`` so that the diagonal r = s is
resolved without cancellation: Phi(r, s) = r**-lam * phi(x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._quad import gauss_jacobi01, gauss_legendre01
from .errors import SingularArgumentError
from .profiles import sphere_area


@dataclass(frozen=True)
class AngularKernelConfig:
    theta_rel_tol: float = 1e-9
    max_panels: int = 80
    near_diagonal_band: float = 0.05

    def __post_init__(self):
        if not self.theta_rel_tol > 0:
            raise ValueError("theta_rel_tol must be > 0")
        if not 0 < self.near_diagonal_band < 1:
            raise ValueError("near_diagonal_band must lie in (0, 1)")

    @property
    def nodes(self) -> int:
        return 16 if self.theta_rel_tol >= 1e-12 else 24


DEFAULT_KERNEL = AngularKernelConfig()


def kernel_diagonal_exponent(d: int, lam: float) -> float:
    """Local exponent e of Phi(r, s) ~ |r - s|**e near the diagonal.

    e < 0: integrable power singularity; e == 0: logarithmic; e > 0: Phi is
    bounded at r = s.
    """
    return d - 1.0 - lam


def _split(x):
    """rho = exp(-|x|) <= 1, 1 - rho, and the prefactor from phi(e^x) = e^{-lam x} phi(e^-x)."""
    ax = np.abs(x)
    return np.exp(-ax), -np.expm1(-ax), ax


def _phi_closed(d: int, lam: float, x: np.ndarray) -> np.ndarray:
    rho, one_minus, ax = _split(x)
    if d == 1:
        val = one_minus ** (-lam) + (1.0 + rho) ** (-lam)
    elif d == 3:
        k = 2.0 - lam
        if k == 0.0:
            # limit k -> 0: log((1+rho)/(1-rho)) / rho
            with np.errstate(divide="ignore"):
                small = rho < 0.5
                ratio_log = np.where(small, 2.0 * np.arctanh(np.where(small, rho, 0.0)), np.log1p(rho) - np.log(one_minus))
                val = 2.0 * math.pi * ratio_log / rho
        else:
            # (1+rho)^k - (1-rho)^k without cancellation at small rho
            small = rho < 0.5
            diff = np.where(
                small,
                one_minus**k * np.expm1(2.0 * k * np.arctanh(np.where(small, rho, 0.0))),
                (1.0 + rho) ** k - one_minus**k,
            )
            val = 2.0 * math.pi * diff / (rho * k)
        val = np.where(rho < 1e-300, sphere_area(3), val)
    else:
        raise ValueError("closed form only for d = 1 and d = 3")
    # restore the side x > 0 (s > r) by homogeneity
    return np.where(x > 0, np.exp(-lam * ax), 1.0) * val


def _theta_levels(one_minus, rho, cfg: AngularKernelConfig) -> np.ndarray:
    # angular peak width near theta = 0 when rho ~ 1
    with np.errstate(divide="ignore"):
        width = one_minus / np.sqrt(rho)
        k = np.ceil(np.log2(math.pi / (cfg.near_diagonal_band * width)))
    k = np.clip(np.where(width > 0, k, 0), 2, cfg.max_panels)
    return np.where(width > 0, k, -1).astype(int)  # -1 marks the exact diagonal


def _phi_generic(d: int, lam: float, x: np.ndarray, cfg: AngularKernelConfig) -> np.ndarray:
    rho, one_minus, ax = _split(x)
    out = np.empty_like(rho)
    levels = _theta_levels(one_minus, rho, cfg)
    gx, gw = gauss_legendre01(cfg.nodes)
    e = d - 2.0 - lam
    for k in np.unique(levels):
        idx = np.nonzero(levels == k)[0]
        if k == -1:
            if lam >= d - 1:
                raise SingularArgumentError(f"Phi is infinite on the diagonal for lam={lam} >= d-1={d - 1}")
            # graded toward theta=0, Gauss-Jacobi on the innermost panel
            kk = 3
            edges = math.pi * 0.5 ** np.arange(kk + 1)
            lo, hi = edges[1:], edges[:-1]
            th = (lo[:, None] + (hi - lo)[:, None] * gx).ravel()
            wt = ((hi - lo)[:, None] * gw).ravel()
            jx, jw = gauss_jacobi01(cfg.nodes, e)
            h0 = edges[-1]
            th0 = h0 * jx
            # integrand / theta^e, smooth at 0
            smooth0 = (2.0 * np.sin(th0 / 2.0) / th0) ** (-lam) * (np.sin(th0) / th0) ** (d - 2)
            inner = h0 ** (1.0 + e) * np.sum(jw * smooth0)
            outer = np.sum(wt * (2.0 * np.sin(th / 2.0)) ** (-lam) * np.sin(th) ** (d - 2))
            out[idx] = inner + outer
            continue
        edges = np.concatenate(([0.0], math.pi * 0.5 ** np.arange(k, -1, -1)))
        lo, hi = edges[:-1], edges[1:]
        th = (lo[:, None] + (hi - lo)[:, None] * gx).ravel()
        wt = ((hi - lo)[:, None] * gw).ravel()
        s2 = 4.0 * np.sin(th / 2.0) ** 2
        ang = wt * np.sin(th) ** (d - 2)
        for chunk in np.array_split(idx, max(1, idx.size // 4096 + 1)):
            if chunk.size == 0:
                continue
            dd = one_minus[chunk, None] ** 2 + rho[chunk, None] * s2[None, :]
            out[chunk] = (dd ** (-lam / 2.0)) @ ang
    if d == 2:
        sigma = 2.0
    else:
        sigma = sphere_area(d - 1)
    return np.where(x > 0, np.exp(-lam * ax), 1.0) * sigma * out


def phi(d: int, lam: float, x, cfg: AngularKernelConfig = DEFAULT_KERNEL, method: str = "auto") -> np.ndarray:
    """Normalised kernel phi(x) = Phi(1, e^x) for log-ratios x = log(s/r).

    ``method`` is "auto" (closed forms for d = 1, 3, quadrature otherwise),
    "quadrature" or "closed".
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if method == "auto":
        method = "closed" if d in (1, 3) else "quadrature"
    if method == "closed":
        if np.any(x == 0) and lam >= d - 1:
            raise SingularArgumentError(f"Phi is infinite on the diagonal for lam={lam} >= d-1={d - 1}")
        val = _phi_closed(d, lam, x)
    elif d == 1:
        raise ValueError("no angular quadrature in d = 1")
    else:
        val = _phi_generic(d, lam, x, cfg)
    return val[0] if scalar else val


def angular_kernel(d: int, lam: float, r: float, s: float, cfg: AngularKernelConfig = DEFAULT_KERNEL,
                   method: str = "auto") -> float:
    """Phi(r, s) for scalar radii."""
    if r < 0 or s < 0:
        raise ValueError("radii must be nonnegative")
    if r == 0 and s == 0:
        raise SingularArgumentError("Phi(0, 0) is undefined")
    if r == 0 or s == 0:
        return sphere_area(d) * max(r, s) ** (-lam)
    if r == s and lam >= d - 1:
        raise SingularArgumentError(f"Phi(r, r) is infinite for lam={lam} >= d-1={d - 1}")
    return float(r ** (-lam) * phi(d, lam, math.log(s / r), cfg, method))
