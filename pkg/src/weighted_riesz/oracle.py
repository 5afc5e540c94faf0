"""Brute-force Monte Carlo evaluation in R^d (d <= 3).

Independent of the radial reduction: samples points y in R^d and averages the
defining integrand of the potential directly.  The proposal is an equal
mixture of

  (i)  a radial density shaped like |H(rho)| rho**(d-1-alpha) max(rho, |x|)**-lam
       with a uniform direction, and
  (ii) a density proportional to |x - y|**-lam on a ball around x,

so that the weights stay bounded near all three singular loci (origin,
the point x, and infinity).

Random streams are Philox counters keyed by (seed, stream, block); partial
sums are combined in block order, so results do not depend on scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedDimension
from .exponents import RieszParams
from .profiles import RadialProfile, sphere_area

BLOCK = 1 << 16


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_err: float
    n_samples: int
    seed: int


def _rng(seed: int, stream: int, block: int) -> np.random.Generator:
    key = (int(seed) & 0xFFFFFFFFFFFFFFFF, ((int(stream) & 0xFFFFFFFF) << 32) | (int(block) & 0xFFFFFFFF))
    return np.random.Generator(np.random.Philox(key=np.array(key, dtype=np.uint64)))


class RadialProposal:
    """Density on (0, inf) proportional to |coef| rho**(power + shift) * max(rho, pivot)**-decay on each piece.

    ``pivot`` may be an array (one proposal per sample).  Log factors of the
    pieces are ignored; the proposal only has to be positive wherever the
    target is, and integrable.
    """

    def __init__(self, profile: RadialProfile, shift: float, pivot, decay: float):
        self.pivot = np.atleast_1d(np.asarray(pivot, dtype=float))
        self.decay = decay
        self.pieces = [(pc.r_lo, pc.r_hi, pc.power + shift, abs(pc.coef)) for pc in profile.active]
        cols = []
        P = self.pivot
        for lo, hi, e, c in self.pieces:
            below_hi = np.minimum(hi, P)
            above_lo = np.maximum(lo, P)
            cols.append((np.full_like(P, lo), below_hi, e, c * P ** (-decay)))
            cols.append((above_lo, np.full_like(P, hi), e - decay, np.full_like(P, c)))
        self.cols = cols
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            masses = np.stack([fac * _power_mass(e, lo, hi) for lo, hi, e, fac in cols], axis=1)
        if not np.all(np.isfinite(masses)):
            raise ValueError("radial proposal is not normalisable for this profile")
        self.total = masses.sum(axis=1)
        self.cum = np.cumsum(masses, axis=1) / self.total[:, None]

    def density(self, rho: np.ndarray) -> np.ndarray:
        out = np.zeros_like(rho)
        for lo, hi, e, c in self.pieces:
            m = (rho > lo) & (rho < hi)
            out = np.where(m, c * rho**e * np.maximum(rho, self.pivot) ** (-self.decay), out)
        return out / self.total

    def sample(self, u_seg: np.ndarray, u_pos: np.ndarray) -> np.ndarray:
        cum = np.broadcast_to(self.cum, (u_seg.size, self.cum.shape[1]))
        idx = (cum < u_seg[:, None]).sum(axis=1)
        idx = np.minimum(idx, len(self.cols) - 1)
        out = np.empty_like(u_pos)
        for i, (lo, hi, e, _) in enumerate(self.cols):
            m = idx == i
            if np.any(m):
                out[m] = _power_inverse(e, _pick(lo, m), _pick(hi, m), u_pos[m])
        return out


def _pick(a, m):
    a = np.asarray(a)
    return a[m] if a.size == m.size else np.full(int(m.sum()), a.ravel()[0])


def _power_mass(e: float, lo, hi):
    """int_lo^hi rho**e d rho, elementwise; empty ranges give 0."""
    lo, hi = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
    k = e + 1.0
    empty = hi <= lo
    if k == 0:
        val = np.log(hi / lo)
    else:
        top = np.where(np.isinf(hi), 0.0 if k < 0 else np.inf, hi**k)
        bot = np.where(lo == 0, 0.0 if k > 0 else np.inf, lo**k)
        val = (top - bot) / k
    return np.where(empty, 0.0, val)


def _power_inverse(e: float, lo, hi, u):
    k = e + 1.0
    if k == 0:
        return lo * (hi / lo) ** u
    top = np.where(np.isinf(hi), 0.0, hi**k)
    bot = np.where(lo == 0, 0.0, lo**k)
    return (bot + u * (top - bot)) ** (1.0 / k)


def _directions(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    if d == 1:
        return rng.choice(np.array([-1.0, 1.0]), size=(n, 1))
    v = rng.standard_normal((n, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _check_dim(params: RieszParams):
    if params.d > 3:
        raise UnsupportedDimension(f"Monte Carlo oracle supports d <= 3, got d={params.d}")


class _PointSampler:
    """Mixture proposal for y given points x (one y per x)."""

    def __init__(self, params: RieszParams, f: RadialProfile):
        self.params, self.f = params, f
        self.omega = sphere_area(params.d)

    def draw(self, rng, x: np.ndarray):
        d, lam = self.params.d, self.params.lam
        n = x.shape[0]
        xn = np.linalg.norm(x, axis=1)
        pick = rng.random(n) < 0.5
        prop = RadialProposal(self.f, d - 1 - self.params.alpha, xn, lam)
        rho = prop.sample(rng.random(n), rng.random(n))
        y1 = rho[:, None] * _directions(rng, n, d)
        rb = 0.5 * xn
        zr = rb * rng.random(n) ** (1.0 / (d - lam))
        y2 = x + zr[:, None] * _directions(rng, n, d)
        y = np.where(pick[:, None], y1, y2)
        yn = np.linalg.norm(y, axis=1)
        dist = np.linalg.norm(x - y, axis=1)
        q1 = prop.density(yn) / (self.omega * yn ** (d - 1))
        q2 = np.where(dist < rb, (d - lam) / (self.omega * rb ** (d - lam)) * dist ** (-lam), 0.0)
        q = 0.5 * q1 + 0.5 * q2
        with np.errstate(divide="ignore", invalid="ignore"):
            val = self.f(yn) * yn ** (-self.params.alpha) * dist ** (-lam)
            w = np.where(q > 0, val / q, 0.0)
        return w


def _combine(sums, sq, n, seed) -> McEstimate:
    s = math.fsum(sums)
    s2 = math.fsum(sq)
    mean = s / n
    var = max(s2 / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return McEstimate(mean, math.sqrt(var / n), n, seed)


def _blocks(n: int):
    full, rest = divmod(n, BLOCK)
    return [BLOCK] * full + ([rest] if rest else [])


def potential_at_point_mc(params: RieszParams, f: RadialProfile, x_norm: float, n: int = 10**6,
                          seed: int = 0, stream: int = 0) -> McEstimate:
    """Importance-sampled |x|**-beta int f(y) |y|**-alpha |x - y|**-lam dy at |x| = x_norm."""
    _check_dim(params)
    if x_norm <= 0:
        raise ValueError("x_norm must be positive")
    if f.is_zero:
        return McEstimate(0.0, 0.0, n, seed)
    d = params.d
    sampler = _PointSampler(params, f)
    x1 = np.zeros(d)
    x1[0] = x_norm
    pref = x_norm ** (-params.beta)
    sums, sq = [], []
    for b, size in enumerate(_blocks(n)):
        rng = _rng(seed, stream, b)
        w = pref * sampler.draw(rng, np.broadcast_to(x1, (size, d)))
        sums.append(float(w.sum()))
        sq.append(float((w * w).sum()))
    return _combine(sums, sq, n, seed)


def bilinear_mc(params: RieszParams, f: RadialProfile, g: RadialProfile, n: int = 10**6, seed: int = 0,
                stream: int = 0) -> McEstimate:
    """Importance-sampled B(f, g): x from a radial proposal for g, then y | x from the point sampler."""
    _check_dim(params)
    if f.is_zero or g.is_zero:
        return McEstimate(0.0, 0.0, n, seed)
    d = params.d
    omega = sphere_area(d)
    outer = RadialProposal(g, d - 1 - params.beta, 1.0, params.lam)
    sampler = _PointSampler(params, f)
    sums, sq = [], []
    for b, size in enumerate(_blocks(n)):
        rng = _rng(seed, stream, b)
        rho = outer.sample(rng.random(size), rng.random(size))
        x = rho[:, None] * _directions(rng, size, d)
        qx = outer.density(rho) / (omega * rho ** (d - 1))
        w = g(rho) * rho ** (-params.beta) / qx * sampler.draw(rng, x)
        sums.append(float(w.sum()))
        sq.append(float((w * w).sum()))
    return _combine(sums, sq, n, seed)
