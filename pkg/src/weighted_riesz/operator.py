"""The weighted Riesz potential on radial profiles.

For f(x) = H(|x|) the potential is radial too, and integrating over the
directions of y leaves

    u(r) = r**-beta * int_0^inf H(s) s**(d-1-alpha) Phi(r, s) ds.

In the variable x = log(s/r) the kernel is r**-lam * phi(x), so the s-integral
runs over a fixed mesh of offsets around the diagonal.  That mesh (graded
toward x = 0, uniform further out, closed-form beyond |x| = X) is built once
per (d, lam) together with the kernel values on it; only panels cut by a
piece boundary need fresh kernel evaluations.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from ._quad import exp_affine_integral, gauss_jacobi01, gauss_legendre01, panel_rule, power_log_integral
from .errors import DivergentNormError, NotInLError, QuadratureError
from .exponents import RieszParams, conjugate_q, exponent_chart
from .kernel import DEFAULT_KERNEL, AngularKernelConfig, kernel_diagonal_exponent, phi
from .profiles import (
    PowerLogPiece,
    QuadratureConfig,
    RadialProfile,
    in_L_interval,
    lp_norm_quad,
    sphere_area,
)

# beyond |log(s/r)| > FAR the kernel equals its far-field form to ~exp(-2 FAR)
FAR = 18.5
_ZERO_TOL = 1e-9


# --- the diagonal mesh ---------------------------------------------------------


@dataclass(frozen=True)
class _Mesh:
    edges: np.ndarray  # (n_panels, 2) offsets x = log(s/r)
    nodes: np.ndarray  # (n_panels, n)
    weights: np.ndarray  # (n_panels, n)
    phi: np.ndarray  # (n_panels, n)
    exponent: float  # diagonal exponent of the kernel


def _panel(a: float, b: float, n: int, e: float):
    """Nodes/weights on [a, b]; Gauss-Jacobi when an end sits on the singular diagonal."""
    if e < 0 and (a == 0.0 or b == 0.0):
        jx, jw = gauss_jacobi01(n, e)
        h = b - a
        w = h * jw / jx**e
        if a == 0.0:
            return a + h * jx, w
        return b - h * jx, w
    gx, gw = gauss_legendre01(n)
    return a + (b - a) * gx, (b - a) * gw


@lru_cache(maxsize=64)
def _diag_mesh(d: int, lam: float, levels: int, width: float, n: int, kcfg: AngularKernelConfig) -> _Mesh:
    e = kernel_diagonal_exponent(d, lam)
    pos = [0.0] + [width * 0.5**k for k in range(levels, -1, -1)]
    x = width + 1.0
    while x < FAR:
        pos.append(x)
        x += 1.0
    pos.append(FAR)
    pos = np.array(pos)
    panels = [(-b, -a) for a, b in zip(pos[::-1][1:], pos[::-1][:-1])] + list(zip(pos[:-1], pos[1:]))
    nodes, weights = zip(*(_panel(a, b, n, e) for a, b in panels))
    nodes, weights = np.array(nodes), np.array(weights)
    vals = phi(d, lam, nodes.ravel(), kcfg).reshape(nodes.shape)
    return _Mesh(np.array(panels), nodes, weights, vals, e)


# --- evaluation ----------------------------------------------------------------------


def _log(r: float) -> float:
    if r == 0.0:
        return -math.inf
    if math.isinf(r):
        return math.inf
    return math.log(r)


class PotentialEvaluator:
    """Pointwise evaluation of u = I f for a radial profile f."""

    def __init__(self, params: RieszParams, profile: RadialProfile, quad: QuadratureConfig | None = None,
                 kernel: AngularKernelConfig = DEFAULT_KERNEL, refine: int = 0):
        self.params = params
        self.profile = profile
        self.quad = quad or QuadratureConfig()
        self.kernel = kernel
        n = self.quad.nodes_per_panel + 8 * refine
        levels = 40 + 8 * refine
        self.mesh = _diag_mesh(params.d, params.lam, levels, self.quad.singular_split_width, n, kernel)
        self._n = n

    def __call__(self, r) -> np.ndarray:
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.zeros_like(r)
        for pc in self.profile.active:
            out += self._piece(pc, r)
        return out

    def _piece(self, pc: PowerLogPiece, r: np.ndarray) -> np.ndarray:
        d, alpha, beta, lam = self.params.d, self.params.alpha, self.params.beta, self.params.lam
        mesh = self.mesh
        m = pc.power + d - alpha
        b = pc.log_power
        s0 = np.log(r)
        xl = _log(pc.r_lo) - s0
        xh = _log(pc.r_hi) - s0
        lo_e, hi_e = mesh.edges[:, 0], mesh.edges[:, 1]

        # panels fully inside the piece
        full = (lo_e[None, :] >= xl[:, None]) & (hi_e[None, :] <= xh[:, None])
        expo = np.exp(mesh.nodes * m) * mesh.weights * mesh.phi
        if b == 0:
            mid = (full @ expo.sum(axis=1)) * np.exp(s0 * m)
        else:
            mid = np.zeros_like(r)
            for i in range(b + 1):
                si = (expo * mesh.nodes**i).sum(axis=1)
                mid += math.comb(b, i) * s0 ** (b - i) * (full @ si)
            mid *= np.exp(s0 * m)

        # panels cut by a piece boundary
        part = (~full) & (lo_e[None, :] < xh[:, None]) & (hi_e[None, :] > xl[:, None])
        ri, pj = np.nonzero(part)
        if ri.size:
            a = np.maximum(lo_e[pj], xl[ri])
            bb = np.minimum(hi_e[pj], xh[ri])
            xs, ws = [], []
            for aa, b2 in zip(a, bb):
                x_, w_ = _panel(float(aa), float(b2), self._n, mesh.exponent)
                xs.append(x_)
                ws.append(w_)
            xs, ws = np.array(xs), np.array(ws)
            ph = phi(d, lam, xs.ravel(), self.kernel).reshape(xs.shape)
            sig = s0[ri, None] + xs
            vals = ws * ph * np.exp(sig * m)
            if b:
                vals = vals * sig**b
            np.add.at(mid, ri, vals.sum(axis=1))

        out = pc.coef * r ** (-beta - lam) * mid

        # far field: Phi(r, s) = omega * max(r, s)**-lam
        omega = sphere_area(d)
        near_lo = r * math.exp(-FAR)
        near_hi = r * math.exp(FAR)
        for i, ri_ in enumerate(r):
            if pc.r_lo < near_lo[i]:
                out[i] += pc.coef * omega * ri_ ** (-beta - lam) * power_log_integral(
                    m, b, pc.r_lo, min(pc.r_hi, near_lo[i]))
            if pc.r_hi > near_hi[i]:
                out[i] += pc.coef * omega * ri_ ** (-beta) * power_log_integral(
                    m - lam, b, max(pc.r_lo, near_hi[i]), pc.r_hi)
        return out


# --- asymptotic models ----------------------------------------------------------------


@dataclass(frozen=True)
class Asymptote:
    """u(r) ~ r**base * sum_i coef_i * r**c_i * log(r)**k_i beyond ``edge``.

    ``side`` is "head" (r < edge) or "tail" (r > edge).  ``slope`` is the
    plain log-log regression slope over the fitted window, kept as a
    diagnostic of the leading power.
    """

    side: str
    base: float
    terms: tuple[tuple[float, int, float], ...]
    edge: float
    slope: float = float("nan")
    residual: float = 0.0

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        lr = np.log(r)
        return r**self.base * sum(c0 * r**c * lr**k for c, k, c0 in self.terms)

    def affine(self):
        """(A, B) when the model is r**base * (A log r + B), else None."""
        if any(c != 0 or k > 1 for c, k, _ in self.terms):
            return None
        A = sum(c0 for c, k, c0 in self.terms if k == 1)
        B = sum(c0 for c, k, c0 in self.terms if k == 0)
        return A, B

    def scaled(self, s: float) -> "Asymptote":
        return Asymptote(self.side, self.base, tuple((c, k, c0 * s) for c, k, c0 in self.terms),
                         self.edge, self.slope, self.residual)

    def to_dict(self) -> dict:
        return {"side": self.side, "power": self.base, "edge": self.edge, "loglog_slope": self.slope,
                "terms": [{"extra_power": c, "log_power": k, "coef": c0} for c, k, c0 in self.terms]}


def _asymptotic_basis(params: RieszParams, profile: RadialProfile, side: str):
    """Powers of the expansion of u near 0 or infinity, from the profile's end pieces."""
    d, alpha, beta, lam = params.d, params.alpha, params.beta, params.lam
    if side == "tail":
        base = -beta - lam
        pc = profile.tail_piece()
        mm = None if pc is None else pc.power + d - alpha
    else:
        base = -beta
        pc = profile.head_piece()
        mm = None if pc is None else pc.power + d - alpha - lam
    if mm is None:
        return base, [(0.0, 0)]
    b = pc.log_power
    if abs(mm) < _ZERO_TOL:
        return base, [(0.0, k) for k in range(b + 2)]
    terms = [(0.0, 0)]
    if abs(mm) < 2.0 or (side == "tail" and mm > 0) or (side == "head" and mm < 0):
        terms += [(mm, k) for k in range(b + 1)]
    return base, terms


def fit_asymptote(params, profile, radii, values, side: str) -> Asymptote:
    base, basis = _asymptotic_basis(params, profile, side)
    lr = np.log(radii)
    y = values * radii ** (-base)
    cols = np.stack([radii**c * lr**k for c, k in basis], axis=1)
    scale = np.abs(cols).max(axis=0)
    scale[scale == 0] = 1.0
    coef, *_ = np.linalg.lstsq(cols / scale, y, rcond=None)
    coef = coef / scale
    fit = cols @ coef
    resid = float(np.max(np.abs(fit - y)) / max(np.max(np.abs(y)), 1e-300))
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = float(np.polyfit(lr, np.log(np.abs(values)), 1)[0]) if np.all(values != 0) else float("nan")
    edge = float(radii[0] if side == "head" else radii[-1])
    return Asymptote(side, base, tuple((c, k, float(c0)) for (c, k), c0 in zip(basis, coef)), edge, slope, resid)


def _zero_asymptote(side: str, edge: float) -> Asymptote:
    return Asymptote(side, 0.0, ((0.0, 0, 0.0),), edge, float("nan"))


# --- radial integration ------------------------------------------------------------------


def _factor_of(obj, gamma):
    """(power, affine factors, constant) with |obj(r)|**gamma = const * r**power * prod (A t + B)**g,
    or (None, None, None) when no such form exists."""
    if isinstance(obj, PowerLogPiece):
        return obj.power * gamma, [(1.0, 0.0, obj.log_power * gamma)], abs(obj.coef) ** gamma
    if isinstance(obj, _PoweredAsymptote):
        p, fac, c = _factor_of(obj.asym, obj.gamma * gamma)
        if fac is None:
            return None, None, None
        return p, fac, c * abs(obj.scale) ** gamma
    aff = obj.affine()
    if aff is None:
        return None, None, None
    A, B = aff
    return obj.base * gamma, [(A, B, gamma)], 1.0


def _mp_value(obj, t):
    t = mpmath.mpf(t)
    if isinstance(obj, PowerLogPiece):
        return mpmath.mpf(obj.coef) * mpmath.exp(obj.power * t) * t**obj.log_power
    if isinstance(obj, _PoweredAsymptote):
        return obj.scale * abs(_mp_value(obj.asym, t)) ** obj.gamma
    r = mpmath.exp(t)
    s = sum(mpmath.mpf(c0) * r ** mpmath.mpf(c) * t**k for c, k, c0 in obj.terms)
    return r ** mpmath.mpf(obj.base) * s


def end_integral(parts, d: int, side: str, edge: float, outer: float | None = None):
    """int prod_i |F_i|**g_i r**(d-1) dr over the head (outer or 0, edge) or the tail (edge, outer or inf).

    ``parts`` is a list of (asymptote-or-piece, gamma).  Returns an mpmath
    number: for large powers the value can exceed the float range.
    """
    m = float(d)
    factors = []
    const = 1.0
    exact = True
    for obj, g in parts:
        p, fac, c = _factor_of(obj, g)
        if fac is None:
            exact = False
            break
        m += p
        factors += fac
        const *= c
    te = math.log(edge)
    if side == "head":
        t0, t1 = (-math.inf if outer is None else math.log(outer)), te
        probe = t1 - 1.0
    else:
        t0, t1 = te, (math.inf if outer is None else math.log(outer))
        probe = t0 + 1.0
    if exact:
        # |A t + B| = -(A t + B) where the factor is negative on the range
        factors = [(-A, -B, g) if A * probe + B < 0 else (A, B, g) for A, B, g in factors]
        try:
            with mpmath.workdps(40):
                return const * exp_affine_integral(m, factors, t0, t1)
        except ValueError:
            pass

    def f(t):
        v = mpmath.exp(d * t)
        for obj, g in parts:
            v *= abs(_mp_value(obj, t)) ** g
        return v

    with mpmath.workdps(30):
        if side == "head":
            pts = [-mpmath.inf if math.isinf(t0) else t0, te - 50, te - 5, te]
        else:
            pts = [te, te + 5, te + 50, mpmath.inf if math.isinf(t1) else t1]
        pts = [x for x in pts if t0 <= x <= t1]
        return mpmath.quad(f, pts)


def log_panels(r_lo: float, r_hi: float, breakpoints, quad: QuadratureConfig, per_decade: int):
    """Gauss-Legendre nodes in log r on [r_lo, r_hi], graded toward each breakpoint."""
    t0, t1 = math.log(r_lo), math.log(r_hi)
    n_pan = max(1, math.ceil((t1 - t0) / math.log(10.0) * per_decade))
    h = (t1 - t0) / n_pan
    edges = set(np.linspace(t0, t1, n_pan + 1).tolist())
    for bp in breakpoints:
        if r_lo < bp < r_hi:
            tb = math.log(bp)
            edges.add(tb)
            for k in range(quad.grading_levels + 1):
                off = h * 0.5**k
                for x in (tb - off, tb + off):
                    if t0 < x < t1:
                        edges.add(x)
    t, w = panel_rule(np.array(sorted(edges)), quad.nodes_per_panel)
    return np.exp(t), w


# --- sampled potential -------------------------------------------------------------------


@dataclass
class SampledPotential:
    """u on a geometric grid with analytic head/tail models and an exact evaluator."""

    params: RieszParams
    radii: np.ndarray
    values: np.ndarray
    head: Asymptote
    tail: Asymptote
    evaluator: object = None
    breakpoints: tuple = ()
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    label: str = ""
    _nodes: tuple | None = field(default=None, repr=False)

    @property
    def head_exponents(self):
        return [(self.head.base + c, k) for c, k, _ in self.head.terms]

    @property
    def tail_exponents(self):
        return [(self.tail.base + c, k) for c, k, _ in self.tail.terms]

    def exact(self, r) -> np.ndarray:
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if self.evaluator is None:
            return self(r)
        return self.evaluator(r)

    def __call__(self, r) -> np.ndarray:
        """Local power-law interpolation inside the grid, asymptotic models outside."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        lr, lx = np.log(r), np.log(self.radii)
        out = np.empty_like(r)
        inside = (r >= self.radii[0]) & (r <= self.radii[-1])
        pos = np.all(self.values > 0)
        if pos:
            out[inside] = np.exp(np.interp(lr[inside], lx, np.log(self.values)))
        else:
            out[inside] = np.interp(lr[inside], lx, self.values)
        out[r < self.radii[0]] = self.head(r[r < self.radii[0]])
        out[r > self.radii[-1]] = self.tail(r[r > self.radii[-1]])
        return out

    def quadrature_nodes(self):
        """Nodes, weights (in log r) and exact values on [r_min, r_max]; cached."""
        if self._nodes is None:
            rr, w = log_panels(self.radii[0], self.radii[-1], self.breakpoints, self.quad,
                               self.quad.potential_panels_per_decade)
            self._nodes = (rr, w, self.exact(rr))
        return self._nodes

    def lq_pth_power(self, q: float, scale: float = 1.0):
        """omega * int |scale * u|**q r**(d-1) dr (an mpmath number)."""
        d = self.params.d
        rr, w, u = self.quadrature_nodes()
        total = mpmath.mpf(float(np.sum(w * np.abs(scale * u) ** q * rr**d)))
        if self._nonzero(self.head):
            total += end_integral([(_scaled(self.head, scale), q)], d, "head", self.radii[0])
        if self._nonzero(self.tail):
            total += end_integral([(_scaled(self.tail, scale), q)], d, "tail", self.radii[-1])
        return sphere_area(d) * total

    def lq_norm(self, q: float) -> float:
        big = float(np.max(np.abs(self.quadrature_nodes()[2])))
        if math.isinf(q) or big == 0:
            return big
        # factor out the maximum so large q cannot overflow
        with mpmath.workdps(30):
            return big * float(self.lq_pth_power(q, 1.0 / big) ** (1.0 / mpmath.mpf(q)))

    @staticmethod
    def _nonzero(asym: Asymptote) -> bool:
        return any(c0 != 0 for _, _, c0 in asym.terms)

    def powered(self, gamma: float, scale: float = 1.0) -> "SampledPotential":
        """scale * |u|**gamma, sharing grid, breakpoints and quadrature."""
        ev = self.evaluator
        g = _PoweredEvaluator(ev if ev is not None else self, gamma, scale)
        return SampledPotential(
            params=self.params,
            radii=self.radii,
            values=scale * np.abs(self.values) ** gamma,
            head=_PoweredAsymptote(self.head, gamma, scale),
            tail=_PoweredAsymptote(self.tail, gamma, scale),
            evaluator=g,
            breakpoints=self.breakpoints,
            quad=self.quad,
            label=f"{scale:g}*|{self.label}|^{gamma:g}",
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["r", "u"])
        for r, u in zip(self.radii, self.values):
            wr.writerow([repr(float(r)), repr(float(u))])
        return buf.getvalue()

    def sidecar(self) -> dict:
        return {"label": self.label, "d": self.params.d, "alpha": self.params.alpha, "beta": self.params.beta,
                "lambda": self.params.lam, "head": self.head.to_dict(), "tail": self.tail.to_dict()}


def _scaled(asym, s: float):
    if s == 1.0:
        return asym
    if isinstance(asym, _PoweredAsymptote):
        return _PoweredAsymptote(asym.asym, asym.gamma, asym.scale * s)
    return asym.scaled(s)


class _PoweredEvaluator:
    def __init__(self, base, gamma, scale):
        self.base, self.gamma, self.scale = base, gamma, scale

    def __call__(self, r):
        base = self.base.exact if isinstance(self.base, SampledPotential) else self.base
        return self.scale * np.abs(base(r)) ** self.gamma


class _PoweredAsymptote:
    """scale * |A|**gamma for an asymptote A; integrates in closed form with A's own powers."""

    def __init__(self, asym: Asymptote, gamma: float, scale: float):
        self.asym, self.gamma, self.scale = asym, gamma, scale
        self.side, self.edge = asym.side, asym.edge
        self.terms = asym.terms

    def __call__(self, r):
        return self.scale * np.abs(self.asym(r)) ** self.gamma


# --- operator API ---------------------------------------------------------------------------


def _check_membership(params, f):
    chart = exponent_chart(params)
    if not in_L_interval(f, chart.p_minus, chart.p_plus, params):
        raise NotInLError(f"profile {f.label!r} is not in L(p_-, p_+) = L({chart.p_minus:.6g}, {chart.p_plus:.6g})")


def apply(params: RieszParams, f: RadialProfile, cfg: QuadratureConfig | None = None,
          kernel: AngularKernelConfig = DEFAULT_KERNEL, threads: int = 1, check: bool = True) -> SampledPotential:
    """Sample u = I f on the configured geometric grid."""
    cfg = cfg or QuadratureConfig()
    _check_membership(params, f)
    grid = cfg.grid()
    ev = PotentialEvaluator(params, f, cfg, kernel)
    if f.is_zero:
        vals = np.zeros_like(grid)
        z = _zero_asymptote
        return SampledPotential(params, grid, vals, z("head", grid[0]), z("tail", grid[-1]), ev,
                                tuple(f.breakpoints()), cfg, f"I[{f.label}]")
    if threads > 1:
        chunks = np.array_split(grid, threads)
        with ThreadPoolExecutor(threads) as pool:
            vals = np.concatenate(list(pool.map(ev, chunks)))
    else:
        vals = ev(grid)
    if check:
        spot = grid[:: max(1, len(grid) // 24)]
        ref = PotentialEvaluator(params, f, cfg, kernel, refine=1)(spot)
        err = np.max(np.abs(ev(spot) - ref) / np.maximum(np.abs(ref), 1e-300))
        if err > cfg.rel_tol:
            raise QuadratureError(f"potential refinement check failed: rel. difference {err:.3g} > {cfg.rel_tol:g}")
    nfit = max(8, cfg.points_per_decade + 1)
    head = fit_asymptote(params, f, grid[:nfit], vals[:nfit], "head")
    tail = fit_asymptote(params, f, grid[-nfit:], vals[-nfit:], "tail")
    return SampledPotential(params, grid, vals, head, tail, ev, tuple(f.breakpoints()), cfg, f"I[{f.label}]")


def dilation_identity_check(params, f: RadialProfile, t: float, cfg: QuadratureConfig | None = None) -> float:
    """Max relative deviation of I[f(t .)](r) from t**(d(kappa-1)) u(t r) over the grid."""
    cfg = cfg or QuadratureConfig()
    if t <= 0:
        raise ValueError("t must be positive")
    if t == 1:
        return 0.0
    lhs = apply(params, f.dilated(t), cfg)
    rhs = t ** (params.d * (params.kappa - 1.0)) * PotentialEvaluator(params, f, cfg)(t * lhs.radii)
    return float(np.max(np.abs(lhs.values - rhs) / np.maximum(np.abs(rhs), 1e-300)))


def _inner(u: SampledPotential, g, cfg: QuadratureConfig) -> float:
    """omega * int u(r) G(r) r**(d-1) dr for a profile or sampled G."""
    d = u.params.d
    bps = set(u.breakpoints)
    if isinstance(g, RadialProfile):
        bps |= set(g.breakpoints())
    else:
        bps |= set(g.breakpoints)
    r_lo, r_hi = u.radii[0], u.radii[-1]
    rr, w = log_panels(r_lo, r_hi, sorted(bps), cfg, cfg.potential_panels_per_decade)
    if isinstance(g, RadialProfile):
        gv = g(rr)
        keep = gv != 0
        rr, w, gv = rr[keep], w[keep], gv[keep]
        uv = u.exact(rr) if rr.size else np.zeros(0)
    else:
        uv = u.exact(rr)
        gv = g.exact(rr)
    total = float(np.sum(w * uv * gv * rr**d))
    total += _end_inner(u, g, d, "head", r_lo)
    total += _end_inner(u, g, d, "tail", r_hi)
    return sphere_area(d) * total


def _end_inner(u: SampledPotential, g, d: int, side: str, edge: float) -> float:
    ua = u.head if side == "head" else u.tail
    if not SampledPotential._nonzero(ua):
        return 0.0
    if isinstance(g, RadialProfile):
        total = 0.0
        for pc in g.active:
            if side == "head" and pc.r_lo < edge:
                lo, hi = pc.r_lo, min(pc.r_hi, edge)
                total += _signed_end(ua, pc, d, side, lo, hi)
            if side == "tail" and pc.r_hi > edge:
                lo, hi = max(pc.r_lo, edge), pc.r_hi
                total += _signed_end(ua, pc, d, side, lo, hi)
        return total
    ga = g.head if side == "head" else g.tail
    if isinstance(ga, _PoweredAsymptote) and ga.asym is ua:
        return float(ga.scale * end_integral([(ua, 1.0 + ga.gamma)], d, side, edge))
    return _mp_product(ua, ga, d, side, edge)


def _signed_end(ua: Asymptote, pc: PowerLogPiece, d: int, side: str, lo: float, hi: float) -> float:
    """int_lo^hi u_model(r) * piece(r) r**(d-1) dr; integer log powers so closed form by expansion."""
    m = d + ua.base + pc.power
    total = mpmath.mpf(0)
    t0, t1 = _log(lo), _log(hi)
    for c, k, c0 in ua.terms:
        if c0 == 0:
            continue
        total += c0 * exp_affine_integral(m + c, [(1.0, 0.0, k + pc.log_power)], t0, t1)
    return float(pc.coef * total)


def _mp_product(a, b, d, side, edge):
    def f(t):
        return mpmath.exp(d * t) * _mp_value(a, t) * _mp_value(b, t)

    te = math.log(edge)
    with mpmath.workdps(30):
        if side == "head":
            return float(mpmath.quad(f, [-mpmath.inf, te - 50, te - 5, te]))
        return float(mpmath.quad(f, [te, te + 5, te + 50, mpmath.inf]))


def bilinear(params: RieszParams, f: RadialProfile, g, cfg: QuadratureConfig | None = None,
             u: SampledPotential | None = None) -> float:
    """B(f, g) = (I f, g) for radial f and radial (profile or sampled) g."""
    cfg = cfg or QuadratureConfig()
    if isinstance(g, RadialProfile) and g.is_zero:
        return 0.0
    u = u if u is not None else apply(params, f, cfg)
    return _inner(u, g, cfg)


@dataclass(frozen=True)
class RatioResult:
    p: float
    q: float
    norm_f: float
    norm_u: float
    ratio: float


def riesz_ratio(params, f: RadialProfile, p: float, cfg: QuadratureConfig | None = None,
                u: SampledPotential | None = None, q: float | None = None) -> RatioResult:
    """|I f|_q / |f|_p with q = q(p) on the conjugate line unless ``q`` is forced."""
    cfg = cfg or QuadratureConfig()
    gp = conjugate_q(exponent_chart(params), p)
    q = gp.q if q is None else q
    if f.is_zero:
        raise ValueError("ratio undefined for the zero profile")
    u = u if u is not None else apply(params, f, cfg)
    nf = lp_norm_quad(f, p, params, cfg)
    nu = u.lq_norm(q)
    return RatioResult(p, q, nf, nu, nu / nf)


@dataclass
class DualityWitness:
    g_star: SampledPotential
    gap: float
    norm_u: float


def duality_witness(params, f: RadialProfile, p: float, cfg: QuadratureConfig | None = None,
                    u: SampledPotential | None = None) -> DualityWitness:
    """Hoelder extremal g* = u**(q-1) / |u|_q**(q-1) and the gap |B(f, g*) - |If|_q|."""
    cfg = cfg or QuadratureConfig()
    q = conjugate_q(exponent_chart(params), p).q
    u = u if u is not None else apply(params, f, cfg)
    nu = u.lq_norm(q)
    if nu == 0:
        raise DivergentNormError("potential vanishes; no witness")
    g_star = u.powered(q - 1.0, nu ** (1.0 - q))
    b = bilinear(params, f, g_star, cfg, u=u)
    return DualityWitness(g_star, abs(b - nu), nu)
