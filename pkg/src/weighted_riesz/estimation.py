"""Endpoint behaviour of the p -> q(p) operator norm.

Sweeps of the ratio |I f|_q / |f|_p towards both ends of (p_-, p_+), log-log
slope fits, the compensated constant, and a nonlinear power iteration that
produces lower bounds for the operator norm itself.

The power iteration works in dilation-normalised variables.  Writing
F(tau) = H(e^tau) e^{d tau / p} and U(sigma) = u(e^sigma) e^{d sigma / q},
the operator becomes a correlation on the line,

    U(sigma) = int F(tau) k(tau - sigma) dtau,   k(x) = e^{c x} phi(x),
    c = d - alpha - d/p,

and |H|_p^p = omega_d int |F|^p, |u|_q^q = omega_d int |U|^q.  F is
represented by hat functions on a uniform tau grid over a window long enough
for the iterates to decay; the discrete adjoint is the matrix transpose, so
the iteration is monotone exactly as in the continuous setting.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from ._quad import gauss_legendre01, graded_edges
from .errors import InsufficientData, NonPositiveIterate, NotInLError, OutOfRangeError
from .exponents import ExponentChart, RieszParams, conjugate_q, exponent_chart
from .kernel import DEFAULT_KERNEL, AngularKernelConfig, kernel_diagonal_exponent, phi
from .operator import FAR, _panel, apply, riesz_ratio
from .profiles import QuadratureConfig, RadialProfile, in_L_interval, sphere_area

CSV_HEADER = ("p", "q", "norm_f", "norm_u", "ratio", "compensated")
FIT_WINDOW = 5
SLOPE_TOL = 0.1


@dataclass(frozen=True)
class SweepRow:
    p: float
    q: float
    norm_f: float
    norm_u: float
    ratio: float
    compensated: float


def compensate(chart: ExponentChart, p: float, ratio: float) -> float:
    return ratio * ((p - chart.p_minus) * (chart.p_plus - p)) ** chart.kappa


def sweep_points(chart: ExponentChart, eps_grid) -> list[float]:
    span = chart.p_plus - chart.p_minus
    pts = []
    for eps in eps_grid:
        if not 0 < eps < 0.5:
            raise OutOfRangeError(f"eps must lie in (0, 1/2), got {eps}")
        pts += [chart.p_minus + eps * span, chart.p_plus - eps * span]
    return sorted(pts)


def sweep(params: RieszParams, f: RadialProfile, eps_grid, cfg: QuadratureConfig | None = None,
          threads: int = 1) -> list[SweepRow]:
    """Ratio rows at p = p_- + eps (p_+ - p_-) and p = p_+ - eps (p_+ - p_-), sorted by p."""
    cfg = cfg or QuadratureConfig()
    chart = exponent_chart(params)
    pts = sweep_points(chart, eps_grid)
    if not pts:
        return []
    u = apply(params, f, cfg, threads=threads)

    def row(p):
        r = riesz_ratio(params, f, p, cfg, u=u)
        return SweepRow(p, r.q, r.norm_f, r.norm_u, r.ratio, compensate(chart, p, r.ratio))

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(row, pts))
    return [row(p) for p in pts]


@dataclass(frozen=True)
class FitReport:
    endpoint: str
    slope: float
    intercept: float
    residual: float
    points_used: int
    full_slope: float  # slope over every row on that side, for reference
    kappa: float

    @property
    def passed(self) -> bool:
        return abs(self.slope + self.kappa) <= SLOPE_TOL


def _side_rows(rows, endpoint: str, chart: ExponentChart):
    mid = 0.5 * (chart.p_minus + chart.p_plus)
    if endpoint == "lower":
        sel = [(r.p - chart.p_minus, r) for r in rows if r.p < mid]
    elif endpoint == "upper":
        sel = [(chart.p_plus - r.p, r) for r in rows if r.p > mid]
    else:
        raise ValueError("endpoint must be 'lower' or 'upper'")
    return sorted(sel, key=lambda t: t[0])


def _lsq(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    res = float(np.sqrt(np.mean((A @ [slope, icpt] - y) ** 2)))
    return float(slope), float(icpt), res


def fit_endpoint_exponent(rows, endpoint: str, chart: ExponentChart, window: int | None = FIT_WINDOW) -> FitReport:
    """Slope of log(ratio) against log of the distance to one endpoint.

    The fit uses the ``window`` rows closest to the endpoint (all of them when
    ``window`` is None); rows far from the endpoint carry the profile's
    pre-asymptotic shape and bias the slope towards zero.
    """
    sel = _side_rows(rows, endpoint, chart)
    if len(sel) < FIT_WINDOW:
        raise InsufficientData(f"need >= {FIT_WINDOW} rows on the {endpoint} side, got {len(sel)}")
    x_all = np.log([t for t, _ in sel])
    y_all = np.log([r.ratio for _, r in sel])
    full, _, _ = _lsq(x_all, y_all)
    n = len(sel) if window is None else max(FIT_WINDOW, window)
    slope, icpt, res = _lsq(x_all[:n], y_all[:n])
    return FitReport(endpoint, slope, icpt, res, min(n, len(sel)), full, chart.kappa)


def lower_bound_constant(rows) -> float:
    """Smallest compensated ratio over the rows."""
    if not rows:
        raise InsufficientData("no rows")
    return min(r.compensated for r in rows)


def envelope_boundedness(rows) -> dict:
    """max/min of the compensated values (a consistency check of the upper bound, not a proof)."""
    if not rows:
        raise InsufficientData("no rows")
    vals = [r.compensated for r in rows]
    return {"max_over_min": max(vals) / min(vals), "max": max(vals), "min": min(vals), "check": "consistency"}


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([repr(float(getattr(r, k))) for k in CSV_HEADER])
    return buf.getvalue()


def rows_to_dicts(rows) -> list[dict]:
    return [asdict(r) for r in rows]


# --- power iteration -----------------------------------------------------------


@dataclass(frozen=True)
class PowerConfig:
    step: float = 0.05
    tail_decay: float = 32.0  # window reaches exp(-tail_decay) in |F|^p
    min_half_width: float = 40.0
    max_points: int = 1 << 21
    nodes: int = 24
    levels: int = 40


def _kernel_weights(params: RieszParams, p: float, h: float, n: int, pc: PowerConfig,
                    kcfg: AngularKernelConfig) -> np.ndarray:
    """c_m = int hat(x/h - m) k(x) dx for m = -(n-1)..(n-1)."""
    d, lam = params.d, params.lam
    c = d - params.alpha - d / p
    omega = sphere_area(d)
    e = kernel_diagonal_exponent(d, lam)
    m_near = int(math.ceil(FAR / h)) + 1
    ms = np.arange(-(n - 1), n)
    out = np.empty(ms.size)
    near = np.abs(ms) <= m_near
    # near field: quadrature against phi on the two panels of each hat
    xs, ws, owner = [], [], []
    gx, gw = gauss_legendre01(pc.nodes)
    for i in np.nonzero(near)[0]:
        m = ms[i]
        for a, b, up in ((h * (m - 1), h * m, True), (h * m, h * (m + 1), False)):
            if a == 0.0 or b == 0.0:
                edges = graded_edges(a, b, a == 0.0, pc.levels)
                pieces = [_panel(lo, hi, pc.nodes, e) for lo, hi in zip(edges[:-1], edges[1:])]
                x = np.concatenate([q[0] for q in pieces])
                w = np.concatenate([q[1] for q in pieces])
            else:
                x, w = a + (b - a) * gx, (b - a) * gw
            # hat weight: rises on the left panel, falls on the right one
            hat = (x - a) / h if up else (b - x) / h
            xs.append(x)
            ws.append(w * hat)
            owner.append(np.full(x.size, i))
    x = np.concatenate(xs)
    vals = np.exp(c * x) * phi(d, lam, x, kcfg)
    out[near] = 0.0
    np.add.at(out, np.concatenate(owner), np.concatenate(ws) * vals)
    # far field: k(x) = omega exp(r x) with r = c - lam (x > 0) or c (x < 0)
    far = ~near
    rate = np.where(ms > 0, c - lam, c)[far]
    z = rate * h
    g = np.where(np.abs(z) < 1e-6, 1.0 + z * z / 12.0, (np.sinh(z / 2) / np.where(z == 0, 1.0, z / 2)) ** 2)
    out[far] = omega * h * np.exp(rate * h * ms[far]) * g
    return out


@dataclass
class PowerResult:
    p: float
    q: float
    v_lower: float
    iterate_ratios: list = field(default_factory=list)
    converged: bool = False
    grid: np.ndarray | None = None
    f_final: np.ndarray | None = None


def _normalised_samples(profile: RadialProfile, tau: np.ndarray, shift: float) -> np.ndarray:
    """H(e^tau) e^{shift tau}, evaluated in log form so that |tau| may exceed the float exponent range."""
    out = np.zeros_like(tau)
    for pc in profile.active:
        lo = -math.inf if pc.r_lo == 0 else math.log(pc.r_lo)
        hi = math.log(pc.r_hi)
        m = (tau >= lo) & (tau <= hi)
        t = tau[m]
        val = np.sign(pc.coef) * np.exp(math.log(abs(pc.coef)) + (pc.power + shift) * t)
        if pc.log_power:
            val = val * t**pc.log_power
        # a node on a breakpoint gets the mean of the one-sided limits
        val = np.where((t == lo) | (t == hi), 0.5 * val, val)
        out[m] += val
    return out


def _norm(x: np.ndarray, r: float, omega_h: float) -> float:
    m = float(np.max(np.abs(x)))
    if m == 0:
        return 0.0
    return m * (omega_h * float(np.sum((np.abs(x) / m) ** r))) ** (1.0 / r)


def _window(chart: ExponentChart, p: float, pc: PowerConfig) -> tuple[float, float]:
    d = chart.params.d
    a_right = d / chart.p_minus - d / p  # decay rate of F as tau -> +inf (profiles like f0)
    a_left = d / p - d / chart.p_plus  # and as tau -> -inf (profiles like g0)
    return (max(pc.min_half_width, pc.tail_decay / (p * a_left)),
            max(pc.min_half_width, pc.tail_decay / (p * a_right)))


def power_method_estimate(params: RieszParams, p: float, f_init: RadialProfile, max_iter: int = 20,
                          cfg: PowerConfig | None = None, kcfg: AngularKernelConfig = DEFAULT_KERNEL,
                          rel_stop: float = 1e-6) -> PowerResult:
    """Nonlinear power iteration for the p -> q(p) norm, started from f_init."""
    pc = cfg or PowerConfig()
    chart = exponent_chart(params)
    q = conjugate_q(chart, p).q
    if not in_L_interval(f_init, chart.p_minus, chart.p_plus, params):
        raise NotInLError(f"profile {f_init.label!r} is not in L(p_-, p_+)")
    if f_init.is_zero or not f_init.is_nonnegative():
        raise NonPositiveIterate("initial profile must be nonnegative and nonzero")
    left, right = _window(chart, p, pc)
    h = pc.step
    n_left, n_right = int(math.ceil(left / h)), int(math.ceil(right / h))
    if n_left + n_right + 1 > pc.max_points:
        scale = pc.max_points / (n_left + n_right + 1)
        n_left, n_right = int(n_left * scale), int(n_right * scale)
    tau = h * np.arange(-n_left, n_right + 1)
    n = tau.size
    F = _normalised_samples(f_init, tau, params.d / p)
    cw = _kernel_weights(params, p, h, n, pc, kcfg)
    omega_h = sphere_area(params.d) * h
    p_dual = p / (p - 1.0)

    def forward(x):
        return np.maximum(fftconvolve(x, cw[::-1])[n - 1:2 * n - 1], 0.0)

    def backward(x):
        return np.maximum(fftconvolve(x, cw)[n - 1:2 * n - 1], 0.0)

    trace = []
    converged = False
    for it in range(max_iter + 1):
        nf = _norm(F, p, omega_h)
        if nf == 0:
            raise NonPositiveIterate(f"iterate {it} vanished")
        F = F / nf
        U = forward(F)
        nu = _norm(U, q, omega_h)
        if nu == 0:
            raise NonPositiveIterate(f"potential of iterate {it} vanished")
        trace.append(nu)
        if it and abs(trace[-1] - trace[-2]) <= rel_stop * trace[-1]:
            converged = True
            break
        if it == max_iter:
            break
        mu = float(U.max())
        G = (U / mu) ** (q - 1.0)
        V = backward(G)
        mv = float(V.max())
        if mv == 0:
            raise NonPositiveIterate(f"adjoint of iterate {it} vanished")
        F = (V / mv) ** (p_dual - 1.0)
    return PowerResult(p, q, trace[-1], trace, converged, tau, F)


def power_sweep(params: RieszParams, f_init: RadialProfile, eps_grid, max_iter: int = 20,
                cfg: PowerConfig | None = None, threads: int = 1) -> list[SweepRow]:
    """Power-method lower bounds across the eps grid, as rows (norm_f = 1)."""
    chart = exponent_chart(params)
    pts = sweep_points(chart, eps_grid)

    def row(p):
        res = power_method_estimate(params, p, f_init, max_iter, cfg)
        return SweepRow(p, res.q, 1.0, res.v_lower, res.v_lower, compensate(chart, p, res.v_lower))

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(row, pts))
    return [row(p) for p in pts]
