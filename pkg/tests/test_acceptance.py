"""Acceptance criteria, one test per criterion.

Each test prints a single ``[criterion N] PASS|FAIL ...`` line with the
measured quantities, then asserts.  Tolerances are fixed here and must not
be relaxed to make a run pass.
"""

import math
import time

import numpy as np
import pytest

from weighted_riesz import (
    angular_kernel,
    apply,
    bilinear,
    duality_witness,
    envelope_boundedness,
    exponent_chart,
    fit_endpoint_exponent,
    lower_bound_constant,
    lp_norm_closed,
    lp_norm_quad,
    make_f0,
    make_g0,
    make_h,
    phi,
    potential_at_point_mc,
    power_method_estimate,
    riesz_ratio,
    sphere_area,
    sweep,
    validate_params,
)
from weighted_riesz.cli import main as cli_main
from weighted_riesz.estimation import SweepRow, compensate, sweep_points
from helpers import CONFIG_3D, CONFIG_A, ENDPOINT_CONFIGS, EPS_GRID, random_params, random_profile

# pinned tolerances
CHART_REL = 1e-12
NORM_REL = 1e-8
KERNEL_IDENTITY_REL = 1e-10
KERNEL_CLOSED_REL = 1e-9
MC_Z = 3.0
MC_SAMPLES = 10**6
DUALITY_REL = 1e-6
ADJOINT_REL = 1e-6
DILATION_REL = 1e-3
OFF_LINE_MIN_DEV = 0.05
SLOPE_TOL = 0.1
MONOTONE_SLACK = 1e-6
DOMINANCE_SLACK = 1e-4


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'}: {detail}")
    return emit


def test_c01_exponent_chart(report):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst, kappa_ok = 0.0, True
    for i in range(1000):
        P = random_params(rng)
        if i % 10 == 0:
            P = validate_params(P.d, P.alpha, 0.0, P.lam)
        ch = exponent_chart(P)
        kappa_ok &= 0 < ch.kappa < 1
        worst = max(worst, abs(ch.q_of_p(ch.p_minus) / ch.q_minus - 1))
        qp = ch.q_of_p(ch.p_plus)
        if math.isinf(ch.q_plus):
            worst = max(worst, 0.0 if math.isinf(qp) else math.inf)
        else:
            worst = max(worst, abs(qp / ch.q_plus - 1))
    dt = time.perf_counter() - t0
    ok = worst <= CHART_REL and kappa_ok and dt < 1.0
    report(1, ok, f"max rel. endpoint error {worst:.2e} (tol {CHART_REL:g}), kappa in (0,1): {kappa_ok}, {dt:.3f}s")
    assert ok


def test_c02_closed_form_norms(report):
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        P = random_params(rng, d=int(rng.integers(1, 5)))
        ch = exponent_chart(P)
        p = ch.p_minus + rng.uniform(0.02, 0.98) * (ch.p_plus - ch.p_minus)
        for f in (make_f0(P), make_g0(P)):
            worst = max(worst, abs(lp_norm_quad(f, p, P) / lp_norm_closed(f, p, P) - 1))
    dt = time.perf_counter() - t0
    ok = worst <= NORM_REL and dt < 10
    report(2, ok, f"max rel. quadrature/closed-form difference {worst:.2e} over 50 pairs (tol {NORM_REL:g}), {dt:.2f}s")
    assert ok


def test_c03_kernel_identities(report):
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    sym = hom = 0.0
    for _ in range(200):
        d = int(rng.integers(1, 6))
        lam = float(rng.uniform(0.05, 0.95) * d)
        r, s = np.exp(rng.uniform(-4, 4, 2))
        t = float(np.exp(rng.uniform(-3, 3)))
        a = angular_kernel(d, lam, r, s)
        sym = max(sym, abs(angular_kernel(d, lam, s, r) / a - 1))
        hom = max(hom, abs(angular_kernel(d, lam, t * r, t * s) / (t**-lam * a) - 1))
    # d = 3: generic angular quadrature against the closed form
    x = np.concatenate([-np.geomspace(1e-9, 35, 200), np.geomspace(1e-9, 35, 200)])
    d3 = max(float(np.max(np.abs(phi(3, lam, x, method="quadrature") / phi(3, lam, x, method="closed") - 1)))
             for lam in (0.2, 0.7, 1.0, 1.6, 2.0, 2.5, 2.9))
    # d = 1: the sphere is {-1, +1}; compare with the two-point average of the definition
    d1 = 0.0
    for lam in (0.1, 0.5, 0.9):
        r, s = 1.0, np.exp(np.linspace(-8, 8, 301))
        s = s[s != 1.0]
        direct = np.abs(r - s) ** -lam + np.abs(r + s) ** -lam
        d1 = max(d1, float(np.max(np.abs(np.array([angular_kernel(1, lam, r, v) for v in s]) / direct - 1))))
    # s = 0: generic path at s -> 0 against sphere_area * r^-lam
    s0 = 0.0
    for d in (2, 3, 4, 5):
        for lam in (0.3 * d, 0.6 * d, 0.9 * d):
            v = phi(d, lam, -60.0, method="quadrature")
            s0 = max(s0, abs(v / sphere_area(d) - 1))
    dt = time.perf_counter() - t0
    ok = max(sym, hom) <= KERNEL_IDENTITY_REL and max(d1, d3, s0) <= KERNEL_CLOSED_REL and dt < 30
    report(3, ok, f"symmetry {sym:.1e}, homogeneity {hom:.1e} (tol {KERNEL_IDENTITY_REL:g}); "
                  f"closed forms d=1 {d1:.1e}, d=3 {d3:.1e}, s=0 {s0:.1e} (tol {KERNEL_CLOSED_REL:g}); {dt:.1f}s")
    assert ok


def test_c04_radial_reduction_vs_monte_carlo(report):
    t0 = time.perf_counter()
    configs = [CONFIG_A, (2, 0.5, 0.3, 1.0), CONFIG_3D]
    radii = [0.1, 0.5, 1.5, 4.0, 10.0]
    zmax = 0.0
    for k, cfg in enumerate(configs):
        P = validate_params(*cfg)
        f = make_h(P)
        u = apply(P, f)
        for i, r in enumerate(radii):
            est = potential_at_point_mc(P, f, r, MC_SAMPLES, seed=20240 + k, stream=i)
            exact = float(u.exact(np.array([r]))[0])
            zmax = max(zmax, abs(est.value - exact) / est.std_err)
    dt = time.perf_counter() - t0
    ok = zmax <= MC_Z and dt < 300
    report(4, ok, f"max |apply - MC| / std_err = {zmax:.2f} over 5 radii x 3 configs, n={MC_SAMPLES} (limit {MC_Z}), {dt:.0f}s")
    assert ok


def test_c05_duality_witness(report):
    rng = np.random.default_rng(55)
    worst = 0.0
    for i in range(10):
        P = random_params(rng, d=int(rng.integers(1, 4)))
        f = make_h(P) if i < 3 else random_profile(rng, P)
        ch = exponent_chart(P)
        p = ch.p_minus + rng.uniform(0.1, 0.9) * (ch.p_plus - ch.p_minus)
        w = duality_witness(P, f, p)
        worst = max(worst, w.gap / w.norm_u)
    ok = worst <= DUALITY_REL
    report(5, ok, f"max |B(f, g*) - |If|_q| / |If|_q = {worst:.2e} over 10 cases (tol {DUALITY_REL:g})")
    assert ok


def test_c06_adjoint_symmetry(report):
    rng = np.random.default_rng(66)
    worst = 0.0
    for _ in range(20):
        P = random_params(rng, d=int(rng.integers(1, 4)))
        f, g = random_profile(rng, P), random_profile(rng, P.swapped())
        b1 = bilinear(P, f, g)
        b2 = bilinear(P.swapped(), g, f)
        worst = max(worst, abs(b1 - b2) / abs(b1))
    ok = worst <= ADJOINT_REL
    report(6, ok, f"max rel. |B(f,g) - B*(g,f)| = {worst:.2e} over 20 random pairs (tol {ADJOINT_REL:g})")
    assert ok


def test_c07_line_G_necessity(report):
    on_line, off_line, analytic = 0.0, math.inf, 0.0
    for cfg in ENDPOINT_CONFIGS:
        P = validate_params(*cfg)
        ch = exponent_chart(P)
        f = make_h(P)
        p = ch.p_minus + 0.1 * (ch.p_plus - ch.p_minus)
        q0 = ch.q_of_p(p)
        base = riesz_ratio(P, f, p)
        for t in (0.25, 4.0):
            on_line = max(on_line, abs(riesz_ratio(P, f.dilated(t), p).ratio / base.ratio - 1))
        q = 1.1 * q0
        dev = riesz_ratio(P, f.dilated(4.0), p, q=q).ratio / riesz_ratio(P, f, p, q=q).ratio - 1
        off_line = min(off_line, abs(dev))
        # the ratio must scale as t^(d/q0 - d/q) off the line
        analytic = max(analytic, abs((1 + dev) / 4.0 ** (P.d / q0 - P.d / q) - 1))
    ok = on_line <= DILATION_REL and off_line > OFF_LINE_MIN_DEV
    report(7, ok, f"on-line dilation deviation {on_line:.1e} (tol {DILATION_REL:g}); smallest off-line deviation "
                  f"at t=4, q=1.1q(p): {off_line:.3f} (> {OFF_LINE_MIN_DEV}); "
                  f"match to t^(d/q(p)-d/q): {analytic:.1e}; p = p_- + 0.1(p_+ - p_-)")
    assert ok


def test_c08_lower_bound_and_slopes(report):
    t0 = time.perf_counter()
    ok = True
    parts = []
    for cfg in ENDPOINT_CONFIGS:
        P = validate_params(*cfg)
        ch = exponent_chart(P)
        rows = sweep(P, make_h(P), EPS_GRID)
        cmin = lower_bound_constant(rows)
        fits = [fit_endpoint_exponent(rows, e, ch) for e in ("lower", "upper")]
        good = cmin > 0 and all(abs(r.slope + ch.kappa) <= SLOPE_TOL for r in fits)
        ok &= good
        parts.append(f"{cfg}: kappa={ch.kappa:.4f}, min C={cmin:.4f}, slopes "
                     + ", ".join(f"{r.endpoint} {r.slope:.3f} (all rows {r.full_slope:.3f})" for r in fits))
    dt = time.perf_counter() - t0
    ok &= dt < 600
    report(8, ok, f"slope tol {SLOPE_TOL}, fit window = 5 rows nearest the endpoint; " + "; ".join(parts) + f"; {dt:.0f}s")
    assert ok


def test_c09_power_method(report):
    ok = True
    parts = []
    for cfg in ENDPOINT_CONFIGS:
        P = validate_params(*cfg)
        ch = exponent_chart(P)
        f = make_h(P)
        u = apply(P, f)
        rows, worst_drop, worst_dom = [], 0.0, math.inf
        for p in sweep_points(ch, EPS_GRID):
            res = power_method_estimate(P, p, f, 20)
            trace = np.array(res.iterate_ratios)
            worst_drop = max(worst_drop, float(-np.min(np.diff(trace), initial=0.0)))
            worst_dom = min(worst_dom, res.v_lower - riesz_ratio(P, f, p, u=u).ratio)
            rows.append(SweepRow(p, res.q, 1.0, res.v_lower, res.v_lower, compensate(ch, p, res.v_lower)))
        env = envelope_boundedness(rows)["max_over_min"]
        good = worst_drop <= MONOTONE_SLACK and worst_dom >= -DOMINANCE_SLACK and math.isfinite(env)
        ok &= good
        parts.append(f"{cfg}: max trace drop {worst_drop:.1e}, min(v_lower - ratio(h)) {worst_dom:.3g}, "
                     f"envelope max/min {env:.3f}")
    report(9, ok, "; ".join(parts) + " (envelope is a consistency check of the upper bound, not a proof)")
    assert ok


CLI_RUNS = [
    ["info", "--p", "1.5", "2.0"],
    ["norm", "--p", "1.3", "1.5", "--profile", "h"],
    ["potential", "--profile", "g0"],
    ["bilinear"],
    ["sweep", "--profile", "h"],
    ["sweep", "--profile", "h", "--threads", "4"],
    ["fit", "--profile", "h"],
    ["estimate", "--eps", "0.25", "0.125"],
    ["estimate", "--p", "1.5", "--json"],
    ["oracle-check", "--n-samples", "100000", "--seed", "12345"],
    ["oracle-check", "--n-samples", "100000", "--seed", "12345", "--threads", "3", "--json"],
]


def _run_cli(capsys, argv):
    code = cli_main(argv)
    return code, capsys.readouterr().out


def test_c10_cli_determinism(report, capsys):
    A = ["--d", "2", "--alpha", "0.3", "--beta", "0.2", "--lam", "0.8"]
    mismatched = []
    for argv in CLI_RUNS:
        first = _run_cli(capsys, argv + A)
        second = _run_cli(capsys, argv + A)
        if first != second or first[0] != 0:
            mismatched.append(" ".join(argv))
    # thread count must not change output bytes
    t1 = _run_cli(capsys, ["sweep", "--profile", "h"] + A)
    t4 = _run_cli(capsys, ["sweep", "--profile", "h", "--threads", "4"] + A)
    if t1 != t4:
        mismatched.append("sweep threads 1 vs 4")
    ok = not mismatched
    report(10, ok, f"{len(CLI_RUNS)} command lines run twice, byte-identical: {ok}"
                   + (f"; mismatches: {mismatched}" if mismatched else ""))
    assert ok
