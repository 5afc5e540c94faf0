"""Command-line front end.

    riesz info --d 2 --alpha 0.3 --beta 0.2 --lam 0.8 --p 1.5
    riesz sweep --config run.json --out sweep.csv
    riesz fit --config run.json --endpoint lower

Parameters come from a JSON config (``--config``) with flag overrides; flags
win.  Exit status: 0 success, 1 numeric failure, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from .errors import ConfigError, NumericError, RieszError, UnsupportedForm
from .estimation import (
    FIT_WINDOW,
    SLOPE_TOL,
    envelope_boundedness,
    fit_endpoint_exponent,
    lower_bound_constant,
    power_method_estimate,
    power_sweep,
    rows_to_csv,
    rows_to_dicts,
    sweep,
)
from .exponents import conjugate_q, exponent_chart, validate_params
from .operator import PotentialEvaluator, apply, bilinear
from .oracle import potential_at_point_mc
from .profiles import BUILTINS, PowerLogPiece, QuadratureConfig, RadialProfile, in_Lp, lp_norm_closed, lp_norm_quad

DEFAULT_EPS = [2.0**-k for k in range(2, 10)]
DEFAULT_PROBES = [0.1, 0.3, 1.0, 3.0, 10.0]

# keys accepted in a config file, with their types
CONFIG_KEYS = {
    "d": int, "alpha": float, "beta": float, "lam": float,
    "quadrature": dict,
    "p": list, "t": float, "eps_grid": list,
    "profile": object, "g": object,
    "n_samples": int, "seed": int, "endpoint": str, "radii": list, "max_iter": int,
    "window": int,
}
_QUAD_KEYS = {f.name for f in fields(QuadratureConfig)}


def fmt(x) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _jsonable(obj):
    if isinstance(obj, float):
        return fmt(obj) if not math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


# --- configuration -------------------------------------------------------------------


def load_config(args) -> dict:
    cfg: dict = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    if "lambda" in cfg:
        cfg["lam"] = cfg.pop("lambda")
    unknown = sorted(set(cfg) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
    for key in ("d", "alpha", "beta", "lam", "t", "n_samples", "seed", "endpoint", "max_iter", "window",
                "profile", "g"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    for key in ("p", "eps_grid", "radii"):
        val = getattr(args, key, None)
        if val:
            cfg[key] = list(val)
    for key in ("d", "alpha", "beta", "lam"):
        if key not in cfg:
            raise ConfigError(f"missing parameter {key!r}")
    return cfg


def params_of(cfg):
    return validate_params(cfg["d"], cfg["alpha"], cfg["beta"], cfg["lam"])


def quad_of(cfg) -> QuadratureConfig:
    q = cfg.get("quadrature") or {}
    unknown = sorted(set(q) - _QUAD_KEYS)
    if unknown:
        raise ConfigError(f"unknown quadrature fields: {', '.join(unknown)}")
    try:
        return QuadratureConfig(**q)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def profile_of(spec, params, default="h") -> RadialProfile:
    spec = default if spec is None else spec
    if isinstance(spec, str):
        if spec in BUILTINS:
            return BUILTINS[spec](params)
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError:
            raise ConfigError(f"unknown profile {spec!r}; builtins are {', '.join(BUILTINS)}") from None
    label = "custom"
    if isinstance(spec, dict):
        label = spec.get("label", label)
        spec = spec.get("pieces", [])
    try:
        return RadialProfile(tuple(PowerLogPiece.from_dict(o) for o in spec), label)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad profile spec: {exc}") from exc


def primary_profile(cfg, params, default="h") -> RadialProfile:
    f = profile_of(cfg.get("profile"), params, default)
    t = cfg.get("t")
    if t is None:
        return f
    if not float(t) > 0:
        raise ConfigError("t must be positive")
    return f.dilated(float(t))


def _floats(cfg, key, default=None):
    vals = cfg.get(key, default)
    if vals is None:
        return None
    try:
        return [float(v) for v in vals]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key} must be a list of numbers") from exc


# --- commands ----------------------------------------------------------------------


def cmd_info(cfg, args):
    P = params_of(cfg)
    ch = exponent_chart(P)
    rows = []
    for p in _floats(cfg, "p", []):
        rows.append({"p": p, "q": conjugate_q(ch, p).q})
    info = {"d": P.d, "alpha": P.alpha, "beta": P.beta, "lambda": P.lam, "p_minus": ch.p_minus,
            "p_plus": ch.p_plus, "q_minus": ch.q_minus, "q_plus": ch.q_plus, "kappa": ch.kappa, "q_of_p": rows}
    if args.json:
        return dumps(info), None
    lines = [f"d={P.d}", f"alpha={fmt(P.alpha)}", f"beta={fmt(P.beta)}", f"lambda={fmt(P.lam)}",
             f"p_minus={fmt(ch.p_minus)}", f"p_plus={fmt(ch.p_plus)}", f"q_minus={fmt(ch.q_minus)}",
             f"q_plus={fmt(ch.q_plus)}", f"kappa={fmt(ch.kappa)}"]
    lines += [f"p={fmt(r['p'])} q={fmt(r['q'])}" for r in rows]
    return "\n".join(lines) + "\n", None


def cmd_norm(cfg, args):
    P = params_of(cfg)
    f = primary_profile(cfg, P)
    quad = quad_of(cfg)
    ps = _floats(cfg, "p")
    if not ps:
        raise ConfigError("norm needs at least one p")
    rows = []
    for p in ps:
        if not in_Lp(f, p, P):
            closed = quad_val = math.inf
        else:
            try:
                closed = lp_norm_closed(f, p, P)
            except UnsupportedForm:
                closed = math.nan
            quad_val = lp_norm_quad(f, p, P, quad)
        rows.append({"p": p, "norm_quad": quad_val, "norm_closed": closed})
    if args.json:
        return dumps({"profile": f.label, "rows": rows}), None
    out = "p,norm_quad,norm_closed\n" + "".join(
        f"{fmt(r['p'])},{fmt(r['norm_quad'])},{fmt(r['norm_closed'])}\n" for r in rows)
    return out, None


def cmd_potential(cfg, args):
    P = params_of(cfg)
    f = primary_profile(cfg, P)
    quad = quad_of(cfg)
    radii = _floats(cfg, "radii")
    if radii:
        vals = PotentialEvaluator(P, f, quad)(np.array(radii))
        if args.json:
            return dumps({"profile": f.label, "r": radii, "u": vals.tolist()}), None
        return "r,u\n" + "".join(f"{fmt(r)},{fmt(v)}\n" for r, v in zip(radii, vals)), None
    u = apply(P, f, quad, threads=args.threads)
    if args.json:
        side = u.sidecar()
        side.update({"r": u.radii.tolist(), "u": u.values.tolist()})
        return dumps(side), None
    return u.to_csv(), dumps(u.sidecar())


def cmd_bilinear(cfg, args):
    P = params_of(cfg)
    f = primary_profile(cfg, P, "f0")
    g = profile_of(cfg.get("g"), P, "g0")
    quad = quad_of(cfg)
    b = bilinear(P, f, g, quad)
    b_swap = bilinear(P.swapped(), g, f, quad)
    res = {"B": b, "B_swapped": b_swap, "rel_diff": abs(b - b_swap) / abs(b) if b else 0.0}
    if args.json:
        return dumps(res), None
    return f"B={fmt(b)}\nB_swapped={fmt(b_swap)}\nrel_diff={fmt(res['rel_diff'])}\n", None


def _sweep_rows(cfg, args):
    P = params_of(cfg)
    f = primary_profile(cfg, P)
    eps = _floats(cfg, "eps_grid", DEFAULT_EPS)
    return P, sweep(P, f, eps, quad_of(cfg), threads=args.threads)


def cmd_sweep(cfg, args):
    P, rows = _sweep_rows(cfg, args)
    if args.json:
        body = {"rows": rows_to_dicts(rows)}
        if rows:
            body["lower_bound_constant"] = lower_bound_constant(rows)
        return dumps(body), None
    return rows_to_csv(rows), None


def cmd_fit(cfg, args):
    P, rows = _sweep_rows(cfg, args)
    ch = exponent_chart(P)
    ends = ["lower", "upper"] if cfg.get("endpoint", "both") == "both" else [cfg["endpoint"]]
    reports = [fit_endpoint_exponent(rows, e, ch, cfg.get("window", FIT_WINDOW)) for e in ends]
    ok = all(r.passed for r in reports)
    if args.json:
        body = {"kappa": ch.kappa, "tolerance": SLOPE_TOL,
                "fits": [dict(endpoint=r.endpoint, slope=r.slope, intercept=r.intercept, residual=r.residual,
                              points_used=r.points_used, full_slope=r.full_slope, passed=r.passed)
                         for r in reports],
                "verdict": "PASS" if ok else "FAIL"}
        return dumps(body), None, (0 if ok else 1)
    lines = [f"{r.endpoint}: slope={r.slope:.4f}±{r.residual:.4f}, target={-ch.kappa:.4f}±{SLOPE_TOL}, "
             f"points={r.points_used}, all-rows slope={r.full_slope:.4f}, {'PASS' if r.passed else 'FAIL'}"
             for r in reports]
    return "\n".join(lines) + "\n", None, (0 if ok else 1)


def cmd_estimate(cfg, args):
    P = params_of(cfg)
    f = primary_profile(cfg, P)
    max_iter = int(cfg.get("max_iter", 20))
    ps = _floats(cfg, "p")
    if ps:
        results = [power_method_estimate(P, p, f, max_iter) for p in ps]
        body = [{"p": r.p, "q": r.q, "v_lower": r.v_lower, "iterate_ratios": r.iterate_ratios,
                 "converged": r.converged} for r in results]
        if args.json:
            return dumps({"estimates": body}), None
        return "p,q,v_lower,iterations\n" + "".join(
            f"{fmt(r.p)},{fmt(r.q)},{fmt(r.v_lower)},{len(r.iterate_ratios) - 1}\n" for r in results), None
    rows = power_sweep(P, f, _floats(cfg, "eps_grid", DEFAULT_EPS), max_iter, threads=args.threads)
    env = envelope_boundedness(rows)
    if args.json:
        return dumps({"rows": rows_to_dicts(rows), "envelope": env}), None
    summary = (f"envelope max_over_min={fmt(env['max_over_min'])} "
               "(consistency check of the upper bound, not a proof)\n")
    return rows_to_csv(rows), summary


def cmd_oracle_check(cfg, args):
    P = params_of(cfg)
    f = primary_profile(cfg, P, "g0")
    radii = _floats(cfg, "radii", DEFAULT_PROBES)
    n = int(cfg.get("n_samples", 10**6))
    seed = int(cfg.get("seed", 0))
    exact = PotentialEvaluator(P, f, quad_of(cfg))(np.array(radii))
    probes = []
    for i, (r, u) in enumerate(zip(radii, exact)):
        est = potential_at_point_mc(P, f, r, n, seed=seed, stream=i)
        z = abs(u - est.value) / est.std_err if est.std_err > 0 else (0.0 if u == est.value else math.inf)
        probes.append({"r": r, "quadrature": float(u), "mc": est.value, "std_err": est.std_err, "z": z})
    zmax = max(p["z"] for p in probes)
    ok = zmax <= 3.0
    if args.json:
        return dumps({"probes": probes, "max_z": zmax, "seed": seed, "n_samples": n,
                      "verdict": "PASS" if ok else "FAIL"}), None, (0 if ok else 1)
    lines = ["r,quadrature,mc,std_err,z"] + [
        f"{fmt(p['r'])},{fmt(p['quadrature'])},{fmt(p['mc'])},{fmt(p['std_err'])},{fmt(p['z'])}" for p in probes]
    verdict = f"max z-score={zmax:.3f} {'<=' if ok else '>'} 3, {'PASS' if ok else 'FAIL'}"
    return "\n".join(lines) + "\n", verdict + "\n", (0 if ok else 1)


COMMANDS = {
    "info": cmd_info, "norm": cmd_norm, "potential": cmd_potential, "bilinear": cmd_bilinear,
    "sweep": cmd_sweep, "fit": cmd_fit, "estimate": cmd_estimate, "oracle-check": cmd_oracle_check,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="riesz", description="Weighted Riesz potentials on radial functions.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="JSON run config; flags override its fields")
    ap.add_argument("--out", help="write the main output here instead of stdout")
    ap.add_argument("--json", action="store_true", help="structured JSON output")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--d", type=int)
    ap.add_argument("--alpha", type=float)
    ap.add_argument("--beta", type=float)
    ap.add_argument("--lam", "--lambda", dest="lam", type=float)
    ap.add_argument("--p", type=float, nargs="+")
    ap.add_argument("--t", type=float, help="dilate the profile: f -> f(t .)")
    ap.add_argument("--eps", dest="eps_grid", type=float, nargs="+")
    ap.add_argument("--radii", type=float, nargs="+")
    ap.add_argument("--profile", help="builtin name (f0, g0, h) or JSON list of pieces")
    ap.add_argument("--g", help="second profile for bilinear")
    ap.add_argument("--n-samples", dest="n_samples", type=int)
    ap.add_argument("--endpoint", choices=["lower", "upper", "both"])
    ap.add_argument("--window", type=int)
    ap.add_argument("--max-iter", dest="max_iter", type=int)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    if args.seed is not None and not 0 <= args.seed < 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args)
        res = COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (NumericError, RieszError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    main_out, extra = res[0], res[1]
    code = res[2] if len(res) > 2 else 0
    if args.out:
        Path(args.out).write_text(main_out)
        if extra and args.command == "potential":
            Path(args.out).with_suffix(".json").write_text(extra)
        elif extra:
            sys.stdout.write(extra)
    else:
        sys.stdout.write(main_out)
        if extra and args.command != "potential":
            sys.stdout.write(extra)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
