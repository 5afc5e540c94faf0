"""Radial functions H(|x|) built from power-log pieces, and their L_p norms."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from ._quad import exp_affine_integral, panel_rule, power_log_integral
from .errors import DivergentNormError, UnsupportedForm
from .exponents import RieszParams

_EDGE_TOL = 1e-12


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere S^{d-1} in R^d (2 for d = 1)."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-7
    r_min: float = 1e-6
    r_max: float = 1e6
    points_per_decade: int = 64
    singular_split_width: float = 1.0
    # profile norms: Gauss-Legendre panels per decade and nodes per panel
    panels_per_decade: int = 64
    nodes_per_panel: int = 16
    # potential integrals (each node costs one potential evaluation)
    potential_panels_per_decade: int = 8
    grading_levels: int = 24

    def __post_init__(self):
        if not self.r_min < self.r_max:
            raise ValueError("r_min must be < r_max")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")
        if self.points_per_decade < 2:
            raise ValueError("points_per_decade must be >= 2")

    def grid(self) -> np.ndarray:
        """Geometric output grid from r_min to r_max."""
        decades = math.log10(self.r_max / self.r_min)
        n = int(round(decades * self.points_per_decade)) + 1
        return self.r_min * (self.r_max / self.r_min) ** (np.arange(n) / (n - 1))


@dataclass(frozen=True)
class PowerLogPiece:
    """``coef * r**power * log(r)**log_power`` on the open interval (r_lo, r_hi)."""

    coef: float
    power: float
    log_power: int = 0
    r_lo: float = 0.0
    r_hi: float = math.inf

    def __post_init__(self):
        if not (0.0 <= self.r_lo < self.r_hi):
            raise ValueError(f"bad support ({self.r_lo}, {self.r_hi})")
        if int(self.log_power) != self.log_power or self.log_power < 0:
            raise ValueError("log_power must be a nonnegative integer")
        if not math.isfinite(self.coef):
            raise ValueError("coef must be finite")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        inside = (r > self.r_lo) & (r < self.r_hi)
        rr = np.where(inside, r, 1.0)
        val = self.coef * rr**self.power
        if self.log_power:
            val = val * np.log(rr) ** self.log_power
        return np.where(inside, val, 0.0)

    @property
    def touches_zero(self) -> bool:
        return self.r_lo == 0.0

    @property
    def touches_inf(self) -> bool:
        return math.isinf(self.r_hi)

    def to_dict(self) -> dict:
        return {
            "coef": self.coef,
            "power": self.power,
            "log_power": self.log_power,
            "r_lo": self.r_lo,
            "r_hi": "inf" if math.isinf(self.r_hi) else self.r_hi,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "PowerLogPiece":
        return cls(
            coef=float(obj["coef"]),
            power=float(obj["power"]),
            log_power=int(obj.get("log_power", 0)),
            r_lo=float(obj.get("r_lo", 0.0)),
            r_hi=float(obj.get("r_hi", "inf")),
        )


@dataclass(frozen=True)
class RadialProfile:
    pieces: tuple[PowerLogPiece, ...] = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(sorted(self.pieces, key=lambda pc: pc.r_lo)))
        for a, b in zip(self.pieces, self.pieces[1:]):
            if b.r_lo < a.r_hi:
                raise ValueError("piece supports overlap")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for pc in self.pieces:
            out = out + pc(r)
        return out

    def __add__(self, other: "RadialProfile") -> "RadialProfile":
        return RadialProfile(self.pieces + other.pieces, label=f"{self.label}+{other.label}")

    @property
    def is_zero(self) -> bool:
        return all(pc.coef == 0 for pc in self.pieces)

    @property
    def active(self) -> tuple[PowerLogPiece, ...]:
        return tuple(pc for pc in self.pieces if pc.coef != 0)

    def breakpoints(self) -> list[float]:
        pts = set()
        for pc in self.active:
            for r in (pc.r_lo, pc.r_hi):
                if 0 < r < math.inf:
                    pts.add(r)
        return sorted(pts)

    def is_nonnegative(self) -> bool:
        for pc in self.active:
            if pc.coef < 0:
                return False
            if pc.log_power % 2 and pc.r_lo < 1.0 < pc.r_hi:
                return False
            if pc.log_power % 2 and pc.r_hi <= 1.0:
                return False
        return True

    def scaled(self, c: float) -> "RadialProfile":
        return RadialProfile(tuple(replace(pc, coef=pc.coef * c) for pc in self.pieces), self.label)

    def dilated(self, t: float) -> "RadialProfile":
        """The profile of x -> f(t x)."""
        if t <= 0:
            raise ValueError("dilation factor must be positive")
        new = []
        for pc in self.pieces:
            if pc.log_power:
                raise UnsupportedForm("dilation of log-power pieces is not supported")
            new.append(PowerLogPiece(pc.coef * t**pc.power, pc.power, 0, pc.r_lo / t, pc.r_hi / t))
        return RadialProfile(tuple(new), f"{self.label}(t={t:g})")

    def to_json(self) -> str:
        return json.dumps([pc.to_dict() for pc in self.pieces])

    @classmethod
    def from_json(cls, text: str, label: str = "") -> "RadialProfile":
        return cls(tuple(PowerLogPiece.from_dict(o) for o in json.loads(text)), label)

    def head_piece(self) -> PowerLogPiece | None:
        for pc in self.active:
            if pc.touches_zero:
                return pc
        return None

    def tail_piece(self) -> PowerLogPiece | None:
        for pc in self.active:
            if pc.touches_inf:
                return pc
        return None


def make_f0(params: RieszParams) -> RadialProfile:
    d, a = params.d, params.alpha
    return RadialProfile((PowerLogPiece(1.0, -(d - a), 0, 1.0, math.inf),), "f0")


def make_g0(params: RieszParams) -> RadialProfile:
    d, a, lam = params.d, params.alpha, params.lam
    return RadialProfile((PowerLogPiece(1.0, -(d - a - lam), 0, 0.0, 1.0),), "g0")


def make_h(params: RieszParams) -> RadialProfile:
    return RadialProfile(make_f0(params).pieces + make_g0(params).pieces, "h")


BUILTINS = {"f0": make_f0, "g0": make_g0, "h": make_h}


# --- integrability ---------------------------------------------------------


def _piece_in_Lp(pc: PowerLogPiece, p: float, d: int) -> bool:
    if pc.coef == 0:
        return True
    rate = pc.power * p + d
    if pc.touches_zero and not rate > 0:
        return False
    if pc.touches_inf and not rate < 0:
        return False
    return True


def in_Lp(profile: RadialProfile, p: float, params: RieszParams) -> bool:
    return all(_piece_in_Lp(pc, p, params.d) for pc in profile.pieces)


def in_L_interval(profile: RadialProfile, a: float, b: float, params: RieszParams) -> bool:
    """Whether the profile lies in L_p for every p in the open interval (a, b)."""
    if not 1.0 <= a < b:
        raise ValueError("need 1 <= a < b")
    d = params.d
    for pc in profile.active:
        s = pc.power
        if pc.touches_zero and s < 0:
            # s p + d > 0 for all p < b  <=>  b <= -d/s
            if b > -d / s * (1 + _EDGE_TOL):
                return False
        if pc.touches_inf:
            if s >= 0:
                return False
            if a < -d / s * (1 - _EDGE_TOL):
                return False
    return True


# --- norms -----------------------------------------------------------------


def _piece_pth_power_closed(pc: PowerLogPiece, p: float, d: int) -> float:
    if pc.log_power:
        raise UnsupportedForm("closed-form norm only for pure power pieces")
    return abs(pc.coef) ** p * power_log_integral(pc.power * p + d, 0, pc.r_lo, pc.r_hi)


def lp_norm_closed(profile: RadialProfile, p: float, params: RieszParams) -> float:
    """Exact L_p norm from antiderivatives; ``math.inf`` when it diverges."""
    if p < 1:
        raise ValueError("p must be >= 1")
    d = params.d
    total = 0.0
    for pc in profile.active:
        if pc.log_power:
            raise UnsupportedForm("closed-form norm only for pure power pieces")
        if not _piece_in_Lp(pc, p, d):
            return math.inf
        total += _piece_pth_power_closed(pc, p, d)
    return (sphere_area(d) * total) ** (1.0 / p)


def _piece_pth_power_quad(pc: PowerLogPiece, p: float, d: int, quad: QuadratureConfig) -> float:
    lo, hi = max(pc.r_lo, quad.r_min), min(pc.r_hi, quad.r_max)
    total = 0.0
    if lo < hi:
        # integrate |H|^p r^d over t = log r
        t0, t1 = math.log(lo), math.log(hi)
        n_pan = max(1, math.ceil((t1 - t0) / math.log(10.0) * quad.panels_per_decade))
        t, w = panel_rule(np.linspace(t0, t1, n_pan + 1), quad.nodes_per_panel)
        r = np.exp(t)
        total += float(np.sum(w * np.abs(pc(r)) ** p * r**d))
    # analytic contributions outside the working window
    ap = abs(pc.coef) ** p
    bp = pc.log_power * p
    rate = pc.power * p + d
    if pc.r_lo < quad.r_min:
        t_hi = math.log(min(quad.r_min, pc.r_hi))
        t_lo = -math.inf if pc.r_lo == 0 else math.log(pc.r_lo)
        total += ap * float(exp_affine_integral(rate, [(-1.0, 0.0, bp)], t_lo, t_hi))
    if pc.r_hi > quad.r_max:
        t_lo = math.log(max(quad.r_max, pc.r_lo))
        t_hi = math.inf if pc.touches_inf else math.log(pc.r_hi)
        total += ap * float(exp_affine_integral(rate, [(1.0, 0.0, bp)], t_lo, t_hi))
    return total


def lp_norm_pth_power(profile: RadialProfile, p: float, params: RieszParams, quad: QuadratureConfig | None = None) -> float:
    quad = quad or QuadratureConfig()
    if not in_Lp(profile, p, params):
        raise DivergentNormError(f"profile {profile.label!r} is not in L_{p}")
    return sphere_area(params.d) * sum(_piece_pth_power_quad(pc, p, params.d, quad) for pc in profile.active)


def lp_norm_quad(profile: RadialProfile, p: float, params: RieszParams, quad: QuadratureConfig | None = None) -> float:
    """Quadrature L_p norm; analytic head/tail outside [r_min, r_max]."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return lp_norm_pth_power(profile, p, params, quad) ** (1.0 / p)
