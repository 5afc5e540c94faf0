"""Operator parameters and the exponent bookkeeping that goes with them."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

from .errors import DimensionError, OutOfRangeError, SignError, SubcriticalityError

G_REL_TOL = 1e-12


@dataclass(frozen=True)
class RieszParams:
    d: int
    alpha: float
    beta: float
    lam: float

    @property
    def kappa(self) -> float:
        return (self.alpha + self.beta + self.lam) / self.d

    def swapped(self) -> "RieszParams":
        """Parameters of the adjoint operator (alpha and beta exchanged)."""
        return RieszParams(self.d, self.beta, self.alpha, self.lam)


def validate_params(d, alpha, beta, lam) -> RieszParams:
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise DimensionError(f"dimension must be a positive integer, got {d!r}")
    alpha, beta, lam = float(alpha), float(beta), float(lam)
    if not all(math.isfinite(v) for v in (alpha, beta, lam)):
        raise SignError("alpha, beta, lambda must be finite")
    if alpha < 0 or beta < 0:
        raise SignError(f"alpha and beta must be >= 0, got alpha={alpha}, beta={beta}")
    if lam <= 0:
        raise SignError(f"lambda must be > 0, got {lam}")
    if alpha + beta + lam >= d:
        raise SubcriticalityError(
            f"alpha + beta + lambda = {alpha + beta + lam} must be < d = {int(d)}"
        )
    return RieszParams(int(d), alpha, beta, lam)


@dataclass(frozen=True)
class ExponentChart:
    params: RieszParams
    p_minus: float
    p_plus: float
    q_minus: float
    q_plus: float  # math.inf when beta == 0
    kappa: float

    def q_of_p(self, p: float) -> float:
        """Point of the conjugate line, without the range check."""
        inv_q = 1.0 / p + self.kappa - 1.0
        # 1/q within rounding of zero is the endpoint q = inf
        if abs(inv_q) <= 8 * sys.float_info.epsilon * (1.0 / p + self.kappa + 1.0):
            return math.inf
        return 1.0 / inv_q

    def p_of_q(self, q: float) -> float:
        return 1.0 / (1.0 + 1.0 / q - self.kappa)

    def contains(self, p: float) -> bool:
        return self.p_minus < p < self.p_plus


def exponent_chart(params: RieszParams) -> ExponentChart:
    d, a, b, lam = params.d, params.alpha, params.beta, params.lam
    return ExponentChart(
        params=params,
        p_minus=d / (d - a),
        p_plus=d / (d - a - lam),
        q_minus=d / (b + lam),
        q_plus=math.inf if b == 0 else d / b,
        kappa=(a + b + lam) / d,
    )


@dataclass(frozen=True)
class GPoint:
    p: float
    q: float
    q_dual: float


def conjugate_q(chart: ExponentChart, p: float) -> GPoint:
    if not chart.contains(p):
        raise OutOfRangeError(
            f"p={p} outside ({chart.p_minus}, {chart.p_plus}); the operator norm is infinite there"
        )
    q = chart.q_of_p(p)
    return GPoint(p=p, q=q, q_dual=q / (q - 1.0))


def in_G(params: RieszParams, p: float, q: float) -> bool:
    chart = exponent_chart(params)
    if not chart.contains(p):
        return False
    lhs = 1.0 + 1.0 / q
    rhs = 1.0 / p + chart.kappa
    return abs(lhs - rhs) <= G_REL_TOL * max(abs(lhs), abs(rhs))
