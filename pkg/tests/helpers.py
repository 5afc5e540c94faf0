"""Shared configurations and random profile generators for the test-suite."""

import math

import numpy as np

from weighted_riesz import PowerLogPiece, RadialProfile, exponent_chart, validate_params

CONFIG_A = (2, 0.3, 0.2, 0.8)
CLASSICAL = (1, 0.0, 0.0, 0.5)
CONFIG_3D = (3, 0.5, 0.5, 1.0)
ENDPOINT_CONFIGS = [CONFIG_A, CLASSICAL, CONFIG_3D]
EPS_GRID = [2.0**-k for k in range(2, 10)]


def params(cfg):
    return validate_params(*cfg)


def random_params(rng, d=None):
    d = int(rng.integers(1, 5)) if d is None else d
    while True:
        a, b, lam = rng.uniform(0, d, 3) * [0.5, 0.5, 1.0]
        if lam > 0.05 and a + b + lam < 0.95 * d:
            return validate_params(d, a, b, lam)


def random_profile(rng, P, label="rand"):
    """Nonnegative profile with 1-3 power pieces lying in L(p_-, p_+) for P."""
    ch = exponent_chart(P)
    d = P.d
    a = float(np.exp(rng.uniform(-1.0, 0.0)))
    b = float(a * np.exp(rng.uniform(0.3, 1.5)))
    pieces = []
    if rng.random() < 0.8:
        pieces.append(PowerLogPiece(float(rng.uniform(0.5, 2)), float(rng.uniform(-0.9 * d / ch.p_plus, 1.0)), 0, 0.0, a))
    pieces.append(PowerLogPiece(float(rng.uniform(0.5, 2)), float(rng.uniform(-2, 2)), 0, a, b))
    if rng.random() < 0.8:
        pieces.append(PowerLogPiece(float(rng.uniform(0.5, 2)), float(-d / ch.p_minus - rng.uniform(0.1, 1.5)), 0, b, math.inf))
    return RadialProfile(tuple(pieces), label)
