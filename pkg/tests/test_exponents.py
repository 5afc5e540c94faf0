import math

import pytest

from weighted_riesz import (
    DimensionError,
    OutOfRangeError,
    SignError,
    SubcriticalityError,
    conjugate_q,
    exponent_chart,
    in_G,
    validate_params,
)
from helpers import CONFIG_A


def test_config_a_chart():
    ch = exponent_chart(validate_params(*CONFIG_A))
    assert ch.p_minus == pytest.approx(2 / 1.7, rel=1e-15)
    assert ch.p_plus == pytest.approx(2 / 0.9, rel=1e-15)
    assert ch.q_minus == pytest.approx(2.0, rel=1e-15)
    assert ch.q_plus == pytest.approx(10.0, rel=1e-15)
    assert ch.kappa == pytest.approx(0.65, rel=1e-15)


def test_conjugate_q_config_a():
    ch = exponent_chart(validate_params(*CONFIG_A))
    g = conjugate_q(ch, 1.5)
    assert g.q == pytest.approx(60 / 19, rel=1e-12)
    assert g.q == pytest.approx(3.157894737, abs=1e-9)
    assert 1 / g.q + 1 / g.q_dual == pytest.approx(1.0)


def test_beta_zero_gives_infinite_q_plus():
    ch = exponent_chart(validate_params(2, 0.3, 0.0, 0.8))
    assert math.isinf(ch.q_plus)
    assert ch.q_of_p(ch.p_plus) == math.inf


def test_endpoints_map_to_endpoints():
    ch = exponent_chart(validate_params(3, 0.5, 0.5, 1.0))
    assert ch.q_of_p(ch.p_minus) == pytest.approx(ch.q_minus, rel=1e-12)
    assert ch.q_of_p(ch.p_plus) == pytest.approx(ch.q_plus, rel=1e-12)
    assert ch.p_of_q(ch.q_of_p(1.5)) == pytest.approx(1.5, rel=1e-12)


@pytest.mark.parametrize("p", [1.1764705882352942, 1.0, 2.2222222222222223, 3.0])
def test_conjugate_q_rejects_closed_endpoints(p):
    ch = exponent_chart(validate_params(*CONFIG_A))
    with pytest.raises(OutOfRangeError):
        conjugate_q(ch, p)


@pytest.mark.parametrize(
    "args, exc",
    [
        ((0, 0.1, 0.1, 0.5), DimensionError),
        ((1.5, 0.1, 0.1, 0.5), DimensionError),
        ((True, 0.1, 0.1, 0.5), DimensionError),
        ((2, -0.1, 0.1, 0.5), SignError),
        ((2, 0.1, -0.1, 0.5), SignError),
        ((2, 0.1, 0.1, 0.0), SignError),
        ((2, 0.1, 0.1, float("nan")), SignError),
        ((2, 0.9, 0.5, 0.8), SubcriticalityError),
        ((2, 0.5, 0.5, 1.0), SubcriticalityError),
    ],
)
def test_validation_errors(args, exc):
    with pytest.raises(exc):
        validate_params(*args)


def test_config_errors_are_value_errors():
    with pytest.raises(ValueError):
        validate_params(2, 1.0, 1.0, 1.0)


def test_in_G():
    P = validate_params(*CONFIG_A)
    assert in_G(P, 1.5, 60 / 19)
    assert not in_G(P, 1.5, 3.2)
    assert not in_G(P, 1.1, exponent_chart(P).q_of_p(1.1))  # p outside (p_-, p_+)


def test_swapped():
    P = validate_params(*CONFIG_A)
    S = P.swapped()
    assert (S.alpha, S.beta) == (P.beta, P.alpha)
    assert S.swapped() == P
    assert S.kappa == P.kappa
