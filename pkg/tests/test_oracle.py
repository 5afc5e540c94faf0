import numpy as np
import pytest

from weighted_riesz import (
    PotentialEvaluator,
    RadialProfile,
    UnsupportedDimension,
    bilinear,
    bilinear_mc,
    make_f0,
    make_g0,
    make_h,
    potential_at_point_mc,
    validate_params,
)
from weighted_riesz.oracle import RadialProposal
from helpers import CONFIG_A, CONFIG_3D, random_profile

P = validate_params(*CONFIG_A)


def test_zero_profile():
    est = potential_at_point_mc(P, RadialProfile(), 0.5, 10**4, seed=1)
    assert est.value == 0.0 and est.std_err == 0.0
    est = bilinear_mc(P, make_f0(P), RadialProfile(), 10**4)
    assert est.value == 0.0 and est.std_err == 0.0


def test_determinism():
    a = potential_at_point_mc(P, make_g0(P), 0.5, 10**5, seed=42)
    b = potential_at_point_mc(P, make_g0(P), 0.5, 10**5, seed=42)
    assert a == b
    c = potential_at_point_mc(P, make_g0(P), 0.5, 10**5, seed=43)
    assert c.value != a.value


def test_unsupported_dimension():
    Q = validate_params(4, 0.5, 0.5, 1.0)
    with pytest.raises(UnsupportedDimension):
        potential_at_point_mc(Q, make_h(Q), 1.0, 10**4)


def test_g0_config_a_at_half():
    est = potential_at_point_mc(P, make_g0(P), 0.5, 10**6, seed=1)
    exact = PotentialEvaluator(P, make_g0(P))(0.5)[0]
    assert abs(est.value - exact) <= 3 * est.std_err
    assert est.std_err < 2e-3 * exact


def test_d1_oracle():
    Q = validate_params(1, 0.2, 0.1, 0.5)
    est = potential_at_point_mc(Q, make_h(Q), 0.7, 10**6, seed=5)
    exact = PotentialEvaluator(Q, make_h(Q))(0.7)[0]
    assert abs(est.value - exact) <= 3 * est.std_err


def test_proposal_normalised():
    prop = RadialProposal(make_h(P), 1 - P.alpha, np.array([0.5, 3.0]), P.lam)
    rng = np.random.default_rng(0)
    for k, piv in enumerate([0.5, 3.0]):
        one = RadialProposal(make_h(P), 1 - P.alpha, piv, P.lam)
        x = one.sample(rng.random(200000), rng.random(200000))
        # E[1/q(x)] over a bounded window equals the window length
        m = (x > 0.2) & (x < 5.0)
        assert np.mean(m / one.density(x)) == pytest.approx(4.8, rel=0.02)
    assert prop.total.shape == (2,)


def test_coverage():
    x = 0.8
    exact = PotentialEvaluator(P, make_g0(P))(x)[0]
    hits = 0
    for s in range(100):
        est = potential_at_point_mc(P, make_g0(P), x, 20000, seed=1000 + s)
        hits += abs(est.value - exact) <= 2 * est.std_err
    assert hits >= 90


@pytest.mark.slow
def test_bilinear_random_pairs():
    rng = np.random.default_rng(17)
    worst = 0.0
    for i in range(10):
        Q = validate_params(*(CONFIG_A if i % 2 == 0 else CONFIG_3D))
        f, g = random_profile(rng, Q), random_profile(rng, Q.swapped())
        exact = bilinear(Q, f, g)
        est = bilinear_mc(Q, f, g, 1 << 18, seed=i)
        worst = max(worst, abs(est.value - exact) / est.std_err)
    assert worst <= 3.0


def test_bilinear_swap():
    f, g = make_f0(P), make_g0(P)
    a = bilinear_mc(P, f, g, 1 << 18, seed=9)
    b = bilinear_mc(P.swapped(), g, f, 1 << 18, seed=10)
    assert abs(a.value - b.value) <= 3 * np.hypot(a.std_err, b.std_err)
