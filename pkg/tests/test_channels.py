import math
from fractions import Fraction

import pytest
from scipy import stats

from grsse.channels import (
    NoiseModel,
    TypeDistribution,
    asymptotic_ball_capacity,
    capacity,
    noise_entropy,
    tail_weight_probability,
    type_distribution,
)


def h2(a):
    return -a * math.log2(a) - (1 - a) * math.log2(1 - a)


def test_ball_n3_w1():
    dist = type_distribution(NoiseModel.ball(3, 1))
    assert dist.exact
    assert dist[(3, 0)] == Fraction(1, 4) and dist[(2, 1)] == Fraction(3, 4)
    assert dist[(1, 2)] == 0
    assert noise_entropy(dist) == pytest.approx(2.0, abs=1e-15)
    assert capacity(dist) == pytest.approx(1.0, abs=1e-15)


def test_ball_n24_w3():
    dist = type_distribution(NoiseModel.ball(24, 3))
    assert dist[(21, 3)] == Fraction(2024, 2325)
    assert capacity(dist) == pytest.approx(24 - math.log2(2325), abs=1e-12)


def test_bsc_entropy_is_sum_of_symbol_entropies():
    dist = type_distribution(NoiseModel.bsc(24, Fraction(11, 100)))
    assert noise_entropy(dist) == pytest.approx(24 * h2(0.11), rel=1e-12)
    assert noise_entropy(dist) == pytest.approx(11.99798, abs=1e-5)


@pytest.mark.parametrize("q,alpha", [(3, Fraction(1, 5)), (5, Fraction(1, 3))])
def test_qary_symmetric_is_memoryless(q, alpha):
    n = 4
    dist = type_distribution(NoiseModel("symmetric", n, q, alpha=alpha))
    a = float(alpha)
    per_symbol = -(1 - a) * math.log2(1 - a) - a * math.log2(a / (q - 1))
    assert noise_entropy(dist) == pytest.approx(n * per_symbol, rel=1e-12)
    # any vector's probability factorizes over symbols
    p = (2,) + (1, 1) + (0,) * (q - 3)
    assert dist.vector_probability(p) == (1 - alpha) ** 2 * (alpha / (q - 1)) ** 2


def test_constant_weight():
    dist = type_distribution(NoiseModel.constant_weight(6, 2))
    assert dist[(4, 2)] == 1
    assert capacity(dist) == pytest.approx(6 - math.log2(15), abs=1e-12)


def test_tail_probability_matches_binomial():
    dist = type_distribution(NoiseModel.bsc(24, 0.05))
    assert not dist.exact
    assert tail_weight_probability(dist, 4) == pytest.approx(stats.binom.sf(3, 24, 0.05), rel=1e-10)
    assert tail_weight_probability(dist, 4) == pytest.approx(0.029782, abs=1e-6)
    exact = type_distribution(NoiseModel.ball(24, 3))
    assert tail_weight_probability(exact, 3) == Fraction(2024, 2325)


def test_weight_pmf_matches_binomial():
    dist = type_distribution(NoiseModel.bsc(10, 0.3))
    assert dist.weight_pmf() == pytest.approx(list(stats.binom.pmf(range(11), 10, 0.3)), rel=1e-10)


def test_asymptotic_ball_capacity():
    assert asymptotic_ball_capacity(0.125) == pytest.approx(1 - h2(0.125), abs=1e-15)
    assert asymptotic_ball_capacity(0.125) == pytest.approx(0.45644, abs=1e-5)
    assert asymptotic_ball_capacity(0.5) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        asymptotic_ball_capacity(0.6)


def test_ball_capacity_approaches_asymptote():
    gaps = []
    for n in (24, 48, 96):
        dist = type_distribution(NoiseModel.ball(n, n // 8))
        gaps.append(capacity(dist) / n - asymptotic_ball_capacity(0.125))
    assert all(g > 0 for g in gaps)
    assert gaps[0] > gaps[1] > gaps[2]


def test_model_validation_and_labels():
    with pytest.raises(ValueError):
        NoiseModel.bsc(4, 1.5)
    with pytest.raises(ValueError):
        NoiseModel.ball(4, 5)
    with pytest.raises(ValueError):
        NoiseModel("ball", 4, 4, w=1)
    with pytest.raises(ValueError):
        NoiseModel("erasure", 4, w=1)
    m = NoiseModel.ball(24, 3)
    assert NoiseModel.from_spec(m.spec()) == m
    assert NoiseModel.bsc(4, "1/4").alpha == Fraction(1, 4)


def test_float_and_exact_agree():
    exact = type_distribution(NoiseModel.bsc(8, Fraction(1, 10)))
    approx = type_distribution(NoiseModel.bsc(8, 0.1))
    for p in exact.support():
        assert float(exact[p]) == pytest.approx(approx[p], rel=1e-12)


def test_distribution_validation():
    with pytest.raises(ValueError):
        TypeDistribution(2, 2, {(2, 0): Fraction(1, 2)})
    with pytest.raises(ValueError):
        TypeDistribution(2, 2, {(3, 0): Fraction(1)})
    with pytest.raises(ValueError):
        TypeDistribution(2, 2, {(2, 0): Fraction(3, 2), (1, 1): Fraction(-1, 2)})
