import numpy as np
import pytest

from mao.model import MaoError, ModelParams, at_least, exactly
from mao.montecarlo import replicate_stream, sample_once, simulate, simulate_profiles


def test_membership_mass():
    params = ModelParams(30, (4, 11, 29, 1))
    for r in range(50):
        K = sample_once(params, replicate_stream(7, r))
        assert K.sum() == sum(params.m)
        assert K.min() >= 0 and K.max() <= params.T


def test_single_round():
    K = sample_once(ModelParams(12, (5,)), np.random.default_rng(1))
    assert sorted(K.tolist()) == [0] * 7 + [1] * 5


def test_same_seed_same_result():
    params = ModelParams.equal(40, 9, 3)
    a = simulate(params, [exactly(1)], R=3000, seed=11)
    b = simulate(params, [exactly(1)], R=3000, seed=11)
    assert np.array_equal(a.profiles, b.profiles)
    assert a.moments == b.moments and a.pmfs == b.pmfs
    c = simulate(params, [exactly(1)], R=3000, seed=12)
    assert not np.array_equal(a.profiles, c.profiles)


@pytest.mark.parametrize("workers", [2, 3, 7])
def test_workers_do_not_change_results(workers):
    params = ModelParams(25, (3, 8, 12))
    base = simulate_profiles(params, R=1001, seed=5)
    assert np.array_equal(simulate_profiles(params, R=1001, seed=5, workers=workers), base)


def test_prefix_stability():
    # replicate r depends only on (seed, r)
    params = ModelParams.equal(20, 6, 2)
    assert np.array_equal(
        simulate_profiles(params, R=100, seed=3)[:40], simulate_profiles(params, R=40, seed=3)
    )


def test_tiny_overlap_frequency(tiny):
    R = 100_000
    res = simulate(tiny, [exactly(2)], R=R, seed=2)
    p = 1 / 6
    assert abs(res.pmfs[exactly(2)][2] - p) <= 5 * (p * (1 - p) / R) ** 0.5
    assert sum(res.pmfs[exactly(2)].probs) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.slow
def test_individual_marginal_frequency(small):
    # frequency of K_1 = 2 against the binomial marginal 0.2048
    R = 100_000
    hits = sum(sample_once(small, replicate_stream(99, r))[0] == 2 for r in range(R))
    pi = 0.2048
    assert abs(hits / R - pi) <= 5 * (pi * (1 - pi) / R) ** 0.5


@pytest.mark.slow
def test_s1_mean(small):
    res = simulate(small, [exactly(2), at_least(2)], R=100_000, seed=4)
    assert abs(res.moments[exactly(2)].mean - 20.48) <= 5 * (11.049 / 100_000) ** 0.5


@pytest.mark.slow
def test_s2_mean():
    params = ModelParams.equal(5000, 1000, 5)
    res = simulate(params, [exactly(5)], R=100_000, seed=4)
    assert abs(res.moments[exactly(5)].mean - 1.6) <= 5 * (1.58926437 / 100_000) ** 0.5


def test_argument_checks(tiny):
    with pytest.raises(MaoError):
        simulate(tiny, [exactly(1)], R=0)
    with pytest.raises(MaoError):
        simulate(tiny, [exactly(3)], R=10)
    with pytest.raises(MaoError):
        simulate_profiles(tiny, R=10, workers=0)
