import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mao.combinatorics import binomial, falling_factorial
from mao.model import MaoError, ModelParams
from mao.norm import g_value, norm, transversal_sum


def test_single_category_values(small):
    assert norm(small, [2]) == Fraction(512, 25)
    assert norm(small, [5]) == Fraction(4, 125)
    assert transversal_sum(small, [2]) == 2048000000


def test_tiny_transversal_sum(tiny):
    # Two index sets of size 1 out of {1, 2}: (m)_1 (N-m)_0 * (m)_0 (N-m)_1 twice.
    assert transversal_sum(tiny, [1]) == 8
    assert transversal_sum(tiny, [1], method="enumerate") == 8


def test_pair_value(small):
    assert float(norm(small, [2, 2])) == pytest.approx(409.99942327389, rel=1e-12)


def test_g_value():
    params = ModelParams.equal(10, 3, 2)
    assert g_value(params, [1, 0], 1) == 3 * 7
    with pytest.raises(MaoError):
        g_value(params, [2, 0], 1)


@st.composite
def small_instances(draw):
    N = draw(st.integers(3, 9))
    m = draw(st.integers(1, N - 1))
    T = draw(st.integers(1, 4))
    r = draw(st.integers(1, min(3, N)))
    cats = draw(st.lists(st.integers(0, T), min_size=r, max_size=r))
    return ModelParams.equal(N, m, T), cats


@settings(max_examples=60, deadline=None)
@given(small_instances())
def test_dp_matches_enumeration(case):
    params, cats = case
    assert transversal_sum(params, cats, "dp") == transversal_sum(params, cats, "enumerate")


@settings(max_examples=40, deadline=None)
@given(small_instances(), st.randoms(use_true_random=False))
def test_permutation_invariance(case, rnd):
    params, cats = case
    shuffled = list(cats)
    rnd.shuffle(shuffled)
    assert norm(params, cats) == norm(params, shuffled)


@pytest.mark.parametrize("N,m,T", [(10, 2, 3), (30, 7, 4), (100, 20, 5), (5000, 1000, 5)])
def test_single_category_is_binomial_mean(N, m, T):
    params = ModelParams.equal(N, m, T)
    p = Fraction(m, N)
    for t in range(T + 1):
        assert norm(params, [t]) == N * binomial(T, t) * p**t * (1 - p) ** (T - t)


@pytest.mark.parametrize("N", [20, 50, 100])
@pytest.mark.parametrize("p", [Fraction(1, 10), Fraction(1, 5), Fraction(1, 2)])
@pytest.mark.parametrize("T", [2, 3, 4, 5])
def test_pair_norm_below_square(N, p, T):
    params = ModelParams.equal(N, int(N * p), T)
    for t in range(T + 1):
        assert norm(params, [t]) ** 2 >= norm(params, [t, t])


def test_norm_sums_to_population_pairs():
    # sum over t, s of E[X_t X_s] - E[X_t] over t = s gives N(N-1).
    params = ModelParams.equal(12, 5, 3)
    total = sum(norm(params, [t, s]) for t in range(4) for s in range(4))
    assert total == falling_factorial(12, 2)


def test_errors():
    with pytest.raises(MaoError):
        norm(ModelParams(10, (2, 3)), [1])
    params = ModelParams.equal(10, 2, 3)
    with pytest.raises(MaoError):
        norm(params, [])
    with pytest.raises(MaoError):
        norm(params, [4])
    with pytest.raises(MaoError):
        norm(params, [0] * 9)
    with pytest.raises(MaoError):
        norm(ModelParams.equal(3, 1, 2), [0, 0, 0, 0])
    with pytest.raises(MaoError):
        transversal_sum(params, [1], method="bogus")
