import itertools
from fractions import Fraction

import pytest

from mao.exact_dist import (
    BudgetExceededError,
    advance,
    count_partitions,
    estimate_profile_states,
    exact_marginal_pmf,
    exact_profile_distribution,
    initial_distribution,
    marginal_pmf,
    pmf_moments,
)
from mao.model import MaoError, ModelParams, at_least, exactly
from mao.moments import formula_report
from mao.pmf import Pmf


def test_first_round_is_deterministic():
    dist = advance(initial_distribution(10), 3)
    assert dist.canonical() == {(7, 3): 1}


def test_two_subsets_of_four(tiny):
    law = marginal_pmf(exact_profile_distribution(tiny), exactly(2))
    assert law.probs == (Fraction(1, 6), Fraction(4, 6), Fraction(1, 6), 0, 0)
    assert exact_marginal_pmf(tiny, exactly(2)) == law
    assert marginal_pmf(exact_profile_distribution(tiny), exactly(0))[4] == 0


def test_single_round_point_mass():
    params = ModelParams(9, (4,))
    law = exact_marginal_pmf(params, exactly(1))
    assert law.support == [4]
    assert pmf_moments(law).variance == 0


def test_invariants_and_mass():
    params = ModelParams(9, (2, 5, 3, 7))
    dist = initial_distribution(9)
    for m in params.m:
        dist = advance(dist, m)
        assert dist.invariant_violations() == []
        assert dist.total() == 1


def test_round_order_does_not_matter():
    params = ModelParams(8, (1, 3, 6, 4))
    base = exact_profile_distribution(params).canonical()
    for order in itertools.permutations(range(4)):
        assert exact_profile_distribution(params.permuted(order)).canonical() == base


@pytest.mark.parametrize("m", [(5, 5, 5, 5), (3, 5, 7), (1, 11, 6, 2, 9)])
def test_pooled_route_matches_full_profile(m):
    params = ModelParams(12, m)
    dist = exact_profile_distribution(params)
    for t in range(params.T + 1):
        for var in (exactly(t), at_least(t)):
            assert exact_marginal_pmf(params, var) == marginal_pmf(dist, var)


def test_float_mode_close_to_exact():
    params = ModelParams(40, (8, 15, 3, 22))
    for var in (exactly(2), at_least(2)):
        a = exact_marginal_pmf(params, var, mode="exact")
        b = exact_marginal_pmf(params, var, mode="float")
        assert b.mode == "float"
        assert max(abs(float(x) - y) for x, y in zip(a.probs, b.probs)) < 1e-14
    full = exact_profile_distribution(params, mode="float")
    assert abs(full.total() - 1) < 1e-12


def test_float_mode_is_reproducible():
    params = ModelParams.equal(150, 30, 4)
    a = exact_marginal_pmf(params, exactly(2), mode="float")
    b = exact_marginal_pmf(params, exactly(2), mode="float")
    assert a == b


def test_formula_agreement(small):
    for var in (exactly(3), at_least(3)):
        pmf = exact_marginal_pmf(small, var)
        assert pmf_moments(pmf).values() == formula_report(small, var).values()
    assert exact_marginal_pmf(small, exactly(2)).mean() == Fraction(512, 25)


def test_unequal_sizes_reference_value(unequal):
    rep = pmf_moments(exact_marginal_pmf(unequal, exactly(4)))
    assert float(rep.fourth) == pytest.approx(10.644157, rel=1e-6)
    assert float(pmf_moments(exact_marginal_pmf(unequal, exactly(5))).mean) == pytest.approx(0.084)


def test_state_estimate():
    assert count_partitions(5, 2) == 3
    assert count_partitions(100, 5) == 46262
    params = ModelParams.equal(100, 20, 5)
    assert estimate_profile_states(params) == 46262
    with pytest.raises(BudgetExceededError) as err:
        exact_profile_distribution(params, budget=1000)
    assert err.value.estimate == 46262
    with pytest.raises(BudgetExceededError):
        exact_marginal_pmf(params, exactly(2), budget=5)
    with pytest.raises(BudgetExceededError):
        exact_marginal_pmf(ModelParams.equal(5000, 1000, 5), exactly(2))


def test_advance_rejects_bad_size():
    with pytest.raises(MaoError):
        advance(initial_distribution(5), 5)
    with pytest.raises(MaoError):
        advance(initial_distribution(5), 0)


def test_pmf_validation():
    with pytest.raises(MaoError):
        Pmf((Fraction(1, 2), Fraction(1, 3)), "exact")
    with pytest.raises(MaoError):
        Pmf((1.5, -0.5))
    law = Pmf((0.25, 0.75))
    assert law.reflected(1).probs == (0.75, 0.25)
    assert law.cdf(0) == 0.25 and law.sf(1) == 0.75 and law[7] == 0.0
