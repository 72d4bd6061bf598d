import math
from fractions import Fraction

import pytest
from scipy import stats

from mao.combinatorics import (
    binomial,
    central_from_raw,
    compositions,
    falling_factorial,
    multinomial,
    raw_from_factorial,
    stirling2,
)


def test_falling_factorial():
    assert falling_factorial(10, 0) == 1
    assert falling_factorial(10, 3) == 720
    assert falling_factorial(3, 5) == 0
    assert falling_factorial(Fraction(1, 2), 2) == Fraction(-1, 4)
    with pytest.raises(ValueError):
        falling_factorial(5, -1)


def test_binomial_outside_range_is_zero():
    assert binomial(5, 2) == 10
    assert binomial(5, 6) == 0
    assert binomial(5, -1) == 0


def test_stirling_rows():
    assert [stirling2(4, k) for k in range(5)] == [0, 1, 7, 6, 1]
    assert stirling2(0, 0) == 1
    # Bell numbers are row sums.
    assert sum(stirling2(8, k) for k in range(9)) == 4140
    with pytest.raises(ValueError):
        stirling2(9, 2)


def test_factorial_to_central_against_binomial_law():
    n, p = 12, Fraction(3, 10)
    # E[(X)_k] = (n)_k p^k for a binomial count.
    fm = [falling_factorial(n, k) * p**k for k in range(5)]
    raw = raw_from_factorial(fm)
    c = central_from_raw(raw)
    mean, var, skew, kurt = stats.binom.stats(n, float(p), moments="mvsk")
    assert raw[1] == n * p
    assert c[2] == n * p * (1 - p)
    assert float(c[3]) == pytest.approx(skew * var**1.5, rel=1e-12)
    assert float(c[4]) == pytest.approx((kurt + 3) * var**2, rel=1e-12)


def test_compositions_and_multinomial():
    comps = list(compositions(4, 3))
    assert len(comps) == math.comb(6, 2)
    assert len(set(comps)) == len(comps)
    assert all(sum(c) == 4 for c in comps)
    assert list(compositions(0, 0)) == [()]
    assert multinomial((2, 1, 1)) == 12
    # Multinomial theorem at x = (1, 1, 1).
    assert sum(multinomial(c) for c in compositions(4, 3)) == 3**4
