"""Acceptance suite: one pass/fail line per criterion, run via ``mao.verify``.

The two full profile laws (N=100 equal and unequal sizes) are built once
per session and shared by criteria 2 and 4.
"""

import importlib

import pytest

from mao import verify

norm = importlib.import_module("mao.norm")

NAMES = {
    1: "equal_n100_formulas",
    2: "equal_n100_exact_dp",
    3: "equal_n5000_formulas",
    4: "unequal_n100_exact_dp",
    5: "monte_carlo_agreement",
    6: "oracle_equivalence",
    7: "underdispersion",
    8: "chen_stein_bound",
    9: "covariance_expansion",
    10: "clt_trend",
    11: "joint_probability_decay",
}


@pytest.mark.parametrize("number", sorted(NAMES), ids=[f"{n:02d}_{NAMES[n]}" for n in sorted(NAMES)])
def test_criterion(number, verify_context):
    result = verify.CRITERIA[number](verify_context)
    print(result.line())
    for d in result.details:
        print("   ", d)
    assert result.passed, result.measured


def test_broken_denominator_is_caught(monkeypatch, verify_context):
    monkeypatch.setattr(norm, "_denominator", lambda N, r, T: norm.falling_factorial(N, r) ** T)
    norm.clear_caches()
    result = verify.criterion_1(verify_context)
    print(result.line())
    assert not result.passed
