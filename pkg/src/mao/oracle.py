"""Brute-force ground truth: walk every tuple of subsets.

Each of the ``prod_j C(N, m_j)`` tuples is equally likely, so tallying them
gives exact laws with no modelling step in between.  Only for tiny instances.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import comb, prod
from typing import Mapping

from .combinatorics import falling_factorial
from .exact_dist import ProfileDistribution
from .model import BudgetExceededError, MaoError, ModelParams, VariableSpec
from .pmf import Pmf

ORACLE_BUDGET = 10**7


def outcome_count(params: ModelParams) -> int:
    return prod(comb(params.N, m) for m in params.m)


@dataclass(frozen=True)
class ExhaustiveLaw:
    params: ModelParams
    outcomes: int
    memberships: Counter  # K vector -> number of tuples producing it

    def profile_distribution(self) -> ProfileDistribution:
        T = self.params.T
        weights: dict[tuple[int, ...], int] = {}
        for K, n in self.memberships.items():
            c = [0] * (T + 1)
            for k in K:
                c[k] += 1
            key = tuple(c)
            weights[key] = weights.get(key, 0) + n
        return ProfileDistribution(self.params.N, self.params.m, weights, self.outcomes, "exact")

    def marginal_pmf(self, var: VariableSpec) -> Pmf:
        law: dict[int, Fraction] = {}
        for c, p in self.profile_distribution().items():
            v = var.value(c)
            law[v] = law.get(v, Fraction(0)) + p
        return Pmf.from_mapping(law, "exact", self.params.N + 1)

    def factorial_moment(self, counts: Mapping[int, int]) -> Fraction:
        """``E[prod_t (X_{=t})_{n_t}]`` averaged over all tuples."""
        total = 0
        for c, n in self.profile_distribution().weights.items():
            term = n
            for t, r in counts.items():
                term *= falling_factorial(c[t], r)
            total += term
        return Fraction(total, self.outcomes)

    def joint_prob(self, t: int, k: int) -> Fraction:
        """``P(K_1 = ... = K_k = t)`` by direct counting."""
        if not 1 <= k <= self.params.N:
            raise MaoError(f"k must lie in 1..N, got {k}")
        hits = sum(n for K, n in self.memberships.items() if all(x == t for x in K[:k]))
        return Fraction(hits, self.outcomes)


def enumerate_all(params: ModelParams, budget: int = ORACLE_BUDGET) -> ExhaustiveLaw:
    total = outcome_count(params)
    if total > budget:
        raise BudgetExceededError(
            f"{params}: {total} subset tuples exceed the oracle budget {budget}", total
        )
    N = params.N
    rounds = [list(itertools.combinations(range(N), m)) for m in params.m]
    memberships: Counter = Counter()
    seen = 0
    for tup in itertools.product(*rounds):
        K = [0] * N
        for subset in tup:
            for i in subset:
                K[i] += 1
        memberships[tuple(K)] += 1
        seen += 1
    if seen != total:
        raise AssertionError(f"enumerated {seen} tuples, expected {total}")
    return ExhaustiveLaw(params, seen, memberships)
