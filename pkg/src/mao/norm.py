"""MAO function, transversal sums and the MAO norm (equal subset sizes).

For a category list ``(t_1, ..., t_r)`` the transversal sum adds, over every
tuple of index sets ``A_1..A_r`` of ``{1..T}`` with ``|A_j| = t_j``, the
weight

    g = prod_i (m)_{k_i} (N - m)_{r - k_i},   k_i = #{j : i in A_j}.

Dividing by ``(N)_r ** (T - 1)`` gives the norm, which equals the mixed
factorial moment ``E[prod_t (X_{=t})_{n_t}]`` where ``n_t`` counts how often
``t`` occurs in the list.

Two evaluators are provided.  :func:`transversal_sum_enumerate` walks every
tuple and is kept as an oracle.  :func:`transversal_sum_dp` sweeps the ``T``
indices one at a time; because ``g`` only depends on how many rows include
an index, rows with equal residual quota are interchangeable, so the state is
the multiset of residual quotas and each step picks how many rows of each
quota to include (with a binomial multiplicity).
"""

from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from typing import Literal, Sequence

from .combinatorics import binomial, falling_factorial
from .model import MaoError, ModelParams

Method = Literal["dp", "enumerate"]

#: Longest category list accepted (mixed moments up to order 8).
MAX_ARITY = 8


def check_categories(params: ModelParams, categories: Sequence[int]) -> tuple[int, ...]:
    cats = tuple(int(t) for t in categories)
    if not cats:
        raise MaoError("category list must be non-empty")
    if len(cats) > MAX_ARITY:
        raise MaoError(f"category lists longer than {MAX_ARITY} are not supported")
    for t in cats:
        if not 0 <= t <= params.T:
            raise MaoError(f"category {t} outside 0..T={params.T}")
    if len(cats) > params.N:
        raise MaoError(f"list length r={len(cats)} exceeds N={params.N}")
    return cats


def _column_weights(N: int, m: int, r: int) -> list[int]:
    return [falling_factorial(m, k) * falling_factorial(N - m, r - k) for k in range(r + 1)]


def g_value(params: ModelParams, k: Sequence[int], r: int) -> int:
    """``prod_i (m)_{k_i} (N-m)_{r-k_i}`` for a vector of index multiplicities."""
    m = params.size
    if len(k) != params.T:
        raise MaoError(f"k must have T={params.T} entries, got {len(k)}")
    out = 1
    for ki in k:
        if not 0 <= ki <= r:
            raise MaoError(f"k entries must lie in 0..r={r}, got {ki}")
        out *= falling_factorial(m, ki) * falling_factorial(params.N - m, r - ki)
    return out


def transversal_sum_enumerate(params: ModelParams, categories: Sequence[int]) -> int:
    """Transversal sum by walking all ``prod_j C(T, t_j)`` tuples."""
    cats = check_categories(params, categories)
    m, N, T, r = params.size, params.N, params.T, len(cats)
    weights = _column_weights(N, m, r)
    choices = [list(itertools.combinations(range(T), t)) for t in cats]
    total = 0
    for tup in itertools.product(*choices):
        k = [0] * T
        for subset in tup:
            for i in subset:
                k[i] += 1
        term = 1
        for ki in k:
            term *= weights[ki]
        total += term
    return total


def _dp_sum(N: int, m: int, T: int, cats: tuple[int, ...]) -> int:
    r = len(cats)
    weights = _column_weights(N, m, r)
    start = tuple(sorted(t for t in cats if t > 0))
    if start and start[-1] > T:
        return 0
    states: dict[tuple[int, ...], int] = {start: 1}
    for col in range(T):
        left_after = T - col - 1
        nxt: dict[tuple[int, ...], int] = {}
        for state, acc in states.items():
            groups = sorted(Counter(state).items())
            ranges = []
            for v, n in groups:
                if v > left_after + 1:
                    break
                lo = n if v == left_after + 1 else 0
                ranges.append(range(lo, n + 1))
            else:
                for picks in itertools.product(*ranges):
                    w = acc * weights[sum(picks)]
                    new: list[int] = []
                    for (v, n), b in zip(groups, picks):
                        w *= binomial(n, b)
                        if v > 1:
                            new.extend([v - 1] * b)
                        new.extend([v] * (n - b))
                    key = tuple(sorted(new))
                    nxt[key] = nxt.get(key, 0) + w
        states = nxt
    return states.get((), 0)


@lru_cache(maxsize=4096)
def _dp_sum_cached(N: int, m: int, T: int, cats: tuple[int, ...]) -> int:
    return _dp_sum(N, m, T, cats)


def transversal_sum_dp(params: ModelParams, categories: Sequence[int]) -> int:
    """Transversal sum by the index-by-index dynamic program."""
    cats = check_categories(params, categories)
    return _dp_sum_cached(params.N, params.size, params.T, tuple(sorted(cats)))


def transversal_sum(
    params: ModelParams, categories: Sequence[int], method: Method = "dp"
) -> int:
    if method == "dp":
        return transversal_sum_dp(params, categories)
    if method == "enumerate":
        return transversal_sum_enumerate(params, categories)
    raise MaoError(f"unknown transversal-sum method {method!r}")


def _denominator(N: int, r: int, T: int) -> int:
    return falling_factorial(N, r) ** (T - 1)


def norm(
    params: ModelParams, categories: Sequence[int], method: Method = "dp"
) -> Fraction:
    """The MAO norm ``||t_1, ..., t_r||_T`` as an exact rational.

    Equals ``E[prod_t (X_{=t})_{n_t}]`` where ``n_t`` is the multiplicity of
    ``t`` in ``categories``.  Only defined for equal subset sizes.
    """
    if not params.equal_sizes:
        raise MaoError("the norm is only defined for equal subset sizes")
    cats = check_categories(params, categories)
    total = transversal_sum(params, cats, method)
    return Fraction(total, _denominator(params.N, len(cats), params.T))


def clear_caches() -> None:
    _dp_sum_cached.cache_clear()
