"""Exact laws of occupancy profiles by a round-by-round dynamic program.

After ``j`` rounds the state is the profile ``c = (c_0, ..., c_j)``: ``c_i``
individuals lie in exactly ``i`` of the subsets drawn so far.  Drawing the
next subset of size ``m`` takes ``a_i`` individuals from class ``i`` with
multivariate hypergeometric probability ``prod_i C(c_i, a_i) / C(N, m)``;
those move up one class.

Exact mode keeps integer counts of subset tuples (the probability is the count
over ``prod_j C(N, m_j)``), so no rational normalisation happens until a value
is read.  Float mode runs the same recursion in compiled code.

:func:`exact_marginal_pmf` is a faster route to the law of a single count.
It tracks only the classes that can still end at ``t`` given the rounds left
(plus, for ``X_{>=t}``, the number already at ``t`` or above) and pools every
other individual, which shrinks the state space by orders of magnitude.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, prod
from typing import Iterator, Literal, Sequence, Union

import numpy as np

from .model import BudgetExceededError, MaoError, ModelParams, VariableSpec
from .moments import MomentReport
from .pmf import Pmf

log = logging.getLogger(__name__)

Mode = Literal["exact", "float"]
Weight = Union[int, float]
Label = Union[int, str]

DEFAULT_BUDGET = 10_000_000
#: Exact mode is the default up to this population size.
EXACT_DEFAULT_MAX_N = 200
FLOAT_DRIFT_TOL = 1e-12
#: Upper bounds on estimated allocation visits for one round.
MAX_WORK = {"exact": 2_000_000_000, "float": 200_000_000_000}
#: Binomial tables are (N+1)^2; beyond this the DP is refused up front.
MAX_DP_N = 1000

REACHED = "R"


def default_mode(N: int) -> Mode:
    return "exact" if N <= EXACT_DEFAULT_MAX_N else "float"


@dataclass
class ProfileDistribution:
    """Law of the occupancy profile after ``len(sizes)`` rounds.

    ``weights[c] / scale`` is the probability of profile ``c``.  In exact
    mode weights and scale are integers (``scale = prod C(N, m_j)``); in
    float mode ``scale`` is 1.0.
    """

    N: int
    sizes: tuple[int, ...]
    weights: dict[tuple[int, ...], Weight]
    scale: Weight = 1
    mode: Mode = "exact"
    drift: float = field(default=0.0, compare=False)

    @property
    def rounds(self) -> int:
        return len(self.sizes)

    def __len__(self) -> int:
        return len(self.weights)

    def probability(self, profile: Sequence[int]) -> Fraction | float:
        w = self.weights.get(tuple(profile), 0)
        if self.mode == "exact":
            return Fraction(w, self.scale)
        return w / self.scale

    def items(self) -> Iterator[tuple[tuple[int, ...], Fraction | float]]:
        for c, w in self.weights.items():
            if self.mode == "exact":
                yield c, Fraction(w, self.scale)
            else:
                yield c, w / self.scale

    def total(self) -> Fraction | float:
        s = sum(self.weights.values())
        return Fraction(s, self.scale) if self.mode == "exact" else s / self.scale

    def invariant_violations(self) -> list[tuple[int, ...]]:
        """Profiles breaking count or membership conservation."""
        mass = sum(self.sizes)
        bad = []
        for c in self.weights:
            if len(c) != self.rounds + 1 or sum(c) != self.N:
                bad.append(c)
            elif sum(i * x for i, x in enumerate(c)) != mass:
                bad.append(c)
        return bad

    def canonical(self) -> dict[tuple[int, ...], Fraction | float]:
        return dict(sorted(self.items()))


def initial_distribution(N: int, mode: Mode = "exact") -> ProfileDistribution:
    one: Weight = 1 if mode == "exact" else 1.0
    return ProfileDistribution(N, (), {(N,): one}, one, mode)


# -- generic one-round transition over tracked classes ----------------------


@lru_cache(maxsize=8)
def _binomial_rows(n_max: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(comb(n, k) for k in range(n + 1)) for n in range(n_max + 1))


@lru_cache(maxsize=4)
def _log_binomials(n_max: int) -> np.ndarray:
    from ._kernels import log_binomial_table

    return log_binomial_table(n_max)


def _exact_transition(
    states: dict[tuple[int, ...], int],
    N: int,
    m: int,
    stay_to: Sequence[int],
    move_to: Sequence[int],
    n_tgt: int,
) -> dict[tuple[int, ...], int]:
    binom = _binomial_rows(N)
    out: dict[tuple[int, ...], int] = {}
    get = out.get
    for c, weight in states.items():
        W = len(c)
        suffix = [0] * (W + 1)
        for w in range(W - 1, -1, -1):
            suffix[w] = suffix[w + 1] + c[w]
        inert = N - suffix[0]
        inert_row = binom[inert]
        a = [0] * W

        def walk(w: int, rem: int, acc: int) -> None:
            if w == W:
                tgt = [0] * n_tgt
                for k in range(W):
                    s = stay_to[k]
                    if s >= 0:
                        tgt[s] += c[k] - a[k]
                    mv = move_to[k]
                    if mv >= 0:
                        tgt[mv] += a[k]
                key = tuple(tgt)
                out[key] = get(key, 0) + acc * inert_row[rem]
                return
            cw = c[w]
            row = binom[cw]
            lo = rem - suffix[w + 1] - inert
            if lo < 0:
                lo = 0
            hi = cw if cw < rem else rem
            for x in range(lo, hi + 1):
                a[w] = x
                walk(w + 1, rem - x, acc * row[x])

        walk(0, m, weight)
    return out


def _float_transition(
    states: dict[tuple[int, ...], float],
    N: int,
    m: int,
    stay_to: Sequence[int],
    move_to: Sequence[int],
    n_tgt: int,
) -> dict[tuple[int, ...], float]:
    from ._kernels import float_transition

    keys = sorted(states)
    src = np.array(keys, dtype=np.int64).reshape(len(keys), -1)
    prob = np.array([states[k] for k in keys], dtype=np.float64)
    out, vals = float_transition(src, prob, N, m, stay_to, move_to, n_tgt, _log_binomials(N))
    return {tuple(int(x) for x in row): float(v) for row, v in zip(out, vals)}


def _maps(
    src: Sequence[Label], tgt: Sequence[Label], absorb_from: int | None
) -> tuple[list[int], list[int]]:
    """Where the stayers and the movers of each source column end up (-1: untracked)."""
    index = {lab: i for i, lab in enumerate(tgt)}

    def locate(lab: Label) -> int:
        if lab in index:
            return index[lab]
        if absorb_from is not None and isinstance(lab, int) and lab >= absorb_from:
            return index.get(REACHED, -1)
        return -1

    stay, move = [], []
    for lab in src:
        if lab == REACHED:
            stay.append(index[REACHED])
            move.append(index[REACHED])
        else:
            stay.append(locate(lab))
            move.append(locate(lab + 1))
    return stay, move


def _work_estimate(states: dict, m: int, W: int) -> int:
    """Rough count of allocations visited by one transition."""
    if not states:
        return 0
    cap = comb(m + W, W)
    total = 0
    for c in states:
        total += min(cap, prod(min(x, m) + 1 for x in c))
    return total


def _step(states, N, m, src_labels, tgt_labels, absorb_from, mode, budget):
    stay, move = _maps(src_labels, tgt_labels, absorb_from)
    work = _work_estimate(states, m, len(src_labels))
    if work > MAX_WORK[mode]:
        raise BudgetExceededError(
            f"one round would visit about {work:.3g} allocations "
            f"(limit {MAX_WORK[mode]:.3g} in {mode} mode)",
            work,
        )
    fn = _exact_transition if mode == "exact" else _float_transition
    out = fn(states, N, m, stay, move, len(tgt_labels))
    if len(out) > budget:
        raise BudgetExceededError(
            f"state space reached {len(out)} profiles (budget {budget})", len(out)
        )
    return out


def _check_population(N: int) -> None:
    if N > MAX_DP_N:
        raise BudgetExceededError(
            f"exact DP supports N <= {MAX_DP_N}, got N={N}; use simulation", N
        )


def _check_size(N: int, m: int) -> None:
    if not 0 < m < N:
        raise MaoError(f"subset size must satisfy 0 < m < N={N}, got {m}")


# -- full profile ------------------------------------------------------------


def advance(
    dist: ProfileDistribution, m_next: int, budget: int = DEFAULT_BUDGET
) -> ProfileDistribution:
    """Law of the profile after one more round with a subset of size ``m_next``."""
    _check_size(dist.N, m_next)
    _check_population(dist.N)
    j = dist.rounds
    weights = _step(
        dist.weights,
        dist.N,
        m_next,
        list(range(j + 1)),
        list(range(j + 2)),
        None,
        dist.mode,
        budget,
    )
    if dist.mode == "exact":
        scale: Weight = dist.scale * comb(dist.N, m_next)
        drift = 0.0
    else:
        total = sum(weights.values())
        drift = abs(total - 1.0)
        weights = {c: w / total for c, w in weights.items()}
        scale = 1.0
    return ProfileDistribution(dist.N, dist.sizes + (m_next,), weights, scale, dist.mode, drift)


def count_partitions(total: int, max_part: int) -> int:
    """Number of partitions of ``total`` into parts of size at most ``max_part``."""
    ways = [1] + [0] * total
    for part in range(1, max_part + 1):
        for s in range(part, total + 1):
            ways[s] += ways[s - part]
    return ways[total]


def estimate_profile_states(params: ModelParams) -> int:
    """Upper bound on the largest number of stored profiles over all rounds.

    A profile after ``j`` rounds is a partition of ``m_1 + ... + m_j`` into
    parts no larger than ``j`` (the zero class takes up the rest).
    """
    best, mass = 1, 0
    for j, m in enumerate(params.m, start=1):
        mass += m
        best = max(best, count_partitions(mass, j))
    return best


def exact_profile_distribution(
    params: ModelParams, mode: Mode | None = None, budget: int = DEFAULT_BUDGET
) -> ProfileDistribution:
    """Law of ``(X_{=0}, ..., X_{=T})``, folding :func:`advance` over the sizes."""
    mode = mode or default_mode(params.N)
    _check_population(params.N)
    estimate = estimate_profile_states(params)
    if estimate > budget:
        raise BudgetExceededError(
            f"{params}: about {estimate} occupancy profiles needed, budget is {budget}",
            estimate,
        )
    dist = initial_distribution(params.N, mode)
    for m in params.m:
        dist = advance(dist, m, budget)
        log.debug("round %d: %d profiles", dist.rounds, len(dist))
    if dist.drift > FLOAT_DRIFT_TOL:
        log.warning("float profile law drifted by %.3g before renormalisation", dist.drift)
    return dist


def marginal_pmf(dist: ProfileDistribution, var: VariableSpec) -> Pmf:
    """Law of ``X_{=t}`` or ``X_{>=t}`` read off a complete profile law."""
    T = dist.rounds
    var.categories(T)
    agg: dict[int, Weight] = {}
    for c, w in dist.weights.items():
        v = var.value(c)
        agg[v] = agg.get(v, 0) + w
    if dist.mode == "exact":
        probs = {k: Fraction(w, dist.scale) for k, w in agg.items()}
    else:
        total = sum(agg.values())
        probs = {k: w / total for k, w in agg.items()}
    return Pmf.from_mapping(probs, dist.mode, size=dist.N + 1)


# -- single count, pooled classes ---------------------------------------------


def _labels(var: VariableSpec, T: int, j: int) -> list[Label]:
    """Tracked classes after ``j`` of ``T`` rounds."""
    t = var.t
    lo = max(0, t - (T - j))
    if var.kind == "exactly":
        return list(range(lo, min(t, j) + 1))
    return list(range(lo, min(t - 1, j) + 1)) + [REACHED]


def exact_marginal_pmf(
    params: ModelParams,
    var: VariableSpec,
    mode: Mode | None = None,
    budget: int = DEFAULT_BUDGET,
) -> Pmf:
    """Law of one count without building the full profile law."""
    T, N = params.T, params.N
    var.categories(T)
    mode = mode or default_mode(N)
    _check_population(N)
    absorb = var.t if var.kind == "at_least" else None
    labels = _labels(var, T, 0)
    # Everyone starts in class 0, which for X_{>=0} is already the reached pool.
    start = tuple(N if lab == 0 or (lab == REACHED and var.t == 0) else 0 for lab in labels)
    states: dict[tuple[int, ...], Weight] = {start: 1 if mode == "exact" else 1.0}
    scale: Weight = 1
    drift = 0.0
    for j, m in enumerate(params.m):
        _check_size(N, m)
        nxt = _labels(var, T, j + 1)
        states = _step(states, N, m, labels, nxt, absorb, mode, budget)
        labels = nxt
        if mode == "exact":
            scale *= comb(N, m)
        else:
            total = sum(states.values())
            drift = max(drift, abs(total - 1.0))
            states = {c: w / total for c, w in states.items()}
    if drift > FLOAT_DRIFT_TOL:
        log.warning("float marginal law drifted by %.3g before renormalisation", drift)
    # After the last round exactly one column remains: class t or the reached pool.
    agg: dict[int, Weight] = {}
    for c, w in states.items():
        agg[c[0]] = agg.get(c[0], 0) + w
    if mode == "exact":
        probs = {k: Fraction(w, scale) for k, w in agg.items()}
    else:
        total = sum(agg.values())
        probs = {k: w / total for k, w in agg.items()}
    return Pmf.from_mapping(probs, mode, size=N + 1)


def pmf_moments(pmf: Pmf) -> MomentReport:
    """Mean and central moments 2-4 by direct summation."""
    mu = pmf.mean()
    zero = Fraction(0) if pmf.mode == "exact" else 0.0
    c = [zero, zero, zero]
    for k, p in pmf.items():
        if p:
            d = k - mu
            d2 = d * d
            c[0] += p * d2
            c[1] += p * d2 * d
            c[2] += p * d2 * d2
    return MomentReport(mu, c[0], c[1], c[2], pmf.mode, "pmf")
