"""Means, variances, covariances and central moments from MAO norms.

The norm of a category list is a *factorial* moment.  Ordinary products of
powers are recovered per category with Stirling numbers of the second kind:

    E[prod_s X_s^{e_s}] = sum_{j_s <= e_s} prod_s S(e_s, j_s) * ||s repeated j_s||

``X_{>=t}`` is the sum of ``X_{=s}`` over ``s >= t``; its raw moments come from
the multinomial expansion of that sum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Literal, Mapping, Sequence, Union

from .combinatorics import (
    central_from_raw,
    compositions,
    falling_factorial,
    multinomial,
    raw_from_factorial,
    stirling2,
)
from .model import MaoError, ModelParams, VariableSpec
from . import norm as _norm

Scalar = Union[int, Fraction, float]
Mode = Literal["exact", "float"]
MomentMethod = Literal["formula", "exact_dp", "monte_carlo"]

MAX_ORDER = 4


@dataclass(frozen=True)
class MomentReport:
    """Mean and central moments of orders 2-4 of one count variable."""

    mean: Scalar
    variance: Scalar
    third: Scalar
    fourth: Scalar
    mode: Mode = "exact"
    method: str = "formula"

    def as_floats(self) -> "MomentReport":
        return replace(
            self,
            mean=float(self.mean),
            variance=float(self.variance),
            third=float(self.third),
            fourth=float(self.fourth),
            mode="float",
        )

    def values(self) -> tuple[Scalar, Scalar, Scalar, Scalar]:
        return (self.mean, self.variance, self.third, self.fourth)


def _norm_or_one(params: ModelParams, cats: Sequence[int]) -> Fraction:
    if not cats:
        return Fraction(1)
    return _norm.norm(params, cats)


def factorial_moment(params: ModelParams, counts: Mapping[int, int]) -> Fraction:
    """``E[prod_t (X_{=t})_{n_t}]`` for ``counts = {t: n_t}``."""
    cats: list[int] = []
    for t, n in sorted(counts.items()):
        params.check_category(t)
        if n < 0:
            raise MaoError(f"repetition counts must be >= 0, got {n} for t={t}")
        cats.extend([t] * n)
    if len(cats) > _norm.MAX_ARITY:
        raise MaoError(f"total order {len(cats)} exceeds {_norm.MAX_ARITY}")
    if len(cats) > params.N:
        # (X)_n vanishes identically once n exceeds every possible count.
        return Fraction(0)
    return _norm_or_one(params, cats)


def mixed_raw_moment(params: ModelParams, powers: Mapping[int, int]) -> Fraction:
    """``E[prod_t X_{=t}^{e_t}]`` for ``powers = {t: e_t}``."""
    items = [(t, e) for t, e in sorted(powers.items()) if e > 0]
    total = Fraction(0)
    for js in itertools.product(*(range(1, e + 1) for _, e in items)):
        coeff = 1
        for (_, e), j in zip(items, js):
            coeff *= stirling2(e, j)
        total += coeff * factorial_moment(
            params, {t: j for (t, _), j in zip(items, js)}
        )
    return total


def mixed_central_moment(params: ModelParams, categories: Sequence[int]) -> Fraction:
    """``E[prod_i (X_{=t_i} - mu_{t_i})]``; categories may repeat."""
    cats = [params.check_category(t) for t in categories]
    mu = {t: _norm.norm(params, [t]) for t in set(cats)}
    total = Fraction(0)
    for mask in itertools.product((0, 1), repeat=len(cats)):
        powers: dict[int, int] = {}
        shift = Fraction(1)
        for t, keep in zip(cats, mask):
            if keep:
                powers[t] = powers.get(t, 0) + 1
            else:
                shift *= -mu[t]
        total += shift * mixed_raw_moment(params, powers)
    return total


def raw_moments(params: ModelParams, var: VariableSpec, order: int) -> list[Fraction]:
    """``E[X^k]`` for ``k = 0..order``."""
    if order > MAX_ORDER or order < 0:
        raise MaoError(f"moment order must lie in 0..{MAX_ORDER}, got {order}")
    cats = var.categories(params.T)
    if var.kind == "exactly":
        t = cats[0]
        fm = [factorial_moment(params, {t: k}) for k in range(order + 1)]
        return raw_from_factorial(fm)
    out = [Fraction(1)]
    for n in range(1, order + 1):
        acc = Fraction(0)
        for exps in compositions(n, len(cats)):
            acc += multinomial(exps) * mixed_raw_moment(params, dict(zip(cats, exps)))
        out.append(acc)
    return out


def central_moment(params: ModelParams, var: VariableSpec, order: int) -> Fraction:
    """Central moment of ``X_{=t}`` or ``X_{>=t}``; order 1 is identically 0."""
    if not 1 <= order <= MAX_ORDER:
        raise MaoError(f"moment order must lie in 1..{MAX_ORDER}, got {order}")
    return Fraction(central_from_raw(raw_moments(params, var, order))[order])


def mean(params: ModelParams, var: VariableSpec) -> Fraction:
    return sum((_norm.norm(params, [s]) for s in var.categories(params.T)), Fraction(0))


def covariance_counts(params: ModelParams, t: int, s: int) -> Fraction:
    """``Cov(X_{=t}, X_{=s})`` for distinct categories."""
    params.check_category(t)
    params.check_category(s)
    if t == s:
        raise MaoError("use central_moment(order=2) for the variance of one category")
    return _norm.norm(params, [t, s]) - _norm.norm(params, [t]) * _norm.norm(params, [s])


def indicator_covariance(params: ModelParams, t: int) -> Fraction:
    """Covariance ``P(K_1 = t, K_2 = t) - pi_t^2`` of two individuals' indicators."""
    params.check_category(t)
    N = params.N
    pi = _norm.norm(params, [t]) / N
    joint = _norm.norm(params, [t, t]) / falling_factorial(N, 2)
    return joint - pi * pi


def formula_report(params: ModelParams, var: VariableSpec) -> MomentReport:
    raw = raw_moments(params, var, MAX_ORDER)
    c = central_from_raw(raw)
    return MomentReport(
        Fraction(raw[1]), Fraction(c[2]), Fraction(c[3]), Fraction(c[4]), "exact", "formula"
    )


def moment_report(
    params: ModelParams,
    var: VariableSpec,
    method: MomentMethod = "formula",
    **kwargs,
) -> MomentReport:
    """Four moments of ``var`` by norm formulas, exact DP or simulation.

    ``exact_dp`` accepts ``mode`` and ``budget``; ``monte_carlo`` accepts
    ``R``, ``seed`` and ``workers``.
    """
    params.check_category(var.t)
    if method == "formula":
        return formula_report(params, var)
    if method == "exact_dp":
        from .exact_dist import exact_marginal_pmf, pmf_moments

        report = pmf_moments(exact_marginal_pmf(params, var, **kwargs))
        return replace(report, method="exact_dp")
    if method == "monte_carlo":
        from .montecarlo import simulate

        result = simulate(params, [var], **kwargs)
        return result.moments[var]
    raise MaoError(f"unknown moment method {method!r}")


def variance_decomposition(params: ModelParams, t: int) -> tuple[Fraction, Fraction]:
    """The two terms ``N pi (1 - pi)`` and ``N (N-1) gamma_N`` of ``Var(X_{=t})``."""
    N = params.N
    pi = _norm.norm(params, [t]) / N
    return N * pi * (1 - pi), N * (N - 1) * indicator_covariance(params, t)


__all__ = [
    "MomentReport",
    "central_moment",
    "covariance_counts",
    "factorial_moment",
    "formula_report",
    "indicator_covariance",
    "mean",
    "mixed_central_moment",
    "mixed_raw_moment",
    "moment_report",
    "raw_moments",
    "variance_decomposition",
]
