"""Marginal laws, Poisson and normal approximants, and their diagnostics.

Write ``I_i`` for the indicator that individual ``i`` is counted by the
variable, so that ``X = sum_i I_i``.  With ``pi = P(I_1 = 1)``,
``lambda = N pi`` and ``P = P(I_1 = I_2 = 1)``:

    delta = lambda - Var(X)
    Delta = N (N - 1) |P - pi^2|
    Chen-Stein bound on d_TV(X, Poisson(lambda)) = N pi^2 + Delta

``P`` is read off the second factorial moment, ``E[X (X - 1)] = N (N-1) P``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Optional, Sequence, Union

from scipy import stats

from .combinatorics import binomial, falling_factorial
from .model import MaoError, ModelParams, VariableSpec, exactly
from .moments import central_moment, mean as formula_mean, raw_moments
from . import norm as _norm
from .pmf import Pmf

Scalar = Union[Fraction, float]
Regime = Literal["poisson", "reflected_poisson", "normal"]
Metric = Literal["tv", "ks"]
Side = Literal["upper", "lower", "two_sided"]

DEFAULT_THRESHOLD = 10.0
MAX_JOINT_K = 4


@dataclass(frozen=True)
class ApproxRegime:
    name: Regime
    mean: float
    N: int
    threshold: float


@dataclass(frozen=True)
class ApproxDiagnostics:
    params: ModelParams
    var: VariableSpec
    lam: Fraction
    variance: Fraction
    pi: Fraction
    joint: Fraction
    delta_small: Fraction  # lambda - Var
    delta_big: Fraction  # N (N-1) |P - pi^2|
    bound: Fraction
    regime: ApproxRegime
    distances: dict[str, float] = field(default_factory=dict)


def marginal_pi(params: ModelParams, t: int) -> Fraction:
    """``P(K_1 = t)``: binomial for equal sizes, Poisson-binomial otherwise."""
    params.check_category(t)
    if params.equal_sizes:
        p = params.p[0]
        return binomial(params.T, t) * p**t * (1 - p) ** (params.T - t)
    return poisson_binomial(params.p)[t]


def poisson_binomial(ps: Sequence[Fraction]) -> list[Fraction]:
    """Coefficients of ``prod_j (1 - p_j + p_j x)``: the law of a sum of
    independent Bernoulli(p_j)."""
    poly = [Fraction(1)]
    for p in ps:
        nxt = [Fraction(0)] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i] += c * (1 - p)
            nxt[i + 1] += c * p
        poly = nxt
    return poly


def marginal_pi_var(params: ModelParams, var: VariableSpec) -> Fraction:
    return sum((marginal_pi(params, s) for s in var.categories(params.T)), Fraction(0))


def _exact_pmf(params: ModelParams, var: VariableSpec, **kwargs) -> Pmf:
    from .exact_dist import exact_marginal_pmf

    return exact_marginal_pmf(params, var, **kwargs)


def _first_two(params: ModelParams, var: VariableSpec) -> tuple[Fraction, Fraction]:
    """``E[X]`` and ``E[X^2]`` exactly, by norms or (unequal sizes) the DP."""
    if params.equal_sizes:
        raw = raw_moments(params, var, 2)
        return raw[1], raw[2]
    pmf = _exact_pmf(params, var, mode="exact")
    m1 = sum((k * p for k, p in pmf.items()), Fraction(0))
    m2 = sum((k * k * p for k, p in pmf.items()), Fraction(0))
    return m1, m2


def normal_approximant(
    params: ModelParams, var: VariableSpec, variance: Optional[Scalar] = None
) -> tuple[Scalar, Scalar]:
    """Mean and (true, not binomial) variance of the count."""
    if variance is not None:
        return marginal_pi_var(params, var) * params.N, variance
    if params.equal_sizes:
        return formula_mean(params, var), central_moment(params, var, 2)
    m1, m2 = _first_two(params, var)
    return m1, m2 - m1 * m1


def normal_pmf(mu: float, variance: float, N: int) -> Pmf:
    """Normal law discretized on cells ``[k - 1/2, k + 1/2)``, ends open."""
    mu, variance = float(mu), float(variance)
    if variance <= 0:
        k = min(max(int(math.floor(mu + 0.5)), 0), N)
        return Pmf.point_mass(k, "float", N + 1)
    sd = math.sqrt(variance)
    cdf = [0.0] + [float(stats.norm.cdf(k + 0.5, mu, sd)) for k in range(N)] + [1.0]
    probs = [max(cdf[k + 1] - cdf[k], 0.0) for k in range(N + 1)]
    total = sum(probs)
    return Pmf(tuple(p / total for p in probs), "float")


def poisson_pmf(lam: float, N: int) -> Pmf:
    """Poisson law on ``0..N`` with the mass above ``N`` placed at ``N``."""
    lam = float(lam)
    if lam <= 0:
        return Pmf.point_mass(0, "float", N + 1)
    probs = [float(p) for p in stats.poisson.pmf(range(N), lam)]
    probs.append(float(stats.poisson.sf(N - 1, lam)))
    return Pmf(tuple(probs), "float")


def poisson_approximant(
    params: ModelParams, var: VariableSpec, reflected: bool = False
) -> Pmf:
    """Poisson law with the count's mean, or for ``reflected`` the law of
    ``N - Y`` with ``Y`` Poisson of mean ``N - E[X]``."""
    mu = marginal_pi_var(params, var) * params.N
    N = params.N
    if reflected:
        return poisson_pmf(N - mu, N).reflected(N)
    return poisson_pmf(mu, N)


def regime_for_mean(mu: float, N: int, threshold: float = DEFAULT_THRESHOLD) -> ApproxRegime:
    if threshold <= 0:
        raise MaoError(f"threshold must be positive, got {threshold}")
    mu = float(mu)
    if mu < threshold:
        name: Regime = "poisson"
    elif N - mu < threshold:
        name = "reflected_poisson"
    else:
        name = "normal"
    return ApproxRegime(name, mu, N, float(threshold))


def select_regime(
    params: ModelParams,
    t: Union[int, VariableSpec],
    threshold: float = DEFAULT_THRESHOLD,
) -> ApproxRegime:
    var = t if isinstance(t, VariableSpec) else exactly(t)
    return regime_for_mean(params.N * marginal_pi_var(params, var), params.N, threshold)


def approximant(params: ModelParams, var: VariableSpec, regime: ApproxRegime) -> Pmf:
    if regime.name == "normal":
        mu, v = normal_approximant(params, var)
        return normal_pmf(mu, v, params.N)
    return poisson_approximant(params, var, reflected=regime.name == "reflected_poisson")


def chen_stein_bound(
    params: ModelParams,
    t: Union[int, VariableSpec],
    threshold: float = DEFAULT_THRESHOLD,
) -> ApproxDiagnostics:
    """Exact ``lambda``, ``delta``, ``Delta`` and the Chen-Stein bound."""
    var = t if isinstance(t, VariableSpec) else exactly(t)
    N = params.N
    m1, m2 = _first_two(params, var)
    pi = marginal_pi_var(params, var)
    lam = N * pi
    if m1 != lam:
        raise AssertionError(f"mean {m1} disagrees with N*pi = {lam}")
    variance = m2 - m1 * m1
    joint = (m2 - m1) / falling_factorial(N, 2)
    big = falling_factorial(N, 2) * abs(joint - pi * pi)
    return ApproxDiagnostics(
        params,
        var,
        lam,
        variance,
        pi,
        joint,
        lam - variance,
        big,
        N * pi * pi + big,
        regime_for_mean(lam, N, threshold),
    )


def covariance_expansion(params: ModelParams, t: int) -> Fraction:
    """Leading ``1/N`` term of ``Cov(I_1, I_2)`` for ``X_{=t}``."""
    params.check_category(t)
    N, T = params.N, params.T
    p = params.p[0] if params.equal_sizes else None
    if p is None:
        raise MaoError("the covariance expansion needs equal subset sizes")
    pi = marginal_pi(params, t)
    tail = Fraction(t * t) / (T * p) if t else Fraction(0)
    return pi * pi / N * (2 * t - T * p - tail) / (1 - p)


def joint_prob_k(params: ModelParams, t: int, k: int) -> Fraction:
    """``P(K_1 = ... = K_k = t)`` as a norm quotient."""
    params.check_category(t)
    if not 1 <= k <= MAX_JOINT_K:
        raise MaoError(f"k must lie in 1..{MAX_JOINT_K}, got {k}")
    if k > params.N:
        raise MaoError(f"k={k} exceeds N={params.N}")
    return _norm.norm(params, [t] * k) / falling_factorial(params.N, k)


def distance(a: Pmf, b: Pmf, metric: Metric = "tv") -> float:
    n = max(len(a), len(b))
    pa = [float(x) for x in a.padded(n)]
    pb = [float(x) for x in b.padded(n)]
    if metric == "tv":
        return 0.5 * math.fsum(abs(x - y) for x, y in zip(pa, pb))
    if metric == "ks":
        fa = fb = 0.0
        worst = 0.0
        for x, y in zip(pa, pb):
            fa += x
            fb += y
            worst = max(worst, abs(fa - fb))
        return worst
    raise MaoError(f"unknown metric {metric!r}")


def ks_to_standard_normal(pmf: Pmf) -> float:
    """``max_k |F(k) - Phi((k - mu) / sigma)|`` over the support points."""
    probs = [float(p) for p in pmf.probs]
    mu = math.fsum(k * p for k, p in enumerate(probs))
    var = math.fsum((k - mu) ** 2 * p for k, p in enumerate(probs))
    if var <= 0:
        raise MaoError("degenerate law has no standardization")
    sd = math.sqrt(var)
    cum = 0.0
    worst = 0.0
    for k, p in enumerate(probs):
        cum += p
        if p > 0:
            worst = max(worst, abs(cum - float(stats.norm.cdf((k - mu) / sd))))
    return worst


def tail_pvalue(null: Pmf, observed: int, side: Side = "two_sided") -> Scalar:
    N = len(null) - 1
    if not 0 <= observed <= N:
        raise MaoError(f"observed value must lie in 0..{N}, got {observed}")
    upper = null.sf(observed)
    lower = null.cdf(observed)
    if side == "upper":
        return upper
    if side == "lower":
        return lower
    if side == "two_sided":
        two = 2 * min(upper, lower)
        return min(two, Fraction(1) if null.mode == "exact" else 1.0)
    raise MaoError(f"unknown side {side!r}")


def diagnose(
    params: ModelParams,
    var: VariableSpec,
    threshold: float = DEFAULT_THRESHOLD,
    exact: Optional[Pmf] = None,
) -> ApproxDiagnostics:
    """Chen-Stein quantities plus, given the exact law, TV and KS to each approximant."""
    diag = chen_stein_bound(params, var, threshold)
    if exact is not None:
        N = params.N
        mu, v = normal_approximant(params, var, diag.variance)
        laws = {
            "poisson": poisson_approximant(params, var),
            "reflected_poisson": poisson_approximant(params, var, reflected=True),
            "normal": normal_pmf(mu, v, N),
        }
        for name, law in laws.items():
            diag.distances[f"tv_{name}"] = distance(exact, law, "tv")
            diag.distances[f"ks_{name}"] = distance(exact, law, "ks")
    return diag
