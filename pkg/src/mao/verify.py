"""Acceptance checks, shared by ``mao verify`` and the test suite.

Each check returns a :class:`CriterionResult`.  Reference moments are kept
with every published digit.
"""

from __future__ import annotations

import itertools
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from . import approx, norm
from .exact_dist import (
    ProfileDistribution,
    exact_marginal_pmf,
    exact_profile_distribution,
    marginal_pmf,
    pmf_moments,
)
from .model import ModelParams, VariableSpec, at_least, exactly
from .moments import central_moment, factorial_moment, formula_report, indicator_covariance
from .montecarlo import simulate
from .oracle import enumerate_all, outcome_count

SMALL = ModelParams.equal(100, 20, 5)
LARGE = ModelParams.equal(5000, 1000, 5)
UNEQUAL = ModelParams(100, (5, 20, 40, 70, 30))

# (kind, t) -> (mean, variance, third, fourth)
EQUAL_100 = {
    ("exactly", 2): (20.48, 11.0490232739, 0.3147059691, 359.8852999539),
    ("at_least", 2): (26.272, 5.9519005116, -0.023257248, 105.5496648445),
    ("exactly", 3): (5.12, 3.5574640576, 1.5505305795, 37.5680356004),
    ("at_least", 3): (5.792, 3.5905391270, 1.2251022398, 38.1763665922),
    ("exactly", 4): (0.64, 0.5914622301, 0.5038057446, 1.4031697343),
    ("at_least", 4): (0.672, 0.6170337887, 0.5186740410, 1.4947735616),
    ("exactly", 5): (0.032, 0.0318008542, 0.0314058107, 0.0336592618),
    ("at_least", 5): (0.032, 0.0318008542, 0.0314058107, 0.0336592618),
}

# t -> (mean, variance) of X_{=t}
EQUAL_5000 = {
    2: (1024.0, 552.1473467178),
    3: (256.0, 177.3670417211),
    4: (32.0, 29.4928383999),
    5: (1.6, 1.5892643742),
}

UNEQUAL_100 = {
    ("exactly", 2): (37.27, 20.981651, 2.592532, 1309.69213),
    ("at_least", 2): (54.694, 7.159947, -0.159348, 152.966245),
    ("exactly", 3): (15.05, 7.908256, 0.864444, 184.961192),
    ("at_least", 3): (17.424, 6.314953, 0.439022, 118.788672),
    ("exactly", 4): (2.29, 1.85535, 1.191134, 10.644157),
    ("at_least", 4): (2.374, 1.888293, 1.168025, 10.960405),
    ("exactly", 5): (0.084, 0.08213, 0.078489, 0.091729),
    ("at_least", 5): (0.084, 0.08213, 0.078489, 0.091729),
}

GRID_N = (20, 50, 100)
GRID_P = (Fraction(1, 10), Fraction(1, 5), Fraction(1, 2))
GRID_T = (2, 3, 4, 5)
SCALING_N = (50, 100, 200, 400)
MC_SEED = 12345


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: str
    elapsed: float = 0.0
    details: list[str] = field(default_factory=list)

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.number:>2}. {self.name}: {self.measured} ({self.elapsed:.1f}s)"


class Context:
    """Caches the expensive profile laws shared by several checks."""

    def __init__(self) -> None:
        self._laws: dict[ModelParams, tuple[ProfileDistribution, float]] = {}

    def profile_law(self, params: ModelParams) -> tuple[ProfileDistribution, float]:
        if params not in self._laws:
            t0 = time.perf_counter()
            law = exact_profile_distribution(params, mode="exact")
            self._laws[params] = (law, time.perf_counter() - t0)
        return self._laws[params]


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b else abs(a)


def _spec(key: tuple[str, int]) -> VariableSpec:
    return VariableSpec(key[0], key[1])


def _table_check(
    reports: dict[tuple[str, int], tuple], table: dict, tol: float
) -> tuple[float, list[str]]:
    worst, bad = 0.0, []
    for key, expected in table.items():
        for got, want in zip(reports[key], expected):
            err = _rel(float(got), want)
            worst = max(worst, err)
            if err > tol:
                bad.append(f"{_spec(key).label}: {float(got)!r} vs {want!r}")
    return worst, bad


def criterion_1(ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    reports = {key: formula_report(SMALL, _spec(key)).values() for key in EQUAL_100}
    worst, bad = _table_check(reports, EQUAL_100, 1e-7)
    dt = time.perf_counter() - t0
    return CriterionResult(
        1,
        "N=100, m=20 moments by norm formulas",
        not bad and dt < 30,
        f"max rel err {worst:.2e} (tol 1e-7)",
        dt,
        bad,
    )


def criterion_2(ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    law, _ = ctx.profile_law(SMALL)
    bad = []
    for key in EQUAL_100:
        var = _spec(key)
        dp = pmf_moments(marginal_pmf(law, var)).values()
        formula = formula_report(SMALL, var).values()
        if tuple(dp) != tuple(formula):
            bad.append(f"{var.label}: DP {[float(x) for x in dp]} vs formula")
    dt = time.perf_counter() - t0
    return CriterionResult(
        2,
        "N=100, m=20 moments by exact profile DP (equal to formulas)",
        not bad and dt < 300,
        f"{len(EQUAL_100) - len(bad)}/{len(EQUAL_100)} variables identical, {len(law)} profiles",
        dt,
        bad,
    )


def criterion_3(ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    worst, bad = 0.0, []
    for t, expected in EQUAL_5000.items():
        var = exactly(t)
        got = (norm.norm(LARGE, [t]), central_moment(LARGE, var, 2))
        for g, w in zip(got, expected):
            err = _rel(float(g), w)
            worst = max(worst, err)
            if err > 1e-6:
                bad.append(f"{var.label}: {float(g)!r} vs {w!r}")
    dt = time.perf_counter() - t0
    return CriterionResult(
        3, "N=5000, m=1000 mean/variance by norm formulas", not bad and dt < 30,
        f"max rel err {worst:.2e} (tol 1e-6)", dt, bad,
    )


def criterion_4(ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    law, _ = ctx.profile_law(UNEQUAL)
    reports = {key: pmf_moments(marginal_pmf(law, _spec(key))).values() for key in UNEQUAL_100}
    worst, bad = _table_check(reports, UNEQUAL_100, 1e-4)
    dt = time.perf_counter() - t0
    return CriterionResult(
        4, "N=100 unequal sizes moments by exact profile DP", not bad and dt < 600,
        f"max rel err {worst:.2e} (tol 1e-4)", dt, bad,
    )


def criterion_5(ctx: Context, R: int = 100_000) -> CriterionResult:
    t0 = time.perf_counter()
    specs = [VariableSpec(k, t) for t in range(SMALL.T + 1) for k in ("exactly", "at_least")]
    one = simulate(SMALL, specs, R=R, seed=MC_SEED, workers=1)
    two = simulate(SMALL, specs, R=R, seed=MC_SEED, workers=3)
    bad, worst = [], 0.0
    for var in specs:
        rep = formula_report(SMALL, var)
        se = (float(rep.variance) / R) ** 0.5
        gap = abs(one.moments[var].mean - float(rep.mean))
        z = gap / se if se else (0.0 if gap == 0 else float("inf"))
        worst = max(worst, z)
        if z > 5:
            bad.append(f"{var.label}: mean {one.moments[var].mean} vs {float(rep.mean)}")
    same = (one.profiles == two.profiles).all() and one.moments == two.moments
    if not same:
        bad.append("results differ between 1 and 3 workers")
    dt = time.perf_counter() - t0
    return CriterionResult(
        5, "Monte Carlo agreement and thread determinism", not bad,
        f"max |z| {worst:.2f} (limit 5), identical across workers: {bool(same)}", dt, bad,
    )


def oracle_instances(max_N: int = 5, max_T: int = 3, budget: int = 10**6):
    for N in range(2, max_N + 1):
        for T in range(1, max_T + 1):
            for m in itertools.product(range(1, N), repeat=T):
                params = ModelParams(N, m)
                if outcome_count(params) <= budget:
                    yield params


def criterion_6(ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    bad = []
    laws = moments = 0
    for params in oracle_instances():
        law = enumerate_all(params)
        if law.profile_distribution().weights != exact_profile_distribution(params, "exact").weights:
            bad.append(f"{params}: profile law differs")
        laws += 1
        if not params.equal_sizes:
            continue
        T, N = params.T, params.N
        for r in range(1, min(N, 4) + 1):
            for cats in itertools.combinations_with_replacement(range(T + 1), r):
                counts = Counter(cats)
                if law.factorial_moment(counts) != factorial_moment(params, counts):
                    bad.append(f"{params}: factorial moment {dict(counts)}")
                moments += 1
        for t in range(T + 1):
            for k in range(1, min(4, N) + 1):
                if law.joint_prob(t, k) != approx.joint_prob_k(params, t, k):
                    bad.append(f"{params}: P_k for t={t}, k={k}")
                moments += 1
    dt = time.perf_counter() - t0
    return CriterionResult(
        6, "Exhaustive enumeration equals DP and norm formulas", not bad,
        f"{laws} instances, {moments} moment identities", dt, bad,
    )


def grid_points():
    for N in GRID_N:
        for p in GRID_P:
            for T in GRID_T:
                params = ModelParams.equal(N, int(p * N), T)
                for t in range(T + 1):
                    if approx.marginal_pi(params, t) > 0:
                        yield params, t


def criterion_7(ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    bad, n, max_ratio = [], 0, None
    for params, t in grid_points():
        lam = params.N * approx.marginal_pi(params, t)
        var = central_moment(params, exactly(t), 2)
        ok = var < lam and norm.norm(params, [t]) ** 2 >= norm.norm(params, [t, t])
        ratio = var / lam
        max_ratio = ratio if max_ratio is None else max(max_ratio, ratio)
        if not ok:
            bad.append(f"{params}, t={t}")
        n += 1
    dt = time.perf_counter() - t0
    return CriterionResult(
        7, "Underdispersion Var < N pi and ||t||^2 >= ||t,t||", not bad,
        f"{n} grid points, largest Var/lambda {float(max_ratio):.6f}", dt, bad,
    )


def criterion_8(ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    bad, n, worst = [], 0, 0.0
    for params, t in grid_points():
        var = exactly(t)
        diag = approx.chen_stein_bound(params, t)
        exact = exact_marginal_pmf(params, var, mode="exact")
        tv = approx.distance(exact, approx.poisson_approximant(params, var), "tv")
        worst = max(worst, tv / float(diag.bound))
        if tv > float(diag.bound):
            bad.append(f"{params}, t={t}: TV {tv:.3e} > bound {float(diag.bound):.3e}")
        n += 1
    spot = approx.chen_stein_bound(SMALL, 5)
    tv5 = approx.distance(
        exact_marginal_pmf(SMALL, exactly(5), mode="exact"), approx.poisson_approximant(SMALL, exactly(5))
    )
    if abs(float(spot.bound) - 1.9915e-4) > 1e-7:
        bad.append(f"SMALL t=5 bound {float(spot.bound):.6e}")
    if tv5 > float(spot.bound):
        bad.append(f"SMALL t=5 TV {tv5:.6e} exceeds bound")
    dt = time.perf_counter() - t0
    return CriterionResult(
        8, "Chen-Stein bound holds", not bad,
        f"{n} grid points, max TV/bound {worst:.5f}; SMALL t=5 bound {float(spot.bound):.5e}, TV {tv5:.5e}",
        dt, bad,
    )


def _scaling_params(N: int) -> ModelParams:
    return ModelParams.equal(N, N // 5, 5)


def criterion_9(ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    bad = []
    gamma100 = indicator_covariance(_scaling_params(100), 2)
    if abs(float(gamma100) + 5.28957e-4) > 1e-8:
        bad.append(f"gamma at N=100 is {float(gamma100):.9e}")
    scaled = {}
    for N in SCALING_N:
        p = _scaling_params(N)
        scaled[N] = abs(float(indicator_covariance(p, 2) - approx.covariance_expansion(p, 2))) * N * N
    ref = scaled[100]
    for N, v in scaled.items():
        if not ref / 2 <= v <= ref * 2:
            bad.append(f"N={N}: scaled residual {v:.4g} vs {ref:.4g}")
    dt = time.perf_counter() - t0
    shown = ", ".join(f"{v:.4f}" for v in scaled.values())
    return CriterionResult(
        9, "Covariance expansion residual is O(1/N^2)", not bad,
        f"gamma(100) {float(gamma100):.6e}; N^2*residual {shown}", dt, bad,
    )


def criterion_10(ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    ks = []
    for N in SCALING_N:
        pmf = exact_marginal_pmf(_scaling_params(N), exactly(2))
        ks.append(approx.ks_to_standard_normal(pmf))
    ok = all(b < a for a, b in zip(ks, ks[1:]))
    dt = time.perf_counter() - t0
    return CriterionResult(
        10, "KS to the normal decreases with N", ok,
        "KS " + ", ".join(f"{k:.5f}" for k in ks), dt, [] if ok else ["not strictly decreasing"],
    )


def criterion_11(ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    vals = []
    for N in (100, 200, 400):
        p = _scaling_params(N)
        pi = approx.marginal_pi(p, 2)
        vals.append(N * max(abs(approx.joint_prob_k(p, 2, k) - pi**k) for k in range(1, 5)))
    ok = max(vals) < 2 * min(vals)
    dt = time.perf_counter() - t0
    return CriterionResult(
        11, "Joint indicator probabilities approach independence at rate 1/N", ok,
        "N*max|P_k - pi^k| " + ", ".join(f"{float(v):.5f}" for v in vals), dt,
    )


CRITERIA: dict[int, Callable[[Context], CriterionResult]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
}


def run_all(
    selection: Optional[list[int]] = None, ctx: Optional[Context] = None
) -> list[CriterionResult]:
    ctx = ctx or Context()
    out = []
    for number in selection or sorted(CRITERIA):
        try:
            out.append(CRITERIA[number](ctx))
        except Exception as exc:  # a crash is a failure, not an abort
            out.append(CriterionResult(number, f"criterion {number}", False, f"error: {exc!r}"))
    return out
