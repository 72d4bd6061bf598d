"""Occupancy counts when T fixed-size subsets are drawn from N individuals.

``X_{=t}`` counts individuals lying in exactly ``t`` of the subsets and
``X_{>=t}`` those lying in at least ``t``.  The package gives exact moments
through transversal-sum norms, exact laws by dynamic programming, seeded
simulation, and Poisson/normal approximations with their diagnostics.
"""

from .approx import (
    chen_stein_bound,
    covariance_expansion,
    diagnose,
    distance,
    joint_prob_k,
    marginal_pi,
    normal_approximant,
    poisson_approximant,
    select_regime,
    tail_pvalue,
)
from .exact_dist import (
    ProfileDistribution,
    advance,
    exact_marginal_pmf,
    exact_profile_distribution,
    marginal_pmf,
    pmf_moments,
)
from .model import BudgetExceededError, MaoError, ModelParams, VariableSpec, at_least, exactly
from .moments import MomentReport, central_moment, factorial_moment, moment_report
from .montecarlo import SimulationResult, sample_once, simulate
from .norm import norm as mao_norm, transversal_sum
from .oracle import enumerate_all
from .pmf import Pmf

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "MaoError",
    "ModelParams",
    "MomentReport",
    "Pmf",
    "ProfileDistribution",
    "SimulationResult",
    "VariableSpec",
    "advance",
    "at_least",
    "central_moment",
    "chen_stein_bound",
    "covariance_expansion",
    "diagnose",
    "distance",
    "enumerate_all",
    "exact_marginal_pmf",
    "exact_profile_distribution",
    "exactly",
    "factorial_moment",
    "joint_prob_k",
    "marginal_pi",
    "marginal_pmf",
    "mao_norm",
    "moment_report",
    "normal_approximant",
    "pmf_moments",
    "poisson_approximant",
    "sample_once",
    "select_regime",
    "simulate",
    "tail_pvalue",
    "transversal_sum",
]
