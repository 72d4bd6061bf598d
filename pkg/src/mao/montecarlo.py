"""Seeded simulation of the sampling process.

Replicate ``r`` draws from its own Philox stream with key ``seed`` and
counter ``r << 128``, so every replicate is fixed by ``(seed, r)`` alone.
Splitting the replicates across threads therefore cannot change any result.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ._kernels import tally_replicate
from .exact_dist import pmf_moments
from .model import MaoError, ModelParams, VariableSpec
from .moments import MomentReport
from .pmf import Pmf

DEFAULT_R = 100_000
DEFAULT_SEED = 20240101
_MASK64 = (1 << 64) - 1


def replicate_stream(seed: int, r: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed & _MASK64, counter=r << 128))


def _swap_lows(params: ModelParams) -> np.ndarray:
    return np.concatenate([np.arange(m, dtype=np.int64) for m in params.m])


def sample_once(params: ModelParams, rng: np.random.Generator) -> np.ndarray:
    """Membership counts ``K_1..K_N`` of one replicate.

    Each round runs a partial Fisher-Yates shuffle; the first ``m_j``
    positions of the index array form the sampled subset.
    """
    N = params.N
    sizes = np.array(params.m, dtype=np.int64)
    draws = rng.integers(_swap_lows(params), N)
    perm = np.empty(N, np.int64)
    counts = np.empty(N, np.int64)
    profile = np.empty(params.T + 1, np.int64)
    tally_replicate(perm, draws, sizes, counts, profile)
    return counts


@dataclass(frozen=True)
class SimulationResult:
    """Occupancy profiles of ``R`` replicates and the derived summaries."""

    params: ModelParams
    R: int
    seed: int
    profiles: np.ndarray  # shape (R, T + 1)
    pmfs: dict[VariableSpec, Pmf]
    moments: dict[VariableSpec, MomentReport]

    def values(self, var: VariableSpec) -> np.ndarray:
        """Per-replicate values of ``var``."""
        if var.kind == "exactly":
            return self.profiles[:, var.t]
        return self.profiles[:, var.t :].sum(axis=1)


def _run_block(params: ModelParams, seed: int, start: int, out: np.ndarray) -> None:
    N = params.N
    sizes = np.array(params.m, dtype=np.int64)
    lows = _swap_lows(params)
    perm = np.empty(N, np.int64)
    counts = np.empty(N, np.int64)
    for i in range(out.shape[0]):
        draws = replicate_stream(seed, start + i).integers(lows, N)
        tally_replicate(perm, draws, sizes, counts, out[i])


def simulate_profiles(
    params: ModelParams, R: int = DEFAULT_R, seed: int = DEFAULT_SEED, workers: int = 1
) -> np.ndarray:
    if R < 1:
        raise MaoError(f"need at least one replicate, got R={R}")
    if workers < 1:
        raise MaoError(f"workers must be >= 1, got {workers}")
    profiles = np.zeros((R, params.T + 1), np.int64)
    if workers == 1:
        _run_block(params, seed, 0, profiles)
        return profiles
    bounds = np.linspace(0, R, workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        jobs = [
            pool.submit(_run_block, params, seed, int(lo), profiles[lo:hi])
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for job in jobs:
            job.result()
    return profiles


def simulate(
    params: ModelParams,
    specs: Sequence[VariableSpec],
    R: int = DEFAULT_R,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
) -> SimulationResult:
    """Empirical laws and moments of the requested counts over ``R`` replicates."""
    for var in specs:
        var.categories(params.T)
    profiles = simulate_profiles(params, R, seed, workers)
    result = SimulationResult(params, R, seed, profiles, {}, {})
    for var in specs:
        hist = np.bincount(result.values(var), minlength=params.N + 1)
        pmf = Pmf(tuple(hist / R), "float")
        result.pmfs[var] = pmf
        result.moments[var] = replace(pmf_moments(pmf), method="monte_carlo")
    return result
