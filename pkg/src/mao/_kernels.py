"""Compiled inner loops (float dynamic program and simulation tally)."""

from __future__ import annotations

import math

import numpy as np
from numba import njit, types
from numba.typed import Dict


def log_binomial_table(n_max: int) -> np.ndarray:
    """``table[n, k] = log C(n, k)``, ``-inf`` outside ``0 <= k <= n``.

    Built from exact integers so each entry is correctly rounded.
    """
    table = np.full((n_max + 1, n_max + 1), -np.inf)
    for n in range(n_max + 1):
        row = [math.log(math.comb(n, k)) for k in range(n + 1)]
        table[n, : n + 1] = row
    return table


@njit(cache=True)
def _enumerate_into(src, prob, N, m, stay_to, move_to, n_tgt, lnc, lo_t, span, dense, table):
    """Shared allocation walk.

    For every source row, visit each allocation ``a`` of the ``m`` sampled
    individuals over the tracked classes (the remainder comes from the
    untracked pool) and add its hypergeometric weight to the target cell.
    """
    n, W = src.shape
    a = np.zeros(W, np.int64)
    rem = np.zeros(W + 1, np.int64)
    lw = np.zeros(W + 1, np.float64)
    suffix = np.zeros(W + 1, np.int64)
    tgt = np.zeros(n_tgt, np.int64)
    lnorm = lnc[N, m]
    for s in range(n):
        c = src[s]
        if prob[s] <= 0.0:
            continue
        suffix[W] = 0
        for w in range(W - 1, -1, -1):
            suffix[w] = suffix[w + 1] + c[w]
        inert = N - suffix[0]
        rem[0] = m
        lw[0] = math.log(prob[s]) - lnorm
        w = 0
        lo = rem[0] - suffix[1] - inert
        a[0] = lo if lo > 0 else 0
        while w >= 0:
            hi = c[w] if c[w] < rem[w] else rem[w]
            if a[w] > hi:
                w -= 1
                if w >= 0:
                    a[w] += 1
                continue
            rem[w + 1] = rem[w] - a[w]
            lw[w + 1] = lw[w] + lnc[c[w], a[w]]
            if w == W - 1:
                val = math.exp(lw[W] + lnc[inert, rem[W]])
                for k in range(n_tgt):
                    tgt[k] = 0
                for k in range(W):
                    if stay_to[k] >= 0:
                        tgt[stay_to[k]] += c[k] - a[k]
                    if move_to[k] >= 0:
                        tgt[move_to[k]] += a[k]
                key = 0
                for k in range(n_tgt):
                    key = key * span[k] + (tgt[k] - lo_t[k])
                if dense.shape[0] > 0:
                    dense[key] += val
                else:
                    table[key] = table.get(key, 0.0) + val
                a[w] += 1
            else:
                w += 1
                lo = rem[w] - suffix[w + 1] - inert
                a[w] = lo if lo > 0 else 0


@njit(cache=True)
def _empty_table():
    return Dict.empty(key_type=types.int64, value_type=types.float64)


def float_transition(src, prob, N, m, stay_to, move_to, n_tgt, lnc, dense_limit=30_000_000):
    """One sampling round in float arithmetic.

    ``src`` holds one tracked-class count vector per row.  Returns the target
    count vectors and their probabilities, rows sorted lexicographically so
    that results do not depend on accumulation order.
    """
    src = np.ascontiguousarray(src, dtype=np.int64)
    prob = np.ascontiguousarray(prob, dtype=np.float64)
    stay_to = np.asarray(stay_to, dtype=np.int64)
    move_to = np.asarray(move_to, dtype=np.int64)
    lo_t = np.zeros(n_tgt, np.int64)
    hi_t = np.zeros(n_tgt, np.int64)
    for w in range(src.shape[1]):
        col = src[:, w]
        if stay_to[w] >= 0:
            lo_t[stay_to[w]] += int(np.maximum(col - m, 0).min())
            hi_t[stay_to[w]] += int(col.max())
        if move_to[w] >= 0:
            hi_t[move_to[w]] += int(np.minimum(col, m).max())
    hi_t = np.minimum(hi_t, N)
    span = hi_t - lo_t + 1
    size = 1
    for s in span:
        size *= int(s)
    if size <= dense_limit:
        dense = np.zeros(size)
        table = _empty_table()
        _enumerate_into(src, prob, N, m, stay_to, move_to, n_tgt, lnc, lo_t, span, dense, table)
        keys = np.nonzero(dense)[0]
        vals = dense[keys]
    else:
        dense = np.zeros(0)
        table = _empty_table()
        _enumerate_into(src, prob, N, m, stay_to, move_to, n_tgt, lnc, lo_t, span, dense, table)
        keys = np.fromiter(table.keys(), dtype=np.int64, count=len(table))
        vals = np.fromiter(table.values(), dtype=np.float64, count=len(table))
        order = np.argsort(keys)
        keys, vals = keys[order], vals[order]
    out = np.zeros((keys.shape[0], n_tgt), np.int64)
    rest = keys.copy()
    for d in range(n_tgt - 1, -1, -1):
        out[:, d] = rest % span[d] + lo_t[d]
        rest //= span[d]
    return out, vals


@njit(cache=True, nogil=True)
def tally_replicate(perm, draws, sizes, counts, profile):
    """Partial Fisher-Yates per round; writes the occupancy profile.

    ``draws`` holds, round after round, the swap targets ``j_k`` drawn
    uniformly from ``k..N-1`` for ``k = 0..m_j - 1``.
    """
    N = perm.shape[0]
    for i in range(N):
        perm[i] = i
        counts[i] = 0
    pos = 0
    for j in range(sizes.shape[0]):
        for k in range(sizes[j]):
            r = draws[pos]
            pos += 1
            tmp = perm[k]
            perm[k] = perm[r]
            perm[r] = tmp
            counts[perm[k]] += 1
    for i in range(profile.shape[0]):
        profile[i] = 0
    for i in range(N):
        profile[counts[i]] += 1
