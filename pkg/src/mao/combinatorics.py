"""Exact integer and rational primitives.

Everything here works on ``int`` and :class:`fractions.Fraction` so that
downstream moment computations never round.  Conversion to ``float`` is
left to callers (``float(Fraction)`` rounds to nearest).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence, Union

Exact = Union[int, Fraction]

#: Largest ``n`` accepted by :func:`stirling2`.
STIRLING_MAX = 8


def falling_factorial(x: Exact, k: int) -> Exact:
    """Return ``x (x-1) ... (x-k+1)``; the empty product is 1."""
    if k < 0:
        raise ValueError(f"falling factorial order must be >= 0, got {k}")
    out: Exact = 1
    for i in range(k):
        out *= x - i
    return out


def binomial(n: int, k: int) -> int:
    """Binomial coefficient, zero outside ``0 <= k <= n``."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


@lru_cache(maxsize=None)
def _stirling_table() -> tuple[tuple[int, ...], ...]:
    rows = [[1] + [0] * STIRLING_MAX]
    for n in range(1, STIRLING_MAX + 1):
        prev = rows[-1]
        row = [0] * (STIRLING_MAX + 1)
        for k in range(1, n + 1):
            row[k] = prev[k - 1] + k * prev[k]
        rows.append(row)
    return tuple(tuple(r) for r in rows)


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind ``S(n, k)`` for ``n <= 8``."""
    if n < 0 or k < 0:
        raise ValueError("Stirling arguments must be nonnegative")
    if n > STIRLING_MAX:
        raise ValueError(f"stirling2 supports n <= {STIRLING_MAX}, got {n}")
    if k > n:
        return 0
    return _stirling_table()[n][k]


def raw_from_factorial(factorial_moments: Sequence[Exact]) -> list[Exact]:
    """Convert ``E[(X)_k]`` for ``k = 0..n`` into ``E[X^k]`` for ``k = 0..n``.

    Uses ``x^n = sum_k S(n, k) (x)_k``.  ``factorial_moments[0]`` must be 1.
    """
    n = len(factorial_moments) - 1
    return [
        sum((stirling2(i, k) * factorial_moments[k] for k in range(i + 1)), 0)
        for i in range(n + 1)
    ]


def central_from_raw(raw: Sequence[Exact]) -> list[Exact]:
    """Central moments ``E[(X - mu)^k]`` from raw moments ``E[X^k]``, ``k = 0..n``."""
    mu = raw[1] if len(raw) > 1 else 0
    out = []
    for n in range(len(raw)):
        out.append(
            sum(
                (math.comb(n, k) * raw[k] * (-mu) ** (n - k) for k in range(n + 1)),
                0,
            )
        )
    return out


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of ``parts`` nonnegative ints summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def multinomial(counts: Sequence[int]) -> int:
    """``(sum counts)! / prod(counts!)``."""
    out = 1
    running = 0
    for c in counts:
        running += c
        out *= math.comb(running, c)
    return out
