"""Finite probability mass functions on ``0..n``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal, Mapping, Union

from .model import MaoError

Prob = Union[Fraction, float]
Mode = Literal["exact", "float"]

FLOAT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Pmf:
    """``probs[k] = P(X = k)`` for ``k = 0..len(probs) - 1``.

    In ``exact`` mode every entry is a :class:`~fractions.Fraction` and the
    entries sum to exactly one.
    """

    probs: tuple[Prob, ...]
    mode: Mode = "float"

    def __post_init__(self) -> None:
        probs = tuple(self.probs)
        if not probs:
            raise MaoError("a pmf needs at least one support point")
        if self.mode == "exact":
            probs = tuple(Fraction(p) for p in probs)
        else:
            probs = tuple(float(p) for p in probs)
        object.__setattr__(self, "probs", probs)
        if any(p < 0 for p in probs):
            raise MaoError("probabilities must be nonnegative")
        total = sum(probs)
        if self.mode == "exact":
            if total != 1:
                raise MaoError(f"exact pmf sums to {total}, not 1")
        elif abs(total - 1.0) > FLOAT_SUM_TOL:
            raise MaoError(f"pmf sums to {total!r}")

    @classmethod
    def from_mapping(
        cls, mapping: Mapping[int, Prob], mode: Mode = "float", size: int | None = None
    ) -> "Pmf":
        if any(k < 0 for k in mapping):
            raise MaoError("pmf support must be nonnegative")
        n = max(mapping, default=0) + 1
        if size is not None:
            n = max(n, size)
        zero: Prob = Fraction(0) if mode == "exact" else 0.0
        probs = [zero] * n
        for k, p in mapping.items():
            probs[k] += p
        return cls(tuple(probs), mode)

    @classmethod
    def point_mass(cls, value: int, mode: Mode = "exact", size: int | None = None) -> "Pmf":
        one: Prob = Fraction(1) if mode == "exact" else 1.0
        return cls.from_mapping({value: one}, mode, size)

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, k: int) -> Prob:
        if 0 <= k < len(self.probs):
            return self.probs[k]
        return Fraction(0) if self.mode == "exact" else 0.0

    @property
    def support(self) -> list[int]:
        return [k for k, p in enumerate(self.probs) if p > 0]

    def items(self) -> Iterable[tuple[int, Prob]]:
        return enumerate(self.probs)

    def cdf(self, k: int) -> Prob:
        """``P(X <= k)``."""
        zero: Prob = Fraction(0) if self.mode == "exact" else 0.0
        if k < 0:
            return zero
        return sum(self.probs[: k + 1], zero)

    def sf(self, k: int) -> Prob:
        """``P(X >= k)``."""
        zero: Prob = Fraction(0) if self.mode == "exact" else 0.0
        return sum(self.probs[max(k, 0):], zero)

    def mean(self) -> Prob:
        zero: Prob = Fraction(0) if self.mode == "exact" else 0.0
        return sum((k * p for k, p in enumerate(self.probs)), zero)

    def padded(self, n: int) -> tuple[Prob, ...]:
        zero: Prob = Fraction(0) if self.mode == "exact" else 0.0
        return self.probs + (zero,) * max(0, n - len(self.probs))

    def to_float(self) -> "Pmf":
        if self.mode == "float":
            return self
        return Pmf(tuple(float(p) for p in self.probs), "float")

    def reflected(self, N: int) -> "Pmf":
        """Law of ``N - X``."""
        probs = self.padded(N + 1)
        if any(p > 0 for p in probs[N + 1:]):
            raise MaoError(f"support exceeds {N}; cannot reflect")
        return Pmf(tuple(reversed(probs[: N + 1])), self.mode)
