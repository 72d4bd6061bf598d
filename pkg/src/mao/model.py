"""Model parameters, variable selectors and shared exceptions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal, Sequence

Kind = Literal["exactly", "at_least"]


class MaoError(ValueError):
    """Invalid parameters or arguments."""


class BudgetExceededError(MaoError):
    """A computation would exceed its configured state or outcome budget."""

    def __init__(self, message: str, estimate: int | None = None):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class ModelParams:
    """Population size ``N`` and the sizes ``m_1..m_T`` of the sampled subsets.

    Subsets are drawn independently, each uniformly among the subsets of its
    size.  Use :meth:`equal` for the common case of ``T`` subsets of size ``m``.
    """

    N: int
    m: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        if self.N < 2:
            raise MaoError(f"population size must be >= 2, got N={self.N}")
        if len(self.m) < 1:
            raise MaoError("need at least one subset (T >= 1)")
        for x in self.m:
            if not 0 < x < self.N:
                raise MaoError(f"subset sizes must satisfy 0 < m < N={self.N}, got {x}")

    @classmethod
    def equal(cls, N: int, m: int, T: int) -> "ModelParams":
        if T < 1:
            raise MaoError(f"T must be >= 1, got {T}")
        return cls(N, (m,) * T)

    @property
    def T(self) -> int:
        return len(self.m)

    @property
    def equal_sizes(self) -> bool:
        return len(set(self.m)) == 1

    @property
    def p(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.N) for x in self.m)

    @property
    def size(self) -> int:
        """The common subset size; raises when sizes differ."""
        if not self.equal_sizes:
            raise MaoError(f"subset sizes differ: {self.m}")
        return self.m[0]

    def check_category(self, t: int) -> int:
        if not 0 <= t <= self.T:
            raise MaoError(f"category must lie in 0..T={self.T}, got {t}")
        return t

    def permuted(self, order: Iterable[int]) -> "ModelParams":
        return ModelParams(self.N, tuple(self.m[i] for i in order))

    def __str__(self) -> str:
        if self.equal_sizes:
            return f"N={self.N}, m={self.m[0]}, T={self.T}"
        return f"N={self.N}, m={list(self.m)}"


@dataclass(frozen=True)
class VariableSpec:
    """``X_{=t}`` (``kind="exactly"``) or ``X_{>=t}`` (``kind="at_least"``)."""

    kind: Kind
    t: int

    def __post_init__(self) -> None:
        if self.kind not in ("exactly", "at_least"):
            raise MaoError(f"unknown variable kind {self.kind!r}")
        if self.t < 0:
            raise MaoError(f"category must be >= 0, got {self.t}")

    def categories(self, T: int) -> tuple[int, ...]:
        """Categories whose counts add up to this variable."""
        if self.t > T:
            raise MaoError(f"category must lie in 0..T={T}, got {self.t}")
        if self.kind == "exactly":
            return (self.t,)
        return tuple(range(self.t, T + 1))

    def value(self, profile: Sequence[int]) -> int:
        """Evaluate the variable on a full occupancy profile ``c_0..c_T``."""
        if self.kind == "exactly":
            return profile[self.t] if self.t < len(profile) else 0
        return sum(profile[self.t:])

    @property
    def label(self) -> str:
        return f"X={self.t}" if self.kind == "exactly" else f"X>={self.t}"


def exactly(t: int) -> VariableSpec:
    return VariableSpec("exactly", t)


def at_least(t: int) -> VariableSpec:
    return VariableSpec("at_least", t)
