"""The odd-cycle game: queries, the winning rule and classical strategies.

Classical win probabilities are exact :class:`fractions.Fraction` values.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import kernels

BRUTE_FORCE_CAP = 9


class GameSizeError(ValueError):
    """Raised for cycle lengths that are even or smaller than 3."""


class QueryKind(enum.Enum):
    SAME = "same"
    ADJACENT = "adjacent"


@dataclass(frozen=True, slots=True)
class Query:
    s: int
    t: int
    kind: QueryKind

    def __str__(self) -> str:
        return f"({self.s},{self.t})"


@dataclass(frozen=True)
class ClassicalStrategy:
    """A pair of deterministic vertex colourings."""

    color_a: tuple[int, ...]
    color_b: tuple[int, ...]

    def __post_init__(self):
        if len(self.color_a) != len(self.color_b):
            raise ValueError("colourings must cover the same vertex set")
        for bit in self.color_a + self.color_b:
            if bit not in (0, 1):
                raise ValueError(f"colour entries must be bits, got {bit!r}")

    @property
    def n(self) -> int:
        return len(self.color_a)


def check_n(n: int) -> int:
    if isinstance(n, bool) or not isinstance(n, int):
        raise GameSizeError(f"n must be an integer, got {n!r}")
    if n < 3:
        raise GameSizeError(f"n must be at least 3, got {n}")
    if n % 2 == 0:
        raise GameSizeError(f"n must be odd, got {n}")
    return n


def check_query(q: Query, n: int) -> Query:
    if not (0 <= q.s < n and 0 <= q.t < n):
        raise ValueError(f"query {q} has vertices outside [0, {n})")
    expected = q.s if q.kind is QueryKind.SAME else (q.s + 1) % n
    if q.t != expected:
        raise ValueError(f"query {q} violates the {q.kind.value}-seat rule for n={n}")
    return q


def enumerate_queries(n: int) -> list[Query]:
    """All 2n queries in canonical order: ascending s, same before adjacent."""
    check_n(n)
    out = []
    for j in range(n):
        out.append(Query(j, j, QueryKind.SAME))
        out.append(Query(j, (j + 1) % n, QueryKind.ADJACENT))
    return out


def wins(q: Query, a: int, b: int) -> bool:
    if q.kind is QueryKind.SAME:
        return a == b
    return a != b


def parity_strategy(n: int) -> ClassicalStrategy:
    """Alternating colouring; only the edge (n-1, 0) is monochromatic."""
    check_n(n)
    colors = tuple(v % 2 for v in range(n))
    return ClassicalStrategy(colors, colors)


def constant_strategy(n: int, bit: int = 0) -> ClassicalStrategy:
    check_n(n)
    return ClassicalStrategy((bit,) * n, (bit,) * n)


def answer(strategy: ClassicalStrategy, q: Query) -> tuple[int, int]:
    return strategy.color_a[q.s], strategy.color_b[q.t]


def strategy_win_probability(strategy: ClassicalStrategy, n: int) -> Fraction:
    check_n(n)
    if strategy.n != n:
        raise ValueError(f"strategy covers {strategy.n} vertices, game has n={n}")
    won = sum(wins(q, *answer(strategy, q)) for q in enumerate_queries(n))
    return Fraction(won, 2 * n)


def brute_force_optimum(n: int, cap: int = BRUTE_FORCE_CAP) -> tuple[Fraction, ClassicalStrategy]:
    """Exhaustive maximum over all 2^(2n) deterministic strategy pairs.

    Ties go to the lexicographically smallest ``(color_a, color_b)``.
    Refuses sizes above ``cap`` instead of truncating the search.
    """
    check_n(n)
    if n > cap:
        raise ValueError(f"brute force limited to n <= {cap} (2^(2n) pairs); got n={n}")
    best, mask_a, mask_b = kernels.classical_optimum(n)
    color_a = tuple((mask_a >> (n - 1 - v)) & 1 for v in range(n))
    color_b = tuple((mask_b >> (n - 1 - v)) & 1 for v in range(n))
    return Fraction(best, 2 * n), ClassicalStrategy(color_a, color_b)


def omega_c(n: int) -> float:
    check_n(n)
    return 1.0 - 1.0 / (2 * n)


def omega_c_exact(n: int) -> Fraction:
    check_n(n)
    return 1 - Fraction(1, 2 * n)


def mixture_win_probability(strategies: Sequence[ClassicalStrategy], weights: Sequence[float], n: int) -> float:
    """Win probability of a shared-randomness mixture of deterministic strategies."""
    if len(weights) != len(strategies) or not strategies:
        raise ValueError("need one weight per strategy")
    if any(w < 0 for w in weights):
        raise ValueError("weights must be non-negative")
    total = math.fsum(weights)
    if total <= 0:
        raise ValueError("weights must not all be zero")
    return math.fsum(w * float(strategy_win_probability(s, n)) for s, w in zip(strategies, weights)) / total
