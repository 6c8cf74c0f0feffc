"""Aggregate statistics over round records."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..game import Query, enumerate_queries, omega_c


@dataclass
class GameStats:
    n: int
    total_rounds: int
    wins: int
    incomplete: int = 0
    per_query_table: dict[Query, tuple[int, int]] = field(default_factory=dict)
    aborted: bool = False

    @property
    def defined(self) -> bool:
        return self.total_rounds > 0

    @property
    def omega_hat(self) -> float | None:
        return self.wins / self.total_rounds if self.total_rounds else None

    @property
    def std_error(self) -> float | None:
        p = self.omega_hat
        return None if p is None else binomial_se(p, self.total_rounds)

    @property
    def sigma_above_classical(self) -> float | None:
        return sigma_above_classical(self, self.n) if self.total_rounds else None


def binomial_se(p: float, trials: int) -> float:
    return math.sqrt(p * (1 - p) / trials)


def game_stats(n: int, records, aborted: bool = False) -> GameStats:
    table = {q: [0, 0] for q in enumerate_queries(n)}
    won = incomplete = 0
    for rec in records:
        cell = table[rec.query]
        cell[0] += 1
        if rec.won:
            cell[1] += 1
            won += 1
        if not rec.complete:
            incomplete += 1
    return GameStats(n, len(records), won, incomplete, {q: tuple(v) for q, v in table.items()}, aborted)


def sigma_from(omega_hat: float, rounds: int, n: int) -> float:
    """(omega_hat - omega_c) in units of the binomial standard error."""
    if rounds <= 0:
        raise ValueError("sigma above classical needs at least one round")
    diff = omega_hat - omega_c(n)
    se = binomial_se(omega_hat, rounds)
    if se == 0.0:
        return 0.0 if diff == 0 else math.copysign(math.inf, diff)
    return diff / se


def sigma_above_classical(stats: GameStats, n: int) -> float:
    if stats.total_rounds == 0:
        raise ValueError("sigma above classical needs at least one round")
    return sigma_from(stats.wins / stats.total_rounds, stats.total_rounds, n)


def two_proportion_z(wins1: int, n1: int, wins2: int, n2: int) -> float:
    """Pooled two-proportion z statistic."""
    pooled = (wins1 + wins2) / (n1 + n2)
    se = math.sqrt(pooled * (1 - pooled) * (1 / n1 + 1 / n2))
    diff = wins1 / n1 - wins2 / n2
    if se == 0.0:
        return 0.0 if diff == 0 else math.inf
    return abs(diff) / se
