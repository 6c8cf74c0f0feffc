"""Vectorised round engine.

Consumes the same per-component streams as the actor pipeline (one double
per round from each stream) and applies the same outcome-selection rule, so
for a fault-free run it reproduces the actor records exactly. Used for
sweeps and large Bell runs where per-message dispatch would dominate.
"""
from __future__ import annotations

import numpy as np

from .. import kernels, seeding
from ..game import enumerate_queries, wins
from ..quantum import alice_angle, bob_angle, joint_distribution, phase_correction, prepared_state, HeraldPattern
from .actors import CLASSICAL, RoundRecord
from .stats import GameStats, game_stats


def _indices(rng: np.random.Generator, k: int, size: int) -> np.ndarray:
    return np.minimum((rng.random(size) * k).astype(np.int64), k - 1)


def _source_state(cfg, gamma: int):
    state = prepared_state(gamma, cfg.noise, correct=False, phase_table=cfg.phase_table)
    if cfg.correct_phase:
        state = phase_correction(state, HeraldPattern(gamma, cfg.phase_table))
    return state


def measurement_table(cfg, pairs) -> np.ndarray:
    """Joint (m_A, m_B) probabilities per herald pattern and (alice, bob) vertex pair."""
    n = cfg.n
    table = np.zeros((4, len(pairs), 4))
    for g in range(4):
        state = _source_state(cfg, g)
        for i, (x, y) in enumerate(pairs):
            table[g, i] = joint_distribution(state, alice_angle(n, x), bob_angle(n, y), cfg.noise.readout_error)
    return table


def _pick(table_rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = np.zeros((len(u),))
    k = np.zeros(len(u), dtype=np.int64)
    open_ = np.ones(len(u), dtype=bool)
    for j in range(3):
        cdf = cdf + table_rows[:, j]
        hit = open_ & (cdf <= u)
        k[hit] = j + 1
        open_ &= hit
    return k


def run_game_batch(cfg, with_records: bool = True) -> tuple[GameStats, list]:
    n, rounds = cfg.n, cfg.rounds
    queries = enumerate_queries(n)
    qidx = _indices(seeding.stream(cfg.seed, seeding.REFEREE), 2 * n, rounds)
    s = np.array([q.s for q in queries])[qidx]
    t = np.array([q.t for q in queries])[qidx]
    if cfg.strategy == CLASSICAL:
        a = np.array(cfg.classical.color_a)[s]
        b = np.array(cfg.classical.color_b)[t]
        gamma = None
    else:
        gamma = _indices(seeding.stream(cfg.seed, seeding.SOURCE_HERALD), 4, rounds)
        u = seeding.stream(cfg.seed, seeding.SOURCE_MEASURE).random(rounds)
        table = measurement_table(cfg, [(q.s, q.t) for q in queries])
        k = _pick(table[gamma, qidx], u)
        a = 1 - (k >> 1)
        b = k & 1
    same = np.array([q.s == q.t for q in queries])[qidx]
    won = np.where(same, a == b, a != b)
    if not with_records:
        return _stats_from_arrays(n, qidx, won), []
    records = [
        RoundRecord(r, cfg.strategy, None if gamma is None else int(gamma[r]), queries[qi], int(ai), int(bi), bool(w))
        for r, (qi, ai, bi, w) in enumerate(zip(qidx.tolist(), a.tolist(), b.tolist(), won.tolist()))
    ]
    return game_stats(n, records), records


def _stats_from_arrays(n, qidx, won) -> GameStats:
    queries = enumerate_queries(n)
    counts = np.bincount(qidx, minlength=2 * n)
    wcount = np.bincount(qidx, weights=won, minlength=2 * n).astype(np.int64)
    table = {q: (int(c), int(w)) for q, c, w in zip(queries, counts, wcount)}
    return GameStats(n, len(qidx), int(won.sum()), 0, table)


def run_bell_batch(cfg):
    """Bell-mode rounds; returns arrays ``(x, y, a, b)`` and the count table."""
    n, rounds = cfg.n, cfg.rounds
    x = _indices(seeding.stream(cfg.seed, "alice"), n, rounds)
    y = _indices(seeding.stream(cfg.seed, "bob"), n, rounds)
    gamma = _indices(seeding.stream(cfg.seed, seeding.SOURCE_HERALD), 4, rounds)
    u = seeding.stream(cfg.seed, seeding.SOURCE_MEASURE).random(rounds)
    pairs = [(i, j) for i in range(n) for j in range(n)]
    table = measurement_table(cfg, pairs).reshape(4, n, n, 4)
    counts_m = kernels.tally_outcomes(gamma, x, y, u, np.ascontiguousarray(table))
    # measurement order (m_A, m_B) -> output order (a, b) with a = 1 - m_A
    counts = counts_m[:, :, [2, 3, 0, 1]].reshape(n, n, 2, 2)
    return x, y, gamma, u, table, counts


def bell_outcomes(x, y, gamma, u, table):
    """Per-round output bits for the arrays produced by :func:`run_bell_batch`."""
    k = _pick(table[gamma, x, y], u)
    return 1 - (k >> 1), k & 1
