"""Bell-test mode: independent settings, the odd-cycle inequality and nonlocal content."""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from .game import check_n, omega_c
from .protocol.batch import bell_outcomes, run_bell_batch
from .protocol.inproc import BATCH, GameConfig, INPROC, TCP, run_bell_actors
from .quantum import IDEAL, NoiseModel, degraded_win_probability, omega_q

log = logging.getLogger(__name__)


class InsufficientDataError(ValueError):
    pass


@dataclass
class SettingCounts:
    """Outcome counts indexed ``counts[x, y, a, b]``."""

    n: int
    counts: np.ndarray

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.shape != (self.n, self.n, 2, 2):
            raise ValueError(f"counts must have shape ({self.n}, {self.n}, 2, 2)")
        if (self.counts < 0).any():
            raise ValueError("counts must be non-negative")

    @classmethod
    def empty(cls, n: int) -> "SettingCounts":
        return cls(n, np.zeros((n, n, 2, 2), dtype=np.int64))

    @classmethod
    def from_records(cls, n: int, records) -> "SettingCounts":
        out = cls.empty(n)
        for rec in records:
            if rec.complete:
                out.counts[rec.x, rec.y, rec.a, rec.b] += 1
        return out

    def trials(self, x: int, y: int) -> int:
        return int(self.counts[x, y].sum())

    def conditional(self, x: int, y: int) -> np.ndarray:
        total = self.trials(x, y)
        if total == 0:
            raise InsufficientDataError(f"no trials for setting pair ({x}, {y})")
        return self.counts[x, y] / total

    def restricted(self) -> "SettingCounts":
        """Copy keeping only the setting pairs that enter the inequality."""
        out = SettingCounts.empty(self.n)
        for x, y in relevant_pairs(self.n):
            out.counts[x, y] = self.counts[x, y]
        return out


@dataclass(frozen=True)
class BellEstimate:
    n: int
    omega_hat: float
    std_error: float
    p_nl_lower: float
    p_nl_error: float

    @property
    def sub_classical(self) -> bool:
        return self.p_nl_lower < 0

    @property
    def p_nl_clamped(self) -> float:
        return max(self.p_nl_lower, 0.0)


def relevant_pairs(n: int) -> list[tuple[int, int]]:
    out = []
    for j in range(n):
        out += [(j, j), (j, (j + 1) % n)]
    return out


def run_bell_test(cfg: GameConfig, log_path=None) -> SettingCounts:
    """Collect Bell-mode counts; every round is kept, relevant or not.

    ``inproc`` and ``batch`` use the vectorised engine (identical draws to the
    actor pipeline); ``tcp`` runs the networked services.
    """
    if cfg.transport in (INPROC, BATCH):
        x, y, gamma, u, table, counts = run_bell_batch(cfg)
        if log_path is not None:
            a, b = bell_outcomes(x, y, gamma, u, table)
            _write_bell_log(log_path, zip(range(cfg.rounds), x.tolist(), y.tolist(), a.tolist(), b.tolist()))
        return SettingCounts(cfg.n, counts)
    records = run_bell_actors(cfg)
    if log_path is not None:
        _write_bell_log(log_path, ((r.round, r.x, r.y, r.a, r.b) for r in records))
    return SettingCounts.from_records(cfg.n, records)


def _write_bell_log(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("round,x,y,a,b\n")
        for row in rows:
            fh.write(",".join("" if v is None else str(v) for v in row) + "\n")


def estimate_omega(counts: SettingCounts, n: int | None = None) -> BellEstimate:
    """Inequality estimator with per-cell binomial errors added in quadrature."""
    n = check_n(counts.n if n is None else n)
    if n != counts.n:
        raise ValueError("count table and n disagree")
    total = 0.0
    var = 0.0
    for j in range(n):
        for y, winning in ((j, ((0, 0), (1, 1))), ((j + 1) % n, ((0, 1), (1, 0)))):
            trials = counts.trials(j, y)
            if trials == 0:
                raise InsufficientDataError(f"setting pair ({j}, {y}) has no trials")
            p = sum(int(counts.counts[j, y, a, b]) for a, b in winning) / trials
            total += p
            var += p * (1 - p) / trials
    omega_hat = total / (2 * n)
    se = math.sqrt(var) / (2 * n)
    scale = 1.0 / (1.0 - omega_c(n))
    return BellEstimate(n, omega_hat, se, 1.0 - (1.0 - omega_hat) * scale, se * scale)


def raw_nonlocal_content(omega_hat: float, n: int) -> float:
    return 1.0 - (1.0 - omega_hat) / (1.0 - omega_c(n))


def nonlocal_content(omega_hat: float, n: int) -> float:
    """Lower bound on the nonlocal fraction, clamped at 0 for sub-classical values."""
    if not 0.0 <= omega_hat <= 1.0:
        raise ValueError(f"omega_hat must lie in [0, 1], got {omega_hat}")
    raw = raw_nonlocal_content(omega_hat, n)
    if raw < 0:
        log.info("sub-classical omega_hat %.6f gives raw nonlocal content %.6f; reporting 0", omega_hat, raw)
        return 0.0
    return raw


def theoretical_pnl_bound(n: int) -> float:
    check_n(n)
    return 1.0 - (2 * n - n * (1 + math.cos(math.pi / (2 * n))))


def calibrate_visibility(target_ratio: float, n: int) -> float:
    """Werner visibility at which the ideal strategy reaches ``target_ratio * omega_q``."""
    if not 0.0 < target_ratio <= 1.0:
        raise ValueError(f"target ratio must lie in (0, 1], got {target_ratio}")
    wq = omega_q(n)
    v = (target_ratio * wq - 0.5) / (wq - 0.5)
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"ratio {target_ratio} needs visibility {v:.6f}, outside [0, 1]")
    return v


def calibrated_noise(target_ratio: float, n: int) -> NoiseModel:
    return NoiseModel(visibility=calibrate_visibility(target_ratio, n))


@dataclass(frozen=True)
class AdvantageWindow:
    last_n: int | None
    open_ended: bool


def advantage_window(ratio: float, n_max: int) -> AdvantageWindow:
    """Largest odd n in [3, n_max] with ratio * omega_q(n) > omega_c(n)."""
    if not 0.0 < ratio <= 1.0:
        raise ValueError(f"ratio must lie in (0, 1], got {ratio}")
    last = None
    for n in range(3, n_max + 1, 2):
        if ratio * omega_q(n) > omega_c(n):
            last = n
    return AdvantageWindow(last, last is not None and last == n_max - (1 - n_max % 2))


def chsh_reference() -> dict[str, float]:
    return {"omega_c": 0.75, "omega_q": math.cos(math.pi / 8) ** 2, "pnl": math.sqrt(2) - 1}


@dataclass(frozen=True)
class NonsignalingResult:
    max_deviation: float
    std_error: float
    max_z: float
    worst: tuple
    comparisons: int

    @property
    def passed(self) -> bool:
        return self.max_z < 4.0


def nonsignaling_check(counts: SettingCounts) -> NonsignalingResult:
    """Largest change of either party's marginal with the other party's setting.

    ``worst`` names the comparison as ``(party, own_setting, other1, other2)``.
    """
    n = counts.n
    c = counts.counts
    alice = c.sum(axis=3)  # [x, y, a]
    bob = c.sum(axis=2).transpose(1, 0, 2)  # [y, x, b]
    best = (0.0, 0.0, 0.0, None)
    comparisons = 0
    for party, marg in (("alice", alice), ("bob", bob)):
        for own in range(n):
            trials = marg[own].sum(axis=1)
            others = [o for o in range(n) if trials[o] > 0]
            if len(others) < 2:
                raise InsufficientDataError(f"{party} setting {own} seen with fewer than two partner settings")
            for o1, o2 in itertools.combinations(others, 2):
                n1, n2 = trials[o1], trials[o2]
                k1, k2 = marg[own, o1, 0], marg[own, o2, 0]
                dev = abs(k1 / n1 - k2 / n2)
                pooled = (k1 + k2) / (n1 + n2)
                se = math.sqrt(pooled * (1 - pooled) * (1 / n1 + 1 / n2))
                z = dev / se if se > 0 else (0.0 if dev == 0 else math.inf)
                comparisons += 1
                if z > best[2] or best[3] is None:
                    best = (float(dev), float(se), float(z), (party, own, o1, o2))
    return NonsignalingResult(best[0], best[1], best[2], best[3], comparisons)


def predicted_omega(n: int, noise: NoiseModel = IDEAL) -> float:
    return degraded_win_probability(omega_q(n), noise)
