"""Game configuration and the synchronous in-process transport."""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

from .. import seeding
from ..game import ClassicalStrategy, check_n, parity_strategy
from ..quantum import DEFAULT_PHASES, IDEAL, NoiseModel
from .actors import CLASSICAL, QUANTUM, BellCollector, Player, Referee, Source
from .stats import GameStats, game_stats
from .wire import REFEREE, ROLES, SOURCE, check_route

log = logging.getLogger(__name__)

INPROC = "inproc"
TCP = "tcp"
BATCH = "batch"
TRANSPORTS = (INPROC, TCP, BATCH)


@dataclass
class GameConfig:
    n: int
    rounds: int = 100_000
    strategy: str = QUANTUM
    noise: NoiseModel = IDEAL
    seed: int = 0
    transport: str = INPROC
    classical: ClassicalStrategy | None = None
    correct_phase: bool = True
    phase_table: tuple[float, ...] = DEFAULT_PHASES
    round_timeout: float = 5.0

    def __post_init__(self):
        check_n(self.n)
        if self.rounds < 0:
            raise ValueError("rounds must be non-negative")
        if self.strategy not in (CLASSICAL, QUANTUM):
            raise ValueError(f"strategy must be {CLASSICAL!r} or {QUANTUM!r}")
        if self.transport not in TRANSPORTS:
            raise ValueError(f"transport must be one of {', '.join(TRANSPORTS)}")
        seeding.check_seed(self.seed)
        if self.strategy == CLASSICAL and self.classical is None:
            self.classical = parity_strategy(self.n)

    def player_strategy(self):
        return self.classical if self.strategy == CLASSICAL else None


def make_referee(cfg: GameConfig) -> Referee:
    return Referee(cfg.n, cfg.rounds, seeding.stream(cfg.seed, seeding.REFEREE), cfg.strategy)


def make_player(cfg: GameConfig, role: str, bell: bool = False) -> Player:
    rng = seeding.stream(cfg.seed, role) if bell else None
    return Player(role, cfg.n, cfg.player_strategy(), correct_phase=cfg.correct_phase, setting_rng=rng)


def make_source(cfg: GameConfig) -> Source:
    return Source(cfg.n, seeding.stream(cfg.seed, seeding.SOURCE_HERALD),
                  seeding.stream(cfg.seed, seeding.SOURCE_MEASURE), cfg.noise, cfg.phase_table)


class Router:
    """Delivers messages between actors in FIFO order on one thread."""

    def __init__(self, actors: dict):
        self.actors = actors
        self.delivered = 0

    def run(self, initial) -> None:
        queue = deque(initial)
        actors = self.actors
        while queue:
            sender, recipient, msg = queue.popleft()
            check_route(sender, recipient)
            target = actors.get(recipient)
            if target is None:
                log.debug("dropping %s for absent %s", msg.kind, recipient)
                continue
            self.delivered += 1
            for dest, out in target.handle(sender, msg):
                queue.append((recipient, dest, out))


def _run_actors(referee, players, source):
    actors = {REFEREE: referee, **players}
    if source is not None:
        actors[SOURCE] = source
    initial = []
    for role, player in players.items():
        initial += [(role, dest, msg) for dest, msg in player.hello()]
    Router(actors).run(initial)
    if not referee.finished:
        raise RuntimeError("in-process game stalled before finishing")


def run_game(cfg: GameConfig) -> tuple[GameStats, list]:
    """Play ``cfg.rounds`` rounds; returns the statistics and every round record."""
    if cfg.transport == TCP:
        from .net import run_game_tcp

        return run_game_tcp(cfg)
    if cfg.transport == BATCH:
        from .batch import run_game_batch

        return run_game_batch(cfg)
    referee = make_referee(cfg)
    players = {role: make_player(cfg, role) for role in ROLES}
    source = make_source(cfg) if cfg.strategy == QUANTUM else None
    _run_actors(referee, players, source)
    return game_stats(cfg.n, referee.records), referee.records


def run_bell_actors(cfg: GameConfig) -> list:
    """Bell-test rounds through the actor pipeline; returns the raw records."""
    if cfg.transport == BATCH:
        raise ValueError("use oddcycle.protocol.batch.run_bell_batch for the vectorised engine")
    if cfg.transport == TCP:
        from .net import run_bell_tcp

        return run_bell_tcp(cfg)
    collector = BellCollector(cfg.n, cfg.rounds)
    players = {role: make_player(cfg, role, bell=True) for role in ROLES}
    _run_actors(collector, players, make_source(cfg))
    return collector.records
