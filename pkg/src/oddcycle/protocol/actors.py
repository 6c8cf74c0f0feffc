"""Referee, player and entanglement-source logic, independent of transport.

Each actor exposes ``handle(sender, msg)`` and returns a list of
``(recipient, Message)`` pairs to deliver. The in-process router and the TCP
layer both drive these same objects, so their observable behaviour only
depends on message content and per-component random streams.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..game import ClassicalStrategy, Query, QueryKind, check_n, enumerate_queries, wins
from ..quantum import (
    DEFAULT_PHASES,
    IDEAL,
    HeraldPattern,
    NoiseModel,
    alice_angle,
    bob_angle,
    joint_distribution,
    phase_correction,
    prepared_state,
)
from ..seeding import draw_index
from .machine import Phase, RefereeState
from .wire import (
    EVENT_READY,
    FINISH,
    HELLO,
    QUERY,
    REFEREE,
    RESPONSE,
    ROLES,
    ROUND_RESULT,
    SOURCE,
    Message,
    ProtocolError,
)

CLASSICAL = "classical"
QUANTUM = "quantum"


class DuplicateRole(ProtocolError):
    pass


@dataclass(frozen=True, slots=True)
class RoundRecord:
    round: int
    strategy: str
    gamma: int | None
    query: Query
    a: int | None
    b: int | None
    won: bool
    complete: bool = True

    def csv(self) -> str:
        q = self.query
        a = "" if self.a is None else self.a
        b = "" if self.b is None else self.b
        g = "" if self.gamma is None else self.gamma
        return f"{self.round},{self.strategy},{g},{q.s},{q.t},{q.kind.value},{a},{b},{int(self.won)}"


ROUND_LOG_HEADER = "round,strategy,gamma,s,t,kind,a,b,won"


@dataclass(frozen=True, slots=True)
class BellRecord:
    round: int
    x: int | None
    y: int | None
    a: int | None
    b: int | None
    complete: bool = True

    def csv(self) -> str:
        return ",".join("" if v is None else str(v) for v in (self.round, self.x, self.y, self.a, self.b))


BELL_LOG_HEADER = "round,x,y,a,b"


class Referee:
    """Drives rounds through the phase machine and scores them."""

    def __init__(self, n: int, rounds: int, rng: np.random.Generator, strategy: str = QUANTUM):
        self.n = check_n(n)
        if rounds < 0:
            raise ValueError("rounds must be non-negative")
        self.rounds = rounds
        self.rng = rng
        self.strategy = strategy
        self.queries = enumerate_queries(n)
        self.state = RefereeState()
        self.records: list = []
        self.commenced = 0
        self.registered: set[str] = set()
        self.finished = False
        self._gammas: dict[str, int | None] = {}
        self._bits: dict[str, Message] = {}
        self._aborted: set[int] = set()

    @property
    def round(self) -> int:
        return self.state.round_index

    def _broadcast(self, msg: Message):
        return [(p, msg) for p in ROLES]

    def _begin_round(self):
        self.state.advance(Phase.STRATEGISE)
        self.commenced += 1
        self._gammas.clear()
        self._bits.clear()
        return self._broadcast(Message(EVENT_READY, self.round))

    def _next(self):
        if self.commenced < self.rounds:
            return self._begin_round()
        if self.state.phase is Phase.EVALUATE:
            self.state.advance(Phase.DONE)
        self.finished = True
        return self._broadcast(Message(FINISH, max(self.round, 0)))

    def _draw_query(self) -> Query:
        return self.queries[draw_index(self.rng, 2 * self.n)]

    def _query_messages(self, q: Query):
        return [("alice", Message(QUERY, self.round, vertex=q.s)), ("bob", Message(QUERY, self.round, vertex=q.t))]

    def _stale(self, msg: Message) -> bool:
        if msg.round in self._aborted:
            return True
        if msg.round != self.round:
            raise ProtocolError(f"message for round {msg.round} while referee is on round {self.round}")
        return False

    def handle(self, sender: str, msg: Message):
        if sender not in ROLES:
            raise ProtocolError(f"referee does not talk to {sender}")
        if msg.kind == HELLO:
            if msg.role != sender:
                raise ProtocolError(f"hello from {sender} claims role {msg.role}")
            if sender in self.registered:
                raise DuplicateRole(f"role {sender} already registered")
            self.registered.add(sender)
            out = [(sender, Message(HELLO, 0, role=sender))]
            if len(self.registered) == len(ROLES):
                out += self._next()
            return out
        if sender not in self.registered:
            raise ProtocolError(f"{sender} sent {msg.kind} before hello")
        if self.finished:
            return []
        if msg.kind == EVENT_READY:
            if self._stale(msg):
                return []
            if self.state.phase is not Phase.STRATEGISE or sender in self._gammas:
                raise ProtocolError(f"unexpected event_ready from {sender} in {self.state.phase.value}")
            self._gammas[sender] = msg.gamma
            if len(self._gammas) < len(ROLES):
                return []
            if self._gammas["alice"] != self._gammas["bob"]:
                raise ProtocolError(f"players report different herald patterns {self._gammas}")
            q = self._draw_query()
            self.state.advance(Phase.QUERY, q)
            out = self._query_messages(q)
            self.state.advance(Phase.COLLECT)
            return out
        if msg.kind == RESPONSE:
            if self._stale(msg):
                return []
            if self.state.phase is not Phase.COLLECT or sender in self._bits:
                raise ProtocolError(f"unexpected response from {sender} in {self.state.phase.value}")
            if msg.bit is None:
                raise ProtocolError("response without a bit")
            self._bits[sender] = msg
            if len(self._bits) < len(ROLES):
                return []
            q = self.state.advance(Phase.EVALUATE)
            won = self._evaluate(q)
            return self._broadcast(Message(ROUND_RESULT, self.round, won=int(won))) + self._next()
        raise ProtocolError(f"referee cannot handle {msg.kind} from {sender}")

    def _evaluate(self, q: Query) -> bool:
        a, b = self._bits["alice"].bit, self._bits["bob"].bit
        won = wins(q, a, b)
        self.records.append(RoundRecord(self.round, self.strategy, self._gammas.get("alice"), q, a, b, won))
        return won

    def _incomplete(self, q: Query):
        self.records.append(RoundRecord(self.round, self.strategy, self._gammas.get("alice"), q, None, None, False, False))

    def abort_round(self):
        """Close the current round as incomplete (timeout or lost peer)."""
        if self.finished or self.state.phase not in (Phase.STRATEGISE, Phase.QUERY, Phase.COLLECT):
            return []
        if self.state.phase is Phase.STRATEGISE:
            self.state.advance(Phase.QUERY, self._draw_query())
        if self.state.phase is Phase.QUERY:
            self.state.advance(Phase.COLLECT)
        q = self.state.advance(Phase.EVALUATE)
        self._incomplete(q)
        self._aborted.add(self.round)
        return self._broadcast(Message(ROUND_RESULT, self.round, won=0)) + self._next()

    def stop(self):
        """Abort the running round and finish without commencing more."""
        self.rounds = self.commenced
        return self.abort_round() or ([] if self.finished else self._next())


class BellCollector(Referee):
    """Round driver for the Bell test: players pick their own settings."""

    def __init__(self, n: int, rounds: int):
        super().__init__(n, rounds, rng=None, strategy=QUANTUM)

    def _draw_query(self) -> Query:
        # Placeholder; the players choose x and y themselves.
        return self.queries[0]

    def _query_messages(self, q: Query):
        return self._broadcast(Message(QUERY, self.round))

    def _evaluate(self, q: Query) -> bool:
        ma, mb = self._bits["alice"], self._bits["bob"]
        self.records.append(BellRecord(self.round, ma.vertex, mb.vertex, ma.bit, mb.bit))
        return False

    def _incomplete(self, q: Query):
        self.records.append(BellRecord(self.round, None, None, None, None, False))


class Player:
    """One isolated player.

    ``strategy`` is a :class:`ClassicalStrategy` or ``None`` for the
    entangled strategy, in which case measurements are delegated to the
    source. With ``setting_rng`` the player picks its own input each round
    (Bell mode) instead of waiting for the referee's vertex.
    """

    def __init__(self, role: str, n: int, strategy: ClassicalStrategy | None = None, *,
                 correct_phase: bool = True, setting_rng: np.random.Generator | None = None):
        if role not in ROLES:
            raise ValueError(f"unknown role {role!r}")
        self.role = role
        self.n = check_n(n)
        self.strategy = strategy
        self.correct_phase = correct_phase
        self.setting_rng = setting_rng
        self.round = -1
        self.gamma: int | None = None
        self.vertex: int | None = None
        self.finished = False

    @property
    def quantum(self) -> bool:
        return self.strategy is None

    def hello(self):
        out = [(REFEREE, Message(HELLO, 0, role=self.role))]
        if self.quantum:
            out.append((SOURCE, Message(HELLO, 0, role=self.role)))
        return out

    def _colour(self, v: int) -> int:
        colours = self.strategy.color_a if self.role == "alice" else self.strategy.color_b
        return colours[v]

    def _respond(self, bit: int):
        vertex = self.vertex if self.setting_rng is not None else None
        return [(REFEREE, Message(RESPONSE, self.round, role=self.role, vertex=vertex, bit=bit))]

    def handle(self, sender: str, msg: Message):
        if sender == REFEREE:
            return self._from_referee(msg)
        if sender == SOURCE:
            return self._from_source(msg)
        raise ProtocolError(f"player {self.role} does not talk to {sender}")

    def _from_referee(self, msg: Message):
        kind = msg.kind
        if kind == HELLO:
            return []
        if kind == EVENT_READY:
            if msg.round <= self.round:
                raise ProtocolError(f"referee reopened round {msg.round}")
            self.round, self.gamma, self.vertex = msg.round, None, None
            if self.quantum:
                return [(SOURCE, Message(EVENT_READY, self.round, role=self.role))]
            return [(REFEREE, Message(EVENT_READY, self.round, role=self.role))]
        if kind == QUERY:
            if msg.round != self.round:
                raise ProtocolError(f"query for round {msg.round} during round {self.round}")
            if self.setting_rng is not None:
                self.vertex = draw_index(self.setting_rng, self.n)
            elif msg.vertex is None or msg.vertex >= self.n:
                raise ProtocolError(f"query without a valid vertex: {msg}")
            else:
                self.vertex = msg.vertex
            if not self.quantum:
                return self._respond(self._colour(self.vertex))
            gamma = self.gamma if (self.role == "bob" and self.correct_phase) else None
            return [(SOURCE, Message(QUERY, self.round, role=self.role, gamma=gamma, vertex=self.vertex))]
        if kind == ROUND_RESULT:
            return []
        if kind == FINISH:
            self.finished = True
            if self.quantum:
                return [(SOURCE, Message(FINISH, msg.round, role=self.role))]
            return []
        raise ProtocolError(f"player cannot handle {kind} from referee")

    def _from_source(self, msg: Message):
        kind = msg.kind
        if kind == HELLO:
            return []
        if msg.round != self.round:
            return []  # left over from an aborted round
        if kind == EVENT_READY:
            self.gamma = msg.gamma
            return [(REFEREE, Message(EVENT_READY, self.round, role=self.role, gamma=msg.gamma))]
        if kind == RESPONSE:
            if msg.bit is None:
                raise ProtocolError("source response without a bit")
            bit = 1 - msg.bit if self.role == "alice" else msg.bit
            return self._respond(bit)
        raise ProtocolError(f"player cannot handle {kind} from source")


@dataclass
class _Pair:
    requests: set = field(default_factory=set)
    gamma: int | None = None
    queries: dict = field(default_factory=dict)


class Source:
    """Trusted holder of the shared two-qubit state.

    Heralds a pattern once both players request entanglement for a round,
    then answers both players' measurements from one joint draw.
    """

    def __init__(self, n: int, herald_rng: np.random.Generator, measure_rng: np.random.Generator,
                 noise: NoiseModel = IDEAL, phase_table: tuple[float, ...] = DEFAULT_PHASES):
        self.n = check_n(n)
        self.herald_rng = herald_rng
        self.measure_rng = measure_rng
        self.noise = noise
        self.phase_table = tuple(phase_table)
        self.latest = -1
        self.pending: dict[int, _Pair] = {}
        self.finished: set[str] = set()
        self._states: dict = {}

    def _state(self, gamma: int, correction: int | None):
        key = (gamma, correction)
        state = self._states.get(key)
        if state is None:
            state = prepared_state(gamma, self.noise, correct=False, phase_table=self.phase_table)
            if correction is not None:
                state = phase_correction(state, HeraldPattern(correction, self.phase_table))
            self._states[key] = state
        return state

    def _entry(self, r: int) -> _Pair | None:
        if r < self.latest:
            return None
        if r > self.latest:
            self.latest = r
            self.pending.clear()
        return self.pending.setdefault(r, _Pair())

    def handle(self, sender: str, msg: Message):
        if sender not in ROLES:
            raise ProtocolError(f"source does not talk to {sender}")
        kind = msg.kind
        if kind == HELLO:
            return [(sender, Message(HELLO, 0, role=sender))]
        if kind == FINISH:
            self.finished.add(sender)
            return []
        entry = self._entry(msg.round)
        if entry is None:
            return []
        if kind == EVENT_READY:
            entry.requests.add(sender)
            if len(entry.requests) < len(ROLES) or entry.gamma is not None:
                return []
            entry.gamma = draw_index(self.herald_rng, 4)
            return [(p, Message(EVENT_READY, msg.round, gamma=entry.gamma)) for p in ROLES]
        if kind == QUERY:
            if entry.gamma is None or msg.vertex is None or msg.vertex >= self.n:
                return []
            entry.queries[sender] = msg
            if len(entry.queries) < len(ROLES):
                return []
            qa, qb = entry.queries["alice"], entry.queries["bob"]
            state = self._state(entry.gamma, qb.gamma)
            probs = joint_distribution(state, alice_angle(self.n, qa.vertex), bob_angle(self.n, qb.vertex),
                                       self.noise.readout_error)
            k = kernels.pick_outcome(probs, self.measure_rng.random())
            del self.pending[msg.round]
            return [("alice", Message(RESPONSE, msg.round, role="alice", bit=k >> 1)),
                    ("bob", Message(RESPONSE, msg.round, role="bob", bit=k & 1))]
        raise ProtocolError(f"source cannot handle {kind}")
