"""Referee phase machine."""
from __future__ import annotations

import enum

from ..game import Query


class Phase(enum.Enum):
    IDLE = "idle"
    STRATEGISE = "strategise"
    QUERY = "query"
    COLLECT = "collect"
    EVALUATE = "evaluate"
    DONE = "done"


TRANSITIONS = {
    Phase.IDLE: {Phase.STRATEGISE},
    Phase.STRATEGISE: {Phase.QUERY},
    Phase.QUERY: {Phase.COLLECT},
    Phase.COLLECT: {Phase.EVALUATE},
    Phase.EVALUATE: {Phase.STRATEGISE, Phase.DONE},
    Phase.DONE: set(),
}


class IllegalTransition(RuntimeError):
    pass


class RefereeState:
    """Phase, round counter and the pending query.

    ``pending`` is set on entering QUERY and cleared on leaving COLLECT; the
    round counter advances on each return to STRATEGISE.
    """

    __slots__ = ("phase", "round_index", "pending")

    def __init__(self):
        self.phase = Phase.IDLE
        self.round_index = -1
        self.pending: Query | None = None

    def advance(self, target: Phase, query: Query | None = None) -> Query | None:
        """Move to ``target``; returns the query released when leaving COLLECT."""
        if target not in TRANSITIONS[self.phase]:
            raise IllegalTransition(f"{self.phase.value} -> {target.value}")
        if (target is Phase.QUERY) != (query is not None):
            raise IllegalTransition("a query is attached exactly when entering the query phase")
        released = None
        if target is Phase.QUERY:
            self.pending = query
        elif target is Phase.EVALUATE:
            released, self.pending = self.pending, None
        elif target is Phase.STRATEGISE:
            self.round_index += 1
        self.phase = target
        return released

    def check(self) -> None:
        if (self.pending is not None) != (self.phase in (Phase.QUERY, Phase.COLLECT)):
            raise AssertionError(f"pending query inconsistent with phase {self.phase.value}")
