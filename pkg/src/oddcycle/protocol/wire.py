"""Line-delimited text wire format.

One message per line::

    v=1 kind=<kind> round=<uint> [role=..] [gamma=..] [vertex=..] [bit=..] [won=..]

Optional keys appear in exactly that order; unknown keys are rejected.
"""
from __future__ import annotations

from typing import NamedTuple

VERSION = 1

HELLO = "hello"
EVENT_READY = "event_ready"
QUERY = "query"
RESPONSE = "response"
ROUND_RESULT = "round_result"
FINISH = "finish"
KINDS = (HELLO, EVENT_READY, QUERY, RESPONSE, ROUND_RESULT, FINISH)

ROLES = ("alice", "bob")
REFEREE = "referee"
SOURCE = "source"

OPTIONAL_KEYS = ("role", "gamma", "vertex", "bit", "won")

ALLOWED_ROUTES = frozenset(
    [(p, REFEREE) for p in ROLES]
    + [(REFEREE, p) for p in ROLES]
    + [(p, SOURCE) for p in ROLES]
    + [(SOURCE, p) for p in ROLES]
)


class ProtocolError(RuntimeError):
    """A peer broke the message protocol."""


class WireError(ProtocolError):
    """A line could not be parsed."""


class VersionError(WireError):
    pass


class RoutingError(ProtocolError):
    """A message was addressed along a forbidden link (e.g. player to player)."""


class Message(NamedTuple):
    kind: str
    round: int
    role: str | None = None
    gamma: int | None = None
    vertex: int | None = None
    bit: int | None = None
    won: int | None = None

    def encode(self) -> str:
        parts = [f"v={VERSION}", f"kind={self.kind}", f"round={self.round}"]
        for key in OPTIONAL_KEYS:
            value = getattr(self, key)
            if value is not None:
                parts.append(f"{key}={value}")
        return " ".join(parts) + "\n"


def _uint(key: str, text: str) -> int:
    if not text.isdigit():
        raise WireError(f"{key} must be an unsigned integer, got {text!r}")
    return int(text)


def _bit(key: str, text: str) -> int:
    if text not in ("0", "1"):
        raise WireError(f"{key} must be 0 or 1, got {text!r}")
    return int(text)


def decode(line: str | bytes) -> Message:
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise WireError("message is not valid UTF-8") from exc
    if line.endswith("\n"):
        line = line[:-1]
    tokens = line.split(" ")
    pairs = []
    for tok in tokens:
        key, sep, value = tok.partition("=")
        if not sep or not key:
            raise WireError(f"malformed field {tok!r}")
        pairs.append((key, value))
    if len(pairs) < 3 or [k for k, _ in pairs[:3]] != ["v", "kind", "round"]:
        raise WireError("message must start with v=, kind=, round=")
    if pairs[0][1] != str(VERSION):
        raise VersionError(f"unsupported protocol version {pairs[0][1]!r}")
    kind = pairs[1][1]
    if kind not in KINDS:
        raise WireError(f"unknown message kind {kind!r}")
    fields: dict = {"kind": kind, "round": _uint("round", pairs[2][1])}
    last = -1
    for key, value in pairs[3:]:
        if key not in OPTIONAL_KEYS:
            raise WireError(f"unknown key {key!r}")
        idx = OPTIONAL_KEYS.index(key)
        if idx <= last:
            raise WireError(f"key {key!r} out of order or repeated")
        last = idx
        if key == "role":
            if value not in ROLES:
                raise WireError(f"unknown role {value!r}")
            fields[key] = value
        elif key == "gamma":
            g = _uint(key, value)
            if g > 3:
                raise WireError(f"gamma must be in 0..3, got {g}")
            fields[key] = g
        elif key == "vertex":
            fields[key] = _uint(key, value)
        else:
            fields[key] = _bit(key, value)
    return Message(**fields)


def check_route(sender: str, recipient: str) -> None:
    if (sender, recipient) not in ALLOWED_ROUTES:
        raise RoutingError(f"no link from {sender} to {recipient}")
