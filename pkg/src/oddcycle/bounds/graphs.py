"""Exclusivity graphs of the odd-cycle inequality and Möbius ladders."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..game import check_n


class Event(NamedTuple):
    """Outcome ``(a, b)`` under settings ``(x, y)``."""

    a: int
    b: int
    x: int
    y: int

    def __str__(self):
        return f"({self.a}{self.b}|{self.x},{self.y})"


@dataclass
class ExclusivityGraph:
    vertices: list
    adjacency: np.ndarray
    circulant: tuple[int, tuple[int, ...]] | None = None

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=bool)
        if adj.shape != (len(self.vertices),) * 2:
            raise ValueError("adjacency does not match the vertex list")
        if (adj != adj.T).any():
            raise ValueError("adjacency must be symmetric")
        if adj.diagonal().any():
            raise ValueError("self-loops are not allowed")
        self.adjacency = adj

    @property
    def order(self) -> int:
        return len(self.vertices)

    @property
    def size(self) -> int:
        return int(self.adjacency.sum()) // 2

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def edges(self) -> list[tuple[int, int]]:
        u, v = np.nonzero(np.triu(self.adjacency))
        return list(zip(u.tolist(), v.tolist()))

    def neighbour_masks(self) -> list[int]:
        return [sum(1 << int(j) for j in np.flatnonzero(row)) for row in self.adjacency]

    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.adjacency.astype(float))

    def edge_list(self) -> str:
        """Plain ``u v`` lines."""
        return "".join(f"{u} {v}\n" for u, v in self.edges())


def from_edges(order: int, edges, vertices=None) -> ExclusivityGraph:
    adj = np.zeros((order, order), dtype=bool)
    for u, v in edges:
        adj[u, v] = adj[v, u] = True
    return ExclusivityGraph(list(range(order)) if vertices is None else list(vertices), adj)


def inequality_events(n: int) -> list[Event]:
    """Winning events in canonical order: per j, (00|jj), (11|jj), (01|j,j+1), (10|j,j+1)."""
    check_n(n)
    out = []
    for j in range(n):
        k = (j + 1) % n
        out += [Event(0, 0, j, j), Event(1, 1, j, j), Event(0, 1, j, k), Event(1, 0, j, k)]
    return out


def exclusive(e: Event, f: Event) -> bool:
    return (e.x == f.x and e.a != f.a) or (e.y == f.y and e.b != f.b)


def exclusivity_graph(n: int) -> ExclusivityGraph:
    events = inequality_events(n)
    size = len(events)
    adj = np.zeros((size, size), dtype=bool)
    for i, j in itertools.combinations(range(size), 2):
        if exclusive(events[i], events[j]):
            adj[i, j] = adj[j, i] = True
    return ExclusivityGraph(events, adj)


def circulant_graph(order: int, connections) -> ExclusivityGraph:
    conn = tuple(sorted({d % order for d in connections} - {0}))
    adj = np.zeros((order, order), dtype=bool)
    for i in range(order):
        for d in conn:
            adj[i, (i + d) % order] = adj[(i + d) % order, i] = True
    return ExclusivityGraph(list(range(order)), adj, (order, conn))


def mobius_ladder(order: int) -> ExclusivityGraph:
    if order < 6 or order % 2:
        raise ValueError(f"Möbius ladder needs an even order >= 6, got {order}")
    return circulant_graph(order, (1, order // 2))


def circulant_spectrum(order: int, connections) -> np.ndarray:
    """Eigenvalues of a circulant graph from the DFT of its first row."""
    row = np.zeros(order)
    for d in connections:
        row[d % order] = row[-d % order] = 1.0
    return np.sort(np.fft.fft(row).real)


def find_triangle(g: ExclusivityGraph) -> tuple[int, int, int] | None:
    adj = g.adjacency
    for u, v in g.edges():
        common = np.flatnonzero(adj[u] & adj[v])
        if common.size:
            return (u, v, int(common[0]))
    return None


@dataclass(frozen=True)
class IsomorphismCheck:
    ok: bool
    witness: tuple[int, ...] | None = None
    reason: str | None = None

    def __bool__(self):
        return self.ok


def _rim_positions(n: int) -> dict[Event, int]:
    """Position of each inequality event on the Möbius rim.

    Walking (00|j,j) -> (10|j,j+1) -> (11|j+1,j+1) -> (01|j+1,j+2) and
    advancing j by 2 visits all 4n events because n is odd; the remaining
    edges (00|jj)-(11|jj) and (01|..)-(10|..) land exactly 2n steps apart.
    """
    pos = {}
    for k in range(n):
        j = (2 * k) % n
        j1, j2 = (j + 1) % n, (j + 2) % n
        for offset, ev in enumerate((Event(0, 0, j, j), Event(1, 0, j, j1), Event(1, 1, j1, j1), Event(0, 1, j1, j2))):
            pos[ev] = 4 * k + offset
    return pos


def verify_is_mobius(g: ExclusivityGraph, n: int) -> IsomorphismCheck:
    """Show ``g`` is isomorphic to M_{4n}: invariant screen, then an explicit map checked edge by edge."""
    order = 4 * check_n(n)
    target = mobius_ladder(order)
    if g.order != order:
        return IsomorphismCheck(False, reason=f"order {g.order} != {order}")
    if g.size != target.size:
        return IsomorphismCheck(False, reason=f"size {g.size} != {target.size}")
    if (g.degrees() != 3).any():
        return IsomorphismCheck(False, reason="not 3-regular")
    if np.max(np.abs(g.spectrum() - target.spectrum())) > 1e-9:
        return IsomorphismCheck(False, reason="spectrum differs")
    if g.circulant == target.circulant:
        witness = tuple(range(order))
    elif all(isinstance(v, Event) for v in g.vertices):
        pos = _rim_positions(n)
        try:
            witness = tuple(pos[v] for v in g.vertices)
        except KeyError as exc:
            return IsomorphismCheck(False, reason=f"vertex {exc.args[0]} is not an inequality event")
    else:
        return IsomorphismCheck(False, reason="no witness construction for this vertex labelling")
    if sorted(witness) != list(range(order)):
        return IsomorphismCheck(False, witness, "witness is not a bijection")
    w = np.asarray(witness)
    if (target.adjacency[np.ix_(w, w)] != g.adjacency).any():
        return IsomorphismCheck(False, witness, "witness does not preserve edges")
    return IsomorphismCheck(True, witness)
