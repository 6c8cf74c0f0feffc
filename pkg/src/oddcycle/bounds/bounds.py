"""Independence, Lovász and fractional packing numbers, and the resulting bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..game import check_n
from ..quantum import omega_q
from .graphs import ExclusivityGraph, exclusivity_graph, find_triangle, mobius_ladder, verify_is_mobius
from .lp import LPError, lp_solve

MAX_VERTICES = 64
COMPUTED_N_MAX = 13
THETA_TOL = 1e-6


class TriangleError(ValueError):
    def __init__(self, triangle):
        super().__init__(f"graph contains triangle {triangle}; edge constraints would miss a clique")
        self.triangle = triangle


def independence_number(g: ExclusivityGraph, cap: int = MAX_VERTICES) -> tuple[int, tuple[int, ...]]:
    """Exact maximum independent set by branch and bound; returns (size, witness)."""
    if g.order > cap:
        raise ValueError(f"independence number limited to {cap} vertices, graph has {g.order}")
    size, mask = kernels.max_independent_set(g.neighbour_masks())
    witness = tuple(i for i in range(g.order) if mask >> i & 1)
    return size, witness


def fractional_packing(g: ExclusivityGraph) -> float:
    """LP relaxation with one constraint per maximal clique (edges and isolated vertices)."""
    tri = find_triangle(g)
    if tri is not None:
        raise TriangleError(tri)
    rows = []
    degrees = g.degrees()
    for u, v in g.edges():
        row = np.zeros(g.order)
        row[[u, v]] = 1.0
        rows.append(row)
    for v in np.flatnonzero(degrees == 0):
        row = np.zeros(g.order)
        row[v] = 1.0
        rows.append(row)
    res = lp_solve(np.ones(g.order), np.array(rows), np.ones(len(rows)))
    return res.value


def lovasz_theta_circulant(order: int, connections) -> float:
    """Lovász theta of a circulant graph via its cyclic-symmetric feasible matrices.

    Averaging an optimal matrix over the rotations keeps it feasible and
    optimal, so it is enough to search circulant B with first row c:
    c_0 = 1/N, c_d = 0 on the connection set, and every DFT eigenvalue
    sum_d c_d cos(2 pi k d / N) non-negative. Then theta = N * sum_d c_d,
    and the remaining problem is a linear program over the free c_d.
    """
    conn = {d % order for d in connections} | {-d % order for d in connections}
    reps = [d for d in range(1, order // 2 + 1) if d not in conn]
    mult = np.array([1.0 if 2 * d == order else 2.0 for d in reps])
    if not reps:
        return 1.0
    k = np.arange(order)[:, None]
    cosines = np.cos(2 * np.pi * k * np.array(reps)[None, :] / order) * mult[None, :]
    try:
        res = lp_solve(order * mult, -cosines, np.full(order, 1.0 / order), free=range(len(reps)))
    except LPError as exc:
        raise RuntimeError(f"theta program for C_{order}{sorted(conn)} failed: {exc}") from exc
    return 1.0 + res.value


@dataclass(frozen=True)
class BoundsReport:
    n: int
    alpha: int
    alpha_star: float
    theta: float
    omega_c: float
    omega_q_upper: float
    omega_ns: float
    witness: tuple[int, ...] = ()

    @property
    def sandwich_ok(self) -> bool:
        return self.alpha <= self.theta + THETA_TOL and self.theta <= self.alpha_star + THETA_TOL

    def csv(self) -> str:
        return (f"{self.n},{self.alpha},{self.theta:.9f},{self.alpha_star:.9f},"
                f"{self.omega_c:.9f},{self.omega_q_upper:.9f},{self.omega_ns:.9f}")


BOUNDS_HEADER = "n,alpha,theta,alpha_star,omega_c,omega_q_upper,omega_ns"


def theta_closed_form(n: int) -> float:
    return n * (1 + math.cos(math.pi / (2 * n)))


def bounds_report(n: int) -> BoundsReport:
    """Compute alpha, theta and alpha* for the odd-cycle exclusivity graph."""
    check_n(n)
    if 4 * n > MAX_VERTICES:
        raise ValueError(f"computed bounds need 4n <= {MAX_VERTICES}; got n={n}")
    g = exclusivity_graph(n)
    iso = verify_is_mobius(g, n)
    if not iso:
        raise RuntimeError(f"exclusivity graph for n={n} is not M_{4 * n}: {iso.reason}")
    alpha, _ = independence_number(g)
    alpha_star = fractional_packing(g)
    ladder = mobius_ladder(4 * n)
    theta = lovasz_theta_circulant(*ladder.circulant)
    report = BoundsReport(n, alpha, alpha_star, theta, alpha / (2 * n), theta / (2 * n), alpha_star / (2 * n),
                          iso.witness)
    if not report.sandwich_ok:
        raise RuntimeError(f"sandwich alpha <= theta <= alpha* violated: {report}")
    if abs(report.omega_q_upper - omega_q(n)) >= THETA_TOL:
        raise RuntimeError(f"theta/2n = {report.omega_q_upper} does not match omega_q({n}) = {omega_q(n)}")
    return report


def closed_form_report(n: int) -> BoundsReport:
    check_n(n)
    theta = theta_closed_form(n)
    return BoundsReport(n, 2 * n - 1, float(2 * n), theta, (2 * n - 1) / (2 * n), theta / (2 * n), 1.0)
