"""Dense two-phase simplex for small linear programs (maximisation)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LPError(RuntimeError):
    pass


class InfeasibleError(LPError):
    pass


class UnboundedError(LPError):
    pass


@dataclass(frozen=True)
class LPResult:
    value: float
    x: np.ndarray
    iterations: int


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    pivot_row = T[row].copy()
    T -= np.outer(T[:, col], pivot_row)
    T[row] = pivot_row


def _iterate(T, basis, cols, tol, max_iter, bland_after):
    """Pivot until the objective row has no negative reduced cost on ``cols``."""
    degenerate = 0
    iterations = 0
    cols = np.asarray(cols)
    while True:
        reduced = T[-1, cols]
        negative = np.flatnonzero(reduced < -tol)
        if negative.size == 0:
            return iterations
        if iterations >= max_iter:
            raise LPError(f"simplex did not converge in {max_iter} pivots")
        use_bland = degenerate >= bland_after
        col = cols[negative[0]] if use_bland else cols[negative[np.argmin(reduced[negative])]]
        column = T[:-1, col]
        rows = np.flatnonzero(column > tol)
        if rows.size == 0:
            raise UnboundedError("objective is unbounded")
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol]
        row = min(ties, key=lambda r: basis[r])
        degenerate = degenerate + 1 if best <= tol else 0
        _pivot(T, row, col)
        basis[row] = col
        iterations += 1


def lp_solve(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, free=(), *, tol=1e-10,
             max_iter=5000, bland_after=10) -> LPResult:
    """Maximise ``c @ x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``.

    Variables are non-negative except the indices in ``free``. Dantzig's
    rule is used until ``bland_after`` consecutive degenerate pivots, then
    Bland's rule takes over, which cannot cycle.
    """
    c = np.asarray(c, dtype=float)
    nvar = c.size
    A_ub = np.zeros((0, nvar)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    A_eq = np.zeros((0, nvar)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    if A_ub.shape != (b_ub.size, nvar) or A_eq.shape != (b_eq.size, nvar):
        raise ValueError("constraint matrices do not match the objective length")

    free = sorted(set(free))
    # x_j = x_j^+ - x_j^- for free variables
    split = np.zeros((nvar, len(free)))
    for k, j in enumerate(free):
        split[j, k] = -1.0
    cs = np.concatenate([c, c @ split])
    Aub = np.hstack([A_ub, A_ub @ split])
    Aeq = np.hstack([A_eq, A_eq @ split])
    ns = cs.size

    m_ub, m_eq = Aub.shape[0], Aeq.shape[0]
    m = m_ub + m_eq
    flip_ub = b_ub < 0
    n_art = int(flip_ub.sum()) + m_eq
    ncols = ns + m_ub + n_art
    T = np.zeros((m + 1, ncols + 1))
    basis = [0] * m
    art = ns + m_ub
    for i in range(m_ub):
        sign = -1.0 if flip_ub[i] else 1.0
        T[i, :ns] = sign * Aub[i]
        T[i, ns + i] = sign
        T[i, -1] = sign * b_ub[i]
        if flip_ub[i]:
            T[i, art] = 1.0
            basis[i] = art
            art += 1
        else:
            basis[i] = ns + i
    for k in range(m_eq):
        i = m_ub + k
        sign = -1.0 if b_eq[k] < 0 else 1.0
        T[i, :ns] = sign * Aeq[k]
        T[i, -1] = sign * b_eq[k]
        T[i, art] = 1.0
        basis[i] = art
        art += 1

    iterations = 0
    art_cols = range(ns + m_ub, ncols)
    if n_art:
        T[-1, ns + m_ub:ncols] = 1.0
        for i, b in enumerate(basis):
            if b >= ns + m_ub:
                T[-1] -= T[i]
        iterations += _iterate(T, basis, np.arange(ncols), tol, max_iter, bland_after)
        scale = max(1.0, float(np.abs(T[:-1, -1]).max(initial=0.0)))
        if T[-1, -1] < -1e-9 * scale:
            raise InfeasibleError("constraints are infeasible")
        keep = []
        for i, b in enumerate(basis):
            if b in art_cols:
                candidates = np.flatnonzero(np.abs(T[i, :ns + m_ub]) > 1e-9)
                if candidates.size == 0:
                    continue  # redundant equality
                _pivot(T, i, int(candidates[0]))
                basis[i] = int(candidates[0])
            keep.append(i)
        T = np.vstack([T[keep], T[-1:]])
        basis = [basis[i] for i in keep]
        T = np.delete(T, list(art_cols), axis=1)

    T[-1] = 0.0
    T[-1, :ns] = -cs
    for i, b in enumerate(basis):
        if T[-1, b] != 0.0:
            T[-1] -= T[-1, b] * T[i]
    iterations += _iterate(T, basis, np.arange(ns + m_ub), tol, max_iter, bland_after)

    xs = np.zeros(T.shape[1] - 1)
    for i, b in enumerate(basis):
        xs[b] = T[i, -1]
    x = xs[:nvar].copy()
    for k, j in enumerate(free):
        x[j] -= xs[nvar + k]
    return LPResult(float(c @ x), x, iterations)
