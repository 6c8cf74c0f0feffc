"""Pure-Python/NumPy versions of the compiled kernels in ``_kernels.pyx``.

Signatures and results match the compiled module exactly; the test-suite runs
both against the same oracles.
"""
from __future__ import annotations

import math

import numpy as np


def classical_optimum(n):
    full = (1 << n) - 1
    masks = np.arange(1 << n, dtype=np.int64)
    rot = ((masks << 1) | (masks >> (n - 1))) & full
    a = masks[:, None]
    same = np.bitwise_count(~(a ^ masks[None, :]) & full)
    adjacent = np.bitwise_count((a ^ rot[None, :]) & full)
    total = (same + adjacent).astype(np.int64)
    flat = int(np.argmax(total))
    return int(total.flat[flat]), flat >> n, flat & full


def max_independent_set(adj):
    n = len(adj)
    if n == 0:
        return 0, 0
    order = sorted(range(n), key=lambda v: (bin(adj[v]).count("1"), v))
    pos = {v: i for i, v in enumerate(order)}
    local = []
    for v in order:
        m = 0
        for u in range(n):
            if adj[v] >> u & 1:
                m |= 1 << pos[u]
        local.append(m)
    closed = [local[i] | (1 << i) for i in range(n)]
    best = [0, 0]

    def expand(size, cur, cand):
        seq = []
        rest = cand
        k = 0
        while rest:
            k += 1
            q = rest
            while q:
                v = (q & -q).bit_length() - 1
                q &= local[v]
                rest &= ~(1 << v)
                seq.append((v, k))
        for v, k in reversed(seq):
            if size + k <= best[0]:
                return
            nxt = cand & ~closed[v]
            if nxt:
                expand(size + 1, cur | (1 << v), nxt)
            elif size + 1 > best[0]:
                best[0] = size + 1
                best[1] = cur | (1 << v)
            cand &= ~(1 << v)

    expand(0, 0, (1 << n) - 1)
    witness = 0
    for i in range(n):
        if best[1] >> i & 1:
            witness |= 1 << order[i]
    return best[0], witness


def born_probabilities(rho_re, alpha, beta):
    ca, sa = math.cos(alpha / 2), math.sin(alpha / 2)
    cb, sb = math.cos(beta / 2), math.sin(beta / 2)
    u = np.kron(np.array([[ca, -sa], [sa, ca]]), np.array([[cb, -sb], [sb, cb]]))
    return np.einsum("mp,mq,pq->m", u, u, np.asarray(rho_re, dtype=float))


def pick_outcome(probs, u):
    cum = 0.0
    k = 0
    for j in range(3):
        cum += probs[j]
        if cum <= u:
            k = j + 1
        else:
            break
    return k


def tally_outcomes(gamma, x, y, u, table):
    n = table.shape[1]
    p = table[gamma, x, y]
    cdf = np.cumsum(p[:, :3], axis=1)
    k = (cdf <= u[:, None]).sum(axis=1)
    counts = np.zeros((n, n, 4), dtype=np.int64)
    np.add.at(counts, (x, y, k), 1)
    return counts
