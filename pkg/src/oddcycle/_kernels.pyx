# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. ``_fallback`` holds the reference Python versions."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


def classical_optimum(int n):
    cdef uint64_t full = (<uint64_t>1 << n) - 1
    cdef uint64_t a, b, rot
    cdef int total, best = -1
    cdef uint64_t best_a = 0, best_b = 0
    for a in range(<uint64_t>1 << n):
        for b in range(<uint64_t>1 << n):
            rot = ((b << 1) | (b >> (n - 1))) & full
            total = __builtin_popcountll(~(a ^ b) & full) + __builtin_popcountll((a ^ rot) & full)
            if total > best:
                best = total
                best_a = a
                best_b = b
    return best, best_a, best_b


cdef struct MisState:
    uint64_t local[64]
    uint64_t closed[64]
    int best
    uint64_t best_set


cdef void _expand(MisState* st, int size, uint64_t cur, uint64_t cand) noexcept nogil:
    cdef int seq_v[64]
    cdef int seq_k[64]
    cdef int count = 0, k = 0, i, v
    cdef uint64_t rest = cand, q, nxt
    while rest:
        k += 1
        q = rest
        while q:
            v = __builtin_ctzll(q)
            q &= st.local[v]
            rest &= ~(<uint64_t>1 << v)
            seq_v[count] = v
            seq_k[count] = k
            count += 1
    for i in range(count - 1, -1, -1):
        v = seq_v[i]
        if size + seq_k[i] <= st.best:
            return
        nxt = cand & ~st.closed[v]
        if nxt:
            _expand(st, size + 1, cur | (<uint64_t>1 << v), nxt)
        elif size + 1 > st.best:
            st.best = size + 1
            st.best_set = cur | (<uint64_t>1 << v)
        cand &= ~(<uint64_t>1 << v)


def max_independent_set(adj):
    cdef int n = len(adj)
    cdef MisState st
    cdef int i
    if n == 0:
        return 0, 0
    if n > 64:
        raise ValueError("compiled independent-set kernel supports at most 64 vertices")
    order = sorted(range(n), key=lambda v: (bin(adj[v]).count("1"), v))
    pos = {v: i for i, v in enumerate(order)}
    for i in range(n):
        m = 0
        av = adj[order[i]]
        for u in range(n):
            if av >> u & 1:
                m |= 1 << pos[u]
        st.local[i] = <uint64_t>m
        st.closed[i] = st.local[i] | (<uint64_t>1 << i)
    st.best = 0
    st.best_set = 0
    full = (<uint64_t>1 << n) - 1 if n < 64 else <uint64_t>0xFFFFFFFFFFFFFFFF
    with nogil:
        _expand(&st, 0, 0, full)
    witness = 0
    for i in range(n):
        if (st.best_set >> i) & 1:
            witness |= 1 << order[i]
    return st.best, witness


def born_probabilities(double[:, ::1] rho_re, double alpha, double beta):
    cdef double ra[2][2]
    cdef double rb[2][2]
    cdef double u[4][4]
    cdef double acc
    cdef int m, p, q
    ra[0][0] = cos(alpha / 2); ra[0][1] = -sin(alpha / 2)
    ra[1][0] = sin(alpha / 2); ra[1][1] = cos(alpha / 2)
    rb[0][0] = cos(beta / 2); rb[0][1] = -sin(beta / 2)
    rb[1][0] = sin(beta / 2); rb[1][1] = cos(beta / 2)
    for m in range(4):
        for p in range(4):
            u[m][p] = ra[m >> 1][p >> 1] * rb[m & 1][p & 1]
    out = np.empty(4)
    cdef double[::1] o = out
    for m in range(4):
        acc = 0.0
        for p in range(4):
            for q in range(4):
                acc += u[m][p] * u[m][q] * rho_re[p, q]
        o[m] = acc
    return out


def pick_outcome(probs, double u):
    cdef double cum = 0.0
    cdef int j, k = 0
    for j in range(3):
        cum += probs[j]
        if cum <= u:
            k = j + 1
        else:
            break
    return k


def tally_outcomes(int64_t[::1] gamma, int64_t[::1] x, int64_t[::1] y,
                   double[::1] u, double[:, :, :, ::1] table):
    cdef Py_ssize_t r, rounds = u.shape[0]
    cdef int n = table.shape[1]
    cdef int j, k
    cdef double cum
    counts = np.zeros((n, n, 4), dtype=np.int64)
    cdef int64_t[:, :, ::1] c = counts
    with nogil:
        for r in range(rounds):
            cum = 0.0
            k = 0
            for j in range(3):
                cum = cum + table[gamma[r], x[r], y[r], j]
                if cum <= u[r]:
                    k = j + 1
                else:
                    break
            c[x[r], y[r], k] += 1
    return counts
