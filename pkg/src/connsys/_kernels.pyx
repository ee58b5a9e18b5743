# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled subset kernels. Tables are int64 arrays indexed by bitmask."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t, uint8_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

cnp.import_array()

BACKEND = "cython"


def local_submodular_ok(const int64_t[:] table, int n):
    """Screen: k(X+a)+k(X+b) >= k(X+a+b)+k(X) for all X and a, b outside X."""
    cdef Py_ssize_t size = 1 << n
    cdef Py_ssize_t x
    cdef int a, b
    cdef int64_t xa, xb
    for x in range(size):
        for a in range(n):
            if x >> a & 1:
                continue
            xa = table[x | (1 << a)]
            for b in range(a + 1, n):
                if x >> b & 1:
                    continue
                xb = table[x | (1 << b)]
                if xa + xb < table[x | (1 << a) | (1 << b)] + table[x]:
                    return False
    return True


def first_submodular_violation(const int64_t[:] table, int n):
    """First violating pair X < Y, pairs ordered by (Y, X)."""
    cdef Py_ssize_t size = 1 << n
    cdef Py_ssize_t x, y
    for y in range(size):
        for x in range(y):
            if (x & y) == x or (x & y) == y:
                continue
            if table[x] + table[y] < table[x & y] + table[x | y]:
                return (x, y)
    return None


def first_posimodular_violation(const int64_t[:] table, int n):
    cdef Py_ssize_t size = 1 << n
    cdef Py_ssize_t x, y
    for y in range(size):
        for x in range(y + 1):
            if table[x] + table[y] < table[x & ~y] + table[y & ~x]:
                return (x, y)
    return None


def bw_dp(const int64_t[:] table, int n):
    """g(X) = max(k(X), min over halves) with the smallest half containing the low bit."""
    cdef Py_ssize_t size = 1 << n
    cdef cnp.ndarray[int64_t, ndim=1] g_arr = np.zeros(size, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] c_arr = np.zeros(size, dtype=np.int64)
    cdef int64_t[:] g = g_arr
    cdef int64_t[:] choice = c_arr
    cdef Py_ssize_t x, a, rest, low, best_a
    cdef int64_t best, v, ga, gb
    for x in range(1, size):
        low = x & (-x)
        if x == low:
            g[x] = table[x]
            continue
        rest = x ^ low
        best = -1
        best_a = 0
        # submasks s of rest, A = s | low, A != x
        a = (rest - 1) & rest
        while True:
            ga = g[a | low]
            gb = g[x ^ (a | low)]
            v = ga if ga > gb else gb
            if best < 0 or v < best or (v == best and (a | low) < best_a):
                best = v
                best_a = a | low
            if a == 0:
                break
            a = (a - 1) & rest
        v = table[x]
        g[x] = v if v > best else best
        choice[x] = best_a
    return g_arr, c_arr


def over_dp(const int64_t[:] table, int n, const uint8_t[:] allowed, int64_t k):
    """Feasibility of a width < k decomposition whose leaves lie in the allowed family.

    choice[X] = 0 marks a leaf, -1 infeasible, otherwise the chosen half.
    """
    cdef Py_ssize_t size = 1 << n
    cdef cnp.ndarray[int64_t, ndim=1] c_arr = np.full(size, -1, dtype=np.int64)
    cdef int64_t[:] choice = c_arr
    cdef Py_ssize_t x, a, rest, low, half
    for x in range(size):
        if table[x] >= k:
            continue
        if allowed[x]:
            choice[x] = 0
            continue
        if x == 0:
            continue
        low = x & (-x)
        if x == low:
            continue
        rest = x ^ low
        a = 0
        while True:
            half = a | low
            if half != x and choice[half] >= 0 and choice[x ^ half] >= 0:
                choice[x] = half
                break
            a = (a - rest) & rest
            if a == 0:
                break
    return c_arr


def well_linked_violation(const int64_t[:] table, int n, Py_ssize_t w):
    cdef Py_ssize_t size = 1 << n
    cdef Py_ssize_t x
    cdef int inside, outside
    for x in range(size):
        inside = _popcount(x & w)
        outside = _popcount(w & ~x)
        if table[x] < (inside if inside < outside else outside):
            return x
    return -1


cdef inline int _popcount(uint64_t v) nogil:
    cdef int c = 0
    while v:
        v &= v - 1
        c += 1
    return c


def sparse_feasible(const int64_t[:] cands, const int64_t[:] leaves):
    """Bottom-up feasibility over a candidate list sorted by popcount.

    A candidate is feasible if it is a leaf or splits into two feasible
    candidates. Small candidates enumerate their submasks; large ones scan
    the feasible sets found so far. Returns the chosen half per candidate
    (0 leaf, -1 none).
    """
    cdef Py_ssize_t m = cands.shape[0]
    cdef cnp.ndarray[int64_t, ndim=1] c_arr = np.full(m, -1, dtype=np.int64)
    cdef int64_t[:] choice = c_arr
    cdef unordered_map[uint64_t, uint8_t] feasible
    cdef vector[uint64_t] flist
    cdef Py_ssize_t i, j
    cdef uint64_t x, low, rest, a, half
    cdef int pc
    for i in range(leaves.shape[0]):
        feasible[<uint64_t>leaves[i]] = 1
        flist.push_back(<uint64_t>leaves[i])
    for i in range(m):
        x = <uint64_t>cands[i]
        if feasible.count(x):
            choice[i] = 0
            continue
        low = x & (~x + 1)
        if x == low:
            continue
        pc = _popcount(x)
        if pc < 63 and (<uint64_t>1 << (pc - 1)) <= <uint64_t>flist.size():
            rest = x ^ low
            a = 0
            while True:
                half = a | low
                if half != x and feasible.count(half) and feasible.count(x ^ half):
                    choice[i] = <int64_t>half
                    break
                a = (a - rest) & rest
                if a == 0:
                    break
        else:
            for j in range(<Py_ssize_t>flist.size()):
                half = flist[j]
                if (half & low) and (half & ~x) == 0 and half != x and feasible.count(x ^ half):
                    choice[i] = <int64_t>half
                    break
        if choice[i] > 0:
            feasible[x] = 1
            flist.push_back(x)
    return c_arr
