"""Pure-Python twins of the compiled kernels (same results, same tie-breaks)."""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def local_submodular_ok(table, n):
    t = np.asarray(table, dtype=np.int64)
    idx = np.arange(1 << n, dtype=np.int64)
    for a in range(n):
        for b in range(a + 1, n):
            free = idx[((idx >> a) & 1) == 0]
            free = free[((free >> b) & 1) == 0]
            lhs = t[free | (1 << a)] + t[free | (1 << b)]
            rhs = t[free | (1 << a) | (1 << b)] + t[free]
            if np.any(lhs < rhs):
                return False
    return True


def first_submodular_violation(table, n):
    t = np.asarray(table, dtype=np.int64)
    idx = np.arange(1 << n, dtype=np.int64)
    for y in range(1 << n):
        xs = idx[:y]
        bad = t[xs] + t[y] < t[xs & y] + t[xs | y]
        if bad.any():
            return (int(xs[np.argmax(bad)]), y)
    return None


def first_posimodular_violation(table, n):
    t = np.asarray(table, dtype=np.int64)
    idx = np.arange(1 << n, dtype=np.int64)
    for y in range(1 << n):
        xs = idx[: y + 1]
        bad = t[xs] + t[y] < t[xs & ~y] + t[y & ~xs]
        if bad.any():
            return (int(xs[np.argmax(bad)]), y)
    return None


def _submasks_ascending(rest):
    a = 0
    while True:
        yield a
        a = (a - rest) & rest
        if a == 0:
            return


def bw_dp(table, n):
    size = 1 << n
    t = [int(v) for v in table]
    g = [0] * size
    choice = [0] * size
    for x in range(1, size):
        low = x & -x
        if x == low:
            g[x] = t[x]
            continue
        rest = x ^ low
        best, best_a = -1, 0
        for a in _submasks_ascending(rest):
            half = a | low
            if half == x:
                continue
            ga, gb = g[half], g[x ^ half]
            v = ga if ga > gb else gb
            if best < 0 or v < best:
                best, best_a = v, half
        g[x] = max(t[x], best)
        choice[x] = best_a
    return np.array(g, dtype=np.int64), np.array(choice, dtype=np.int64)


def over_dp(table, n, allowed, k):
    size = 1 << n
    choice = [-1] * size
    for x in range(size):
        if table[x] >= k:
            continue
        if allowed[x]:
            choice[x] = 0
            continue
        low = x & -x
        if x == 0 or x == low:
            continue
        rest = x ^ low
        for a in _submasks_ascending(rest):
            half = a | low
            if half != x and choice[half] >= 0 and choice[x ^ half] >= 0:
                choice[x] = half
                break
    return np.array(choice, dtype=np.int64)


def well_linked_violation(table, n, w):
    t = np.asarray(table, dtype=np.int64)
    idx = np.arange(1 << n, dtype=np.int64)
    inside = _popcounts(idx & w)
    outside = _popcounts(w & ~idx)
    bad = t < np.minimum(inside, outside)
    if bad.any():
        return int(np.argmax(bad))
    return -1


def _popcounts(arr):
    arr = arr.astype(np.uint64)
    count = np.zeros(arr.shape, dtype=np.int64)
    while arr.any():
        count += (arr & np.uint64(1)).astype(np.int64)
        arr = arr >> np.uint64(1)
    return count


def sparse_feasible(cands, leaves):
    feasible = {int(v) for v in leaves}
    flist = [int(v) for v in leaves]
    out = []
    for x in cands:
        x = int(x)
        if x in feasible:
            out.append(0)
            continue
        low = x & -x
        found = -1
        if x != low:
            if (1 << (x.bit_count() - 1)) <= len(flist):
                for a in _submasks_ascending(x ^ low):
                    half = a | low
                    if half != x and half in feasible and (x ^ half) in feasible:
                        found = half
                        break
            else:
                for half in flist:
                    if half & low and half & ~x == 0 and half != x and (x ^ half) in feasible:
                        found = half
                        break
        if found > 0:
            feasible.add(x)
            flist.append(x)
        out.append(found)
    return np.array(out, dtype=np.int64)
