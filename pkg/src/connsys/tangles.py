"""Tangles: verification, enumeration, separations, covers, linkedness and graph tangles."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from . import bits
from ._backend import kernels
from .core import LIMITS, ConnectivitySystem, require
from .errors import InternalInconsistency, PreconditionError
from .instances import Graph


class Check(NamedTuple):
    """Verdict of an exhaustive check; falsy when it fails."""

    ok: bool
    clause: Optional[str] = None
    witness: tuple = ()

    def __bool__(self):
        return self.ok


_OK = Check(True)


class Tangle:
    """A family of big sides with an explicit order; the order is part of identity."""

    __slots__ = ("order", "members", "provenance", "_sorted")

    def __init__(self, order: int, members: Iterable[int], provenance: str = ""):
        if order < 0:
            raise PreconditionError("tangle order must be nonnegative")
        self.order = int(order)
        self.members = frozenset(int(x) for x in members)
        self.provenance = provenance
        self._sorted = None

    def sorted_members(self) -> list[int]:
        if self._sorted is None:
            self._sorted = sorted(self.members)
        return self._sorted

    def key(self) -> tuple:
        return (self.order, tuple(self.sorted_members()))

    def __contains__(self, x) -> bool:
        return int(x) in self.members

    def __len__(self):
        return len(self.members)

    def __eq__(self, other):
        return isinstance(other, Tangle) and self.order == other.order and self.members == other.members

    def __hash__(self):
        return hash((self.order, self.members))

    def minimal_members(self) -> list[int]:
        return minimal_sets(self.members)

    def __repr__(self):
        return f"Tangle(order={self.order}, members={len(self.members)})"


def minimal_sets(family: Iterable[int]) -> list[int]:
    """Inclusion-minimal sets of a family, ascending."""
    kept: list[int] = []
    for x in sorted(set(family), key=lambda v: (bits.popcount(v), v)):
        if not any(m & ~x == 0 for m in kept):
            kept.append(x)
    return sorted(kept)


# ---------------------------------------------------------------- verification


def _first_empty_triple(mins: Sequence[int]) -> Optional[tuple]:
    """Three sets (repetition allowed) with empty intersection, or None."""
    if not mins:
        return None
    arr = np.array(mins, dtype=np.int64)
    for i, a in enumerate(mins):
        inter = a & arr[i:]
        hit = (inter[:, None] & arr[None, :]) == 0
        if hit.any():
            j, l = np.argwhere(hit)[0]
            return (a, int(arr[i + j]), int(arr[l]))
    return None


def is_tangle(sys: ConnectivitySystem, t: Tangle) -> Check:
    """Check T0-T3 exhaustively; the witness names the violating sets."""
    k, full = t.order, sys.full
    for x in t.sorted_members():
        if x < 0 or x & ~full:
            return Check(False, "universe", (x,))
        if sys.evaluate(x) >= k:
            return Check(False, "T0", (x,))
    for x in sys.separations_below(k):
        x = int(x)
        if x not in t.members and (full ^ x) not in t.members:
            return Check(False, "T1", (x,))
    triple = _first_empty_triple(t.minimal_members())
    if triple is not None:
        return Check(False, "T2", triple)
    for x in t.sorted_members():
        if bits.popcount(x) == 1:
            return Check(False, "T3", (x,))
    return _OK


# ---------------------------------------------------------------- enumeration


class _Node:
    """Search state: members so far, minimal members and minimal pairwise intersections."""

    __slots__ = ("members", "mins", "ints", "status", "inf_a", "inf_b")

    def __init__(self, members, mins, ints, status=None, inf_a=None, inf_b=None):
        self.members = members
        self.mins = mins
        self.ints = ints
        self.status = status
        self.inf_a = inf_a
        self.inf_b = inf_b

    def copy(self) -> "_Node":
        return _Node(list(self.members), list(self.mins), list(self.ints),
                     self.status.copy(), self.inf_a.copy(), self.inf_b.copy())

    def add(self, y: int) -> list[int]:
        """Add a member; return the new pairwise intersections it creates."""
        self.members.append(y)
        if any(m & ~y == 0 for m in self.mins):
            return []
        cand = [y] + [y & m for m in self.mins]
        self.mins = [m for m in self.mins if y & ~m] + [y]
        cand = sorted(set(cand), key=lambda v: (bits.popcount(v), v))
        if self.ints:
            old = np.array(self.ints, dtype=np.int64)
            arr = np.array(cand, dtype=np.int64)
            hit = np.zeros(len(arr), dtype=bool)
            for lo in range(0, len(old), 512):
                hit |= ((old[None, lo: lo + 512] & ~arr[:, None]) == 0).any(axis=1)
            cand = [c for c, h in zip(cand, hit) if not h]
        fresh: list[int] = []
        for c in cand:
            if not any(i & ~c == 0 for i in fresh):
                fresh.append(c)
        self.ints.extend(fresh)
        return fresh


def _mark(node: _Node, a: np.ndarray, b: np.ndarray, fresh: Sequence[int]) -> None:
    if not len(fresh):
        return
    f = np.asarray(fresh, dtype=np.int64)
    for lo in range(0, len(f), 256):
        chunk = f[lo: lo + 256]
        node.inf_a |= ((a[:, None] & chunk[None, :]) == 0).any(axis=1)
        node.inf_b |= ((b[:, None] & chunk[None, :]) == 0).any(axis=1)


def _propagate(node: _Node, a: np.ndarray, b: np.ndarray) -> bool:
    """Apply forced orientations until a fixpoint; False on contradiction."""
    while True:
        und = node.status == 0
        if (und & node.inf_a & node.inf_b).any():
            return False
        force_b = und & node.inf_a
        force_a = und & node.inf_b & ~node.inf_a
        idx = np.nonzero(force_a | force_b)[0]
        if not len(idx):
            return True
        fresh: list[int] = []
        for i in idx:
            side = int(b[i]) if force_b[i] else int(a[i])
            if any(f & side == 0 for f in fresh):
                return False
            node.status[i] = 2 if force_b[i] else 1
            fresh.extend(node.add(side))
        _mark(node, a, b, fresh)


def _extend(base: _Node, a: np.ndarray, full: int) -> list[_Node]:
    """All ways to orient the new pairs {A, complement A} consistently with ``base``."""
    b = full ^ a
    root = _Node(list(base.members), list(base.mins), list(base.ints))
    root.status = np.zeros(len(a), dtype=np.int8)
    root.inf_a = (a == 0) | (bits.popcount_array(a) == 1)
    root.inf_b = (b == 0) | (bits.popcount_array(b) == 1)
    _mark(root, a, b, root.ints)
    out = []
    stack = [root] if _propagate(root, a, b) else []
    while stack:
        node = stack.pop()
        und = np.nonzero(node.status == 0)[0]
        if not len(und):
            out.append(node)
            continue
        i = und[0]
        branches = []
        for code, side, bad in ((1, a[i], node.inf_a[i]), (2, b[i], node.inf_b[i])):
            if bad:
                continue
            child = node.copy()
            child.status[i] = code
            _mark(child, a, b, child.add(int(side)))
            if _propagate(child, a, b):
                branches.append(child)
        stack.extend(reversed(branches))
    return out


def _new_pairs(sys: ConnectivitySystem, j: int) -> np.ndarray:
    """Representatives min(X, complement) of the pairs of order exactly j-1."""
    full = sys.full
    cur = sys.separations_below(j)
    prev = sys.separations_below(j - 1) if j >= 1 else np.zeros(0, dtype=np.int64)
    new = np.setdiff1d(cur, prev, assume_unique=True)
    return np.unique(np.minimum(new, full ^ new))


def tangle_levels(sys: ConnectivitySystem, k: int) -> list[list[Tangle]]:
    """Tangles of every order 0..k, each level sorted canonically."""
    if not sys.has_enumerator:
        require("enumerate_tangles", sys.n, "enumerate")
    levels = sys.memo.setdefault("tangle_levels", [[_Node([], [], [])]])
    full = sys.full
    while len(levels) <= k:
        j = len(levels)
        prev = levels[-1]
        nxt: list[_Node] = []
        if prev:
            pairs = _new_pairs(sys, j)
            for node in prev:
                nxt.extend(_extend(node, pairs, full))
        nxt.sort(key=lambda nd: sorted(nd.members))
        for nd in nxt:
            nd.status = nd.inf_a = nd.inf_b = None
        levels.append(nxt)
    return [[Tangle(j, nd.members, "enumeration") for nd in level] for j, level in enumerate(levels[: k + 1])]


def enumerate_tangles(sys: ConnectivitySystem, k: int) -> list[Tangle]:
    """All tangles of order exactly k, sorted by their member lists."""
    if k < 0:
        raise PreconditionError("order must be nonnegative")
    return tangle_levels(sys, k)[k]


def maximal_tangles(sys: ConnectivitySystem, k_max: int) -> list[Tangle]:
    """Tangles of order at most k_max without an extension of order at most k_max + 1."""
    levels = tangle_levels(sys, k_max + 1)
    out = []
    for j in range(k_max + 1):
        ups = levels[j + 1]
        for t in levels[j]:
            if not any(t.members <= u.members for u in ups):
                out.append(t)
    return out


# ---------------------------------------------------------------- truncation and separations


def truncate(sys: ConnectivitySystem, t: Tangle, j: int) -> Tangle:
    if j < 0:
        raise PreconditionError("order must be nonnegative")
    if j > t.order:
        raise PreconditionError(f"cannot truncate order {t.order} to {j}")
    return Tangle(j, (x for x in t.members if sys.evaluate(x) < j), "truncation")


def is_extension(t: Tangle, s: Tangle) -> bool:
    """True when t extends s (s is a truncation of t)."""
    return s.order <= t.order and s.members <= t.members


def incomparable(t: Tangle, s: Tangle) -> bool:
    return not is_extension(t, s) and not is_extension(s, t)


def tangle_separations(sys: ConnectivitySystem, t: Tangle, s: Tangle) -> list[int]:
    """All (t, s)-separations: X in t with complement in s."""
    full = sys.full
    return sorted(x for x in t.members if (full ^ x) in s.members)


def min_tangle_separations(sys: ConnectivitySystem, t: Tangle, s: Tangle) -> tuple[int, list[int]]:
    seps = tangle_separations(sys, t, s)
    if not seps:
        raise PreconditionError("tangles are comparable; no separation exists")
    best = min(sys.evaluate(x) for x in seps)
    return best, [x for x in seps if sys.evaluate(x) == best]


def leftmost_min_tangle_separation(sys: ConnectivitySystem, t: Tangle, s: Tangle) -> int:
    """The minimum (t, s)-separation contained in all others."""
    _, mins = min_tangle_separations(sys, t, s)
    x = min(mins, key=lambda v: (bits.popcount(v), v))
    for other in mins:
        if x & ~other:
            raise InternalInconsistency("minimum-cardinality separation is not leftmost")
    return x


# ---------------------------------------------------------------- covers


def _by_order_size_mask(sys: ConnectivitySystem, members: Sequence[int]) -> list[int]:
    return sorted(members, key=lambda x: (sys.evaluate(x), bits.popcount(x), x))


def greedy_cover(sys: ConnectivitySystem, t: Tangle) -> int:
    """Cover of size at most ord(t), built one order level at a time."""
    ordered = _by_order_size_mask(sys, t.members)
    s = 0
    for i in range(t.order):
        x = next((y for y in ordered if y & s == 0), None)
        if x is None or sys.evaluate(x) >= i + 1:
            continue
        if sys.evaluate(x) != i:
            raise InternalInconsistency("greedy cover invariant broken")
        s |= x & -x
    if any(x & s == 0 for x in t.members):
        raise InternalInconsistency("greedy cover misses a member")
    return s


def _masks_by_popcount(n: int) -> list[np.ndarray]:
    allm = np.arange(1 << n, dtype=np.int64)
    pc = bits.popcount_array(allm)
    return [allm[pc == c] for c in range(n + 1)]


def minimum_cover(sys: ConnectivitySystem, t: Tangle) -> int:
    """Smallest cover; among equal sizes the smallest bitmask."""
    require("minimum_cover", sys.n, "cover")
    mins = np.array(t.minimal_members(), dtype=np.int64)
    if not len(mins):
        return 0
    for cands in _masks_by_popcount(sys.n):
        for lo in range(0, len(cands), 4096):
            chunk = cands[lo: lo + 4096]
            ok = ((chunk[:, None] & mins[None, :]) != 0).all(axis=1)
            if ok.any():
                return int(chunk[np.argmax(ok)])
    raise InternalInconsistency("no cover found")


def is_cover(t: Tangle, s: int) -> bool:
    return all(x & s for x in t.members)


# ---------------------------------------------------------------- well-linked, free and linked sets


def is_well_linked(sys: ConnectivitySystem, w: int) -> Check:
    """kappa(X) >= min(|W & X|, |W - X|) for all X."""
    require("is_well_linked", sys.n, "exhaustive")
    if w & ~sys.full:
        raise PreconditionError("W leaves the universe")
    table = np.ascontiguousarray(sys.table(), dtype=np.int64)
    x = int(kernels.well_linked_violation(table, sys.n, int(w)))
    return _OK if x < 0 else Check(False, "well-linked", (x,))


def well_linked_sets(sys: ConnectivitySystem, min_size: int = 0) -> list[int]:
    """All well-linked sets of at least ``min_size`` elements, ascending."""
    require("well_linked_sets", sys.n, "linked")
    table = np.ascontiguousarray(sys.table(), dtype=np.int64)
    return [w for w in range(sys.full + 1)
            if bits.popcount(w) >= min_size and kernels.well_linked_violation(table, sys.n, w) < 0]


def _local_masks(idx: Sequence[int]) -> np.ndarray:
    local = np.arange(1 << len(idx), dtype=np.int64)
    actual = np.zeros_like(local)
    for j, i in enumerate(idx):
        actual |= ((local >> j) & 1) << i
    return actual


def _pi_table(sys: ConnectivitySystem, x: int) -> tuple[list[int], np.ndarray]:
    """pi_X over all subsets of X, indexed by compressed subset."""
    idx = bits.indices(x)
    pi = np.array(sys.values(_local_masks(idx)), dtype=np.int64)
    for j in range(len(idx)):
        view = pi.reshape(-1, 2, 1 << j)
        np.minimum(view[:, 0, :], view[:, 1, :], out=view[:, 0, :])
    return idx, pi


def _compress(y: int, idx: Sequence[int]) -> int:
    return bits.from_indices(j for j, i in enumerate(idx) if y >> i & 1)


def pi_X(sys: ConnectivitySystem, x: int, y: int) -> int:
    """min kappa(Y') over Y <= Y' <= X."""
    if y & ~x:
        raise PreconditionError("Y must be a subset of X")
    require("pi_X", bits.popcount(x & ~y), "exhaustive")
    return int(sys.values(y | bits.submask_array(x & ~y)).min())


def is_free(sys: ConnectivitySystem, x: int, y: int) -> bool:
    """|Y'| <= pi_X(Y') for all Y' <= Y."""
    if y & ~x:
        raise PreconditionError("Y must be a subset of X")
    require("is_free", bits.popcount(x), "exhaustive")
    idx, pi = _pi_table(sys, x)
    cy = _compress(y, idx)
    local = np.arange(len(pi), dtype=np.int64)
    sel = (local & ~cy) == 0
    return bool((bits.popcount_array(local[sel]) <= pi[sel]).all())


def max_free_set(sys: ConnectivitySystem, x: int) -> int:
    """Maximal free subset of X, grown by ascending element index."""
    require("max_free_set", bits.popcount(x), "exhaustive")
    idx, pi = _pi_table(sys, x)
    local = np.arange(len(pi), dtype=np.int64)
    pc = bits.popcount_array(local)
    cy = 0
    for j in range(len(idx)):
        cand = cy | (1 << j)
        sel = ((local & ~cand) == 0) & ((local >> j) & 1 == 1)
        if (pc[sel] <= pi[sel]).all():
            cy = cand
    y = bits.from_indices(idx[j] for j in bits.iter_bits(cy))
    kx = sys.evaluate(x)
    if int(pi[cy]) != kx or bits.popcount(y) * sys.valence() < kx:
        raise InternalInconsistency("maximal free set misses the rank bound")
    return y


def is_k_linked(sys: ConnectivitySystem, v: int, k: int) -> Check:
    """|V| >= 2k and no separation of order < |Y| between equal-size Y, Z <= V, |Y| <= k.

    Such a separation exists exactly when some X has
    kappa(X) < min(|V & X|, |V - X|, k).
    """
    require("is_k_linked", sys.n, "linked")
    if bits.popcount(v) < 2 * k:
        return Check(False, "size", ())
    t = sys.table()
    idx = np.arange(1 << sys.n, dtype=np.int64)
    cap = np.minimum(np.minimum(bits.popcount_array(idx & v), bits.popcount_array(v & ~idx)), k)
    bad = np.nonzero(t < cap)[0]
    return _OK if not len(bad) else Check(False, "linked", (int(bad[0]),))


def tangle_from_well_linked(sys: ConnectivitySystem, w: int) -> Tangle:
    """T_W: sets of order < |W|/3 holding more than two thirds of W."""
    size = bits.popcount(w)
    if size < 2:
        raise PreconditionError("W needs at least two elements")
    check = is_well_linked(sys, w)
    if not check:
        raise PreconditionError(f"W is not well-linked (witness {check.witness})")
    order = -(-size // 3)
    members = [int(x) for x in sys.separations_below(order) if 3 * bits.popcount(int(x) & w) > 2 * size]
    return Tangle(order, members, "well-linked")


# ---------------------------------------------------------------- graph tangles


class GSeparation(NamedTuple):
    """Separation (A, B) of a graph: vertex sets and the edge bipartition."""

    va: int
    vb: int
    ea: int
    eb: int

    @property
    def order(self) -> int:
        return bits.popcount(self.va & self.vb)

    def swapped(self) -> "GSeparation":
        return GSeparation(self.vb, self.va, self.eb, self.ea)


def _edge_vertex_table(g: Graph) -> list[int]:
    out = [0] * (1 << g.m)
    for y in range(1, 1 << g.m):
        low = y & -y
        u, v = g.edges[low.bit_length() - 1]
        out[y] = out[y ^ low] | (1 << u) | (1 << v)
    return out


def graph_separations(g: Graph, k: int) -> list[GSeparation]:
    """All separations of order less than k."""
    require("graph_separations", g.m, "exhaustive")
    allv, alle = (1 << g.n) - 1, (1 << g.m) - 1
    ev = _edge_vertex_table(g)
    out = []
    for ea in range(1 << g.m):
        eb = alle ^ ea
        va0, vb0 = ev[ea], ev[eb]
        both = va0 & vb0
        budget = k - 1 - bits.popcount(both)
        if budget < 0:
            continue
        only_a = bits.indices(va0 & ~vb0)
        only_b = bits.indices(vb0 & ~va0)
        free = bits.indices(allv & ~(va0 | vb0))
        # each free vertex goes to A, to B, or to both (costing one)
        for choice in itertools.product((0, 1, 2), repeat=len(free)):
            va, vb = va0, vb0
            cost = 0
            for v, c in zip(free, choice):
                if c == 0:
                    va |= 1 << v
                elif c == 1:
                    vb |= 1 << v
                else:
                    va |= 1 << v
                    vb |= 1 << v
                    cost += 1
            if cost > budget:
                continue
            movable = only_a + only_b
            for r in range(0, min(budget - cost, len(movable)) + 1):
                for extra in itertools.combinations(movable, r):
                    xa, xb = va, vb
                    for v in extra:
                        if va0 >> v & 1:
                            xb |= 1 << v
                        else:
                            xa |= 1 << v
                    out.append(GSeparation(xa, xb, ea, eb))
    return out


class GTangle:
    """Family of graph separations (A, B) with an explicit order."""

    __slots__ = ("order", "seps")

    def __init__(self, order: int, seps: Iterable[GSeparation]):
        self.order = int(order)
        self.seps = frozenset(GSeparation(*s) for s in seps)

    def __contains__(self, s) -> bool:
        return GSeparation(*s) in self.seps

    def __len__(self):
        return len(self.seps)

    def __eq__(self, other):
        return isinstance(other, GTangle) and self.order == other.order and self.seps == other.seps

    def __hash__(self):
        return hash((self.order, self.seps))

    def __repr__(self):
        return f"GTangle(order={self.order}, separations={len(self.seps)})"


def is_g_tangle(g: Graph, s: GTangle) -> Check:
    allv, alle = (1 << g.n) - 1, (1 << g.m) - 1
    k = s.order
    for sep in s.seps:
        if sep.va | sep.vb != allv or sep.ea | sep.eb != alle or sep.ea & sep.eb:
            return Check(False, "separation", (sep,))
        if g.edge_vertex_mask(sep.ea) & ~sep.va or g.edge_vertex_mask(sep.eb) & ~sep.vb:
            return Check(False, "separation", (sep,))
        if sep.order >= k:
            return Check(False, "GT0", (sep,))
    for sep in graph_separations(g, k):
        if sep not in s.seps and sep.swapped() not in s.seps:
            return Check(False, "GT1", (sep,))
    # A-sides: only inclusion-maximal ones can complete a covering triple
    shift = g.m
    keys = {(sep.va << shift) | sep.ea: sep for sep in s.seps}
    whole = (allv << shift) | alle
    comps = minimal_sets(whole ^ key for key in keys)
    triple = _first_empty_triple(comps)
    if triple is not None:
        return Check(False, "GT2", tuple(keys[whole ^ c] for c in triple))
    for sep in sorted(s.seps):
        if sep.va == allv:
            return Check(False, "GT3", (sep,))
    return _OK


def g_tangle_from_kappa(g: Graph, t: Tangle) -> GTangle:
    """S = {(A, B) of order < k with E(B) in T}."""
    from .instances import vertex_connectivity

    check = is_tangle(vertex_connectivity(g), t)
    if not check:
        raise PreconditionError(f"not a kappa_G-tangle ({check.clause})")
    out = GTangle(t.order, (s for s in graph_separations(g, t.order) if s.eb in t.members))
    check = is_g_tangle(g, out)
    if not check:
        raise InternalInconsistency(f"derived G-tangle violates {check.clause}")
    return out


class GraphTangleResult(NamedTuple):
    tangle: Optional[Tangle]
    case: Optional[str] = None
    element: Optional[int] = None


def _exceptional_case(g: Graph, s: GTangle) -> Optional[tuple[str, int]]:
    k = s.order
    if k == 1:
        zero = graph_separations(g, 1)
        for v in range(g.n):
            if not g.adj[v]:
                fam = {x for x in zero if x.vb >> v & 1 and not x.va >> v & 1}
                if fam == s.seps:
                    return "i", v
        for j, (u, v) in enumerate(g.edges):
            if g.degree(u) == 1 and g.degree(v) == 1:
                fam = {x for x in zero if x.eb >> j & 1}
                if fam == s.seps:
                    return "ii", j
    if k == 2:
        low = graph_separations(g, 2)
        for j, (u, v) in enumerate(g.edges):
            if g.degree(u) == 1 or g.degree(v) == 1:
                fam = {x for x in low if x.eb >> j & 1}
                if fam == s.seps:
                    return "iii", j
    return None


def kappa_tangle_from_g(g: Graph, s: GTangle) -> GraphTangleResult:
    """T = {E(B) : (A, B) in S}, or the exceptional case that prevents it."""
    from .instances import vertex_connectivity

    check = is_g_tangle(g, s)
    if not check:
        raise PreconditionError(f"not a G-tangle ({check.clause})")
    exc = _exceptional_case(g, s)
    if exc is not None:
        return GraphTangleResult(None, exc[0], exc[1])
    t = Tangle(s.order, (sep.eb for sep in s.seps), "graph-tangle")
    check = is_tangle(vertex_connectivity(g), t)
    if not check:
        raise InternalInconsistency(f"edge sets of the G-tangle violate {check.clause}")
    return GraphTangleResult(t)


def enumerate_g_tangles(g: Graph, k: int) -> list[GTangle]:
    """All G-tangles of order k.

    A G-tangle picks one component C_S of G - S for every |S| < k, with
    C_S' inside C_S whenever S is inside S'. We backtrack over those
    choices and keep the candidates that pass the axioms.
    """
    if k < 0:
        raise PreconditionError("order must be nonnegative")
    seps = graph_separations(g, k)
    allv = (1 << g.n) - 1
    keys = [bits.from_indices(c) for size in range(min(k, g.n + 1)) for c in itertools.combinations(range(g.n), size)]
    options = [g.components(allv & ~s) for s in keys]
    if any(not o for o in options):
        return []
    out = []
    pick: dict[int, int] = {}

    def extend(i: int) -> None:
        if i == len(keys):
            cand = GTangle(k, (x for x in seps if not pick[x.va & x.vb] & ~(x.vb & ~x.va)))
            if is_g_tangle(g, cand):
                out.append(cand)
            return
        s = keys[i]
        for c in options[i]:
            # every smaller separator must already have chosen a superset of c
            if all(pick[s & ~(1 << v)] & c == c for v in bits.iter_bits(s)):
                pick[s] = c
                extend(i + 1)
        pick.pop(s, None)

    extend(0)
    return sorted(out, key=lambda t: sorted(t.seps))


def g_tangle_of_edge(g: Graph, j: int) -> GTangle:
    """T_e: separations of order < 2 with e on the B side."""
    return GTangle(2, (s for s in graph_separations(g, 2) if s.eb >> j & 1))


# ---------------------------------------------------------------- touching families


class TouchingFamily:
    """Connected subgraphs given by their vertex sets."""

    __slots__ = ("members",)

    def __init__(self, members: Iterable[int]):
        self.members = tuple(sorted(set(int(m) for m in members)))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __eq__(self, other):
        return isinstance(other, TouchingFamily) and self.members == other.members

    def __repr__(self):
        return f"TouchingFamily({len(self.members)} subgraphs)"


def _touch(g: Graph, hs: Sequence[int]) -> bool:
    common = (1 << g.n) - 1
    for h in hs:
        common &= h
    if common:
        return True
    return any(all(h >> u & 1 or h >> v & 1 for h in hs) for u, v in g.edges)


def touches_triplewise(g: Graph, fam: TouchingFamily) -> Check:
    for triple in itertools.combinations_with_replacement(fam.members, 3):
        if not _touch(g, triple):
            return Check(False, "touch", triple)
    return _OK


def min_vertex_cover_size(g: Graph, fam: TouchingFamily) -> int:
    """Smallest |S| meeting every member (exhaustive)."""
    if not fam.members:
        return 0
    for size in range(g.n + 1):
        for combo in itertools.combinations(range(g.n), size):
            s = bits.from_indices(combo)
            if all(h & s for h in fam.members):
                return size
    return g.n + 1  # an empty member cannot be hit


def g_tangle_from_touching(g: Graph, fam: TouchingFamily, k: int) -> GTangle:
    """Separations of order < k with some member inside B - V(A)."""
    for h in fam.members:
        if not h or len(g.components(h)) != 1:
            raise PreconditionError("members must be nonempty and connected", )
    check = touches_triplewise(g, fam)
    if not check:
        raise PreconditionError(f"family does not touch triplewise: {check.witness}")
    if min_vertex_cover_size(g, fam) < k:
        raise PreconditionError("family has a vertex cover smaller than k")
    out = GTangle(k, (s for s in graph_separations(g, k)
                      if any(h & ~(s.vb & ~s.va) == 0 for h in fam.members)))
    check = is_g_tangle(g, out)
    if not check:
        raise InternalInconsistency(f"touching family gives no G-tangle ({check.clause})")
    return out


def _component_separation(g: Graph, s: int, comps: Sequence[int], chosen: Sequence[int]) -> GSeparation:
    alle = (1 << g.m) - 1
    cb = 0
    for i in chosen:
        cb |= comps[i]
    eb = 0
    for v in bits.iter_bits(cb):
        eb |= g.inc[v]
    rest = ((1 << g.n) - 1) & ~cb & ~s
    return GSeparation(s | rest, s | cb, alle ^ eb, eb)


def component_of(g: Graph, t: GTangle, s: int) -> int:
    """C_S: the component of G - S that the tangle points to (interval halving)."""
    comps = g.components(((1 << g.n) - 1) & ~s)
    if not comps:
        raise PreconditionError("G - S is empty")
    hits = [i for i in range(len(comps)) if _component_separation(g, s, comps, [i]) in t.seps]
    if len(hits) != 1:
        raise InternalInconsistency(f"{len(hits)} components receive all orientations")
    chosen = list(range(len(comps)))
    if _component_separation(g, s, comps, chosen) not in t.seps:
        raise InternalInconsistency("the trivial component separation is not in the tangle")
    while len(chosen) > 1:
        half, other = chosen[: len(chosen) // 2], chosen[len(chosen) // 2:]
        if _component_separation(g, s, comps, half) in t.seps:
            chosen = half
        elif _component_separation(g, s, comps, other) in t.seps:
            chosen = other
        else:
            raise InternalInconsistency("interval halving lost the tangle")
    if chosen[0] != hits[0]:
        raise InternalInconsistency("halving and direct search disagree")
    return comps[chosen[0]]


def touching_from_g_tangle(g: Graph, t: GTangle) -> TouchingFamily:
    """{C_S : |S| < k}: triplewise touching, no vertex cover smaller than k."""
    check = is_g_tangle(g, t)
    if not check:
        raise PreconditionError(f"not a G-tangle ({check.clause})")
    members = []
    for size in range(min(t.order, g.n + 1)):
        for combo in itertools.combinations(range(g.n), size):
            members.append(component_of(g, t, bits.from_indices(combo)))
    fam = TouchingFamily(members)
    if not touches_triplewise(g, fam) or min_vertex_cover_size(g, fam) < t.order:
        raise InternalInconsistency("component family fails the touching conditions")
    return fam
