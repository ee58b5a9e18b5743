"""Directed and undirected decompositions, exactification and branch width."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from . import bits
from ._backend import kernels
from .core import LIMITS, ConnectivitySystem, require
from .errors import InternalInconsistency, PreconditionError, SizeLimitError, ValidationError


class DirectedDecomposition:
    """Rooted tree, each internal node with two children, and a cone per node."""

    def __init__(self, full: int, children: Sequence[Sequence[int]], cones: Sequence[int], root: int = 0):
        self.full = int(full)
        self.children = [tuple(c) for c in children]
        self.cones = [int(c) for c in cones]
        self.root = root
        self.parent = [-1] * len(self.cones)
        for t, ch in enumerate(self.children):
            for c in ch:
                self.parent[c] = t

    @classmethod
    def single(cls, full: int) -> "DirectedDecomposition":
        return cls(full, [()], [full])

    def copy(self, cones: Optional[Sequence[int]] = None) -> "DirectedDecomposition":
        return DirectedDecomposition(self.full, self.children, self.cones if cones is None else cones, self.root)

    def __len__(self):
        return len(self.cones)

    def nodes_preorder(self) -> list[int]:
        out, stack = [], [self.root]
        while stack:
            t = stack.pop()
            out.append(t)
            stack.extend(reversed(self.children[t]))
        return out

    def leaves(self) -> list[int]:
        return [t for t in self.nodes_preorder() if not self.children[t]]

    def atoms(self) -> list[int]:
        return sorted(self.cones[t] for t in self.leaves())

    def separations(self) -> set[int]:
        out = set()
        for t in self.nodes_preorder():
            if t != self.root:
                out.add(self.cones[t])
                out.add(self.full ^ self.cones[t])
        return out

    def is_exact_at(self, t: int) -> bool:
        ch = self.children[t]
        if not ch:
            return True
        a, b = self.cones[ch[0]], self.cones[ch[1]]
        return a & b == 0 and a | b == self.cones[t]

    def is_exact(self) -> bool:
        return all(self.is_exact_at(t) for t in self.nodes_preorder())

    def is_complete(self) -> bool:
        return all(bits.popcount(self.cones[t]) == 1 for t in self.leaves())

    def validate(self, exact: bool = False) -> None:
        """Raise ValidationError naming the first violated clause."""
        nn = len(self.cones)
        if not 0 <= self.root < nn or self.parent[self.root] != -1:
            raise ValidationError("root", "root must be a node without parent")
        seen = self.nodes_preorder()
        if len(seen) != nn or len(set(seen)) != nn:
            raise ValidationError("tree", "nodes must form one rooted tree")
        for t in seen:
            if len(self.children[t]) not in (0, 2):
                raise ValidationError("binary", f"node {t} must have zero or two children")
            if self.cones[t] & ~self.full or self.cones[t] < 0:
                raise ValidationError("cone", f"cone of node {t} leaves the universe")
        if self.cones[self.root] != self.full:
            raise ValidationError("root-cone", "the root cone must be the whole universe")
        for t in seen:
            ch = self.children[t]
            if ch and self.cones[t] & ~(self.cones[ch[0]] | self.cones[ch[1]]):
                raise ValidationError("cover", f"cone of node {t} not covered by its children")
            if exact and not self.is_exact_at(t):
                raise ValidationError("exact", f"node {t} is not exact", witness=t)

    def measure(self, sys: ConnectivitySystem) -> tuple[int, int]:
        return (sum(sys.evaluate(c) for c in self.cones), sum(bits.popcount(c) for c in self.cones))

    def __repr__(self):
        return f"DirectedDecomposition(nodes={len(self.cones)})"


class UndirectedDecomposition:
    """Cubic tree with a cone for every oriented edge (the side of the head)."""

    def __init__(self, full: int, adjacency: Sequence[Sequence[int]], gamma: dict):
        self.full = int(full)
        self.adj = [tuple(sorted(a)) for a in adjacency]
        self.gamma = {(int(t), int(u)): int(v) for (t, u), v in gamma.items()}

    def nodes(self) -> range:
        return range(len(self.adj))

    def oriented_edges(self) -> list[tuple[int, int]]:
        return sorted(self.gamma)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((t, u) for (t, u) in self.gamma if t < u)

    def leaves(self) -> list[int]:
        return [t for t in self.nodes() if len(self.adj[t]) <= 1]

    def atom(self, leaf: int) -> int:
        if not self.adj[leaf]:
            return self.full
        return self.gamma[(self.adj[leaf][0], leaf)]

    def atoms(self) -> list[int]:
        return sorted(self.atom(t) for t in self.leaves())

    def separations(self) -> set[int]:
        return set(self.gamma.values())

    def is_exact_at(self, t: int) -> bool:
        if len(self.adj[t]) != 3:
            return True
        a, b, c = (self.gamma[(t, u)] for u in self.adj[t])
        return a & b == 0 and a & c == 0 and b & c == 0

    def is_exact(self) -> bool:
        return all(self.is_exact_at(t) for t in self.nodes())

    def is_complete(self) -> bool:
        return all(bits.popcount(self.atom(t)) == 1 for t in self.leaves())

    def validate(self, exact: bool = False) -> None:
        nn = len(self.adj)
        if nn == 0:
            raise ValidationError("tree", "empty tree")
        edges = {frozenset((t, u)) for t in self.nodes() for u in self.adj[t]}
        for t in self.nodes():
            for u in self.adj[t]:
                if t not in self.adj[u]:
                    raise ValidationError("tree", f"adjacency of {t},{u} not symmetric")
        if len(edges) != nn - 1 or not _connected(self.adj):
            raise ValidationError("tree", "adjacency is not a tree")
        for t in self.nodes():
            if len(self.adj[t]) not in (0, 1, 3):
                raise ValidationError("cubic", f"node {t} has degree {len(self.adj[t])}")
        for t in self.nodes():
            for u in self.adj[t]:
                if (t, u) not in self.gamma:
                    raise ValidationError("cone", f"missing cone for ({t},{u})")
                if self.gamma[(t, u)] != self.full ^ self.gamma[(u, t)]:
                    raise ValidationError("complement", f"cones of ({t},{u}) are not complementary")
        for t in self.nodes():
            if len(self.adj[t]) == 3:
                union = 0
                for u in self.adj[t]:
                    union |= self.gamma[(t, u)]
                if union != self.full:
                    raise ValidationError("cover", f"cones at node {t} do not cover the universe")
                if exact and not self.is_exact_at(t):
                    raise ValidationError("exact", f"node {t} is not exact", witness=t)


def _connected(adj) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        t = stack.pop()
        for u in adj[t]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == len(adj)


Decomposition = Union[DirectedDecomposition, UndirectedDecomposition]


def width(d: Decomposition, sys: ConnectivitySystem) -> int:
    d.validate()
    if isinstance(d, DirectedDecomposition):
        return max(sys.evaluate(c) for c in d.cones)
    return max((sys.evaluate(c) for c in d.gamma.values()), default=0)


@dataclass
class WidthCertificate:
    value: int
    witness: DirectedDecomposition
    orders: list = field(default_factory=list)
    method: str = "dp"
    bound: Optional[int] = None


def _certificate(sys, d: DirectedDecomposition, method: str) -> WidthCertificate:
    orders = [sys.evaluate(c) for c in d.cones]
    return WidthCertificate(max(orders), d, orders, method)


# ---------------------------------------------------------------- exactify


@dataclass
class ExactifyStep:
    case: str
    node: int
    measure: tuple


def exactify(d: DirectedDecomposition, sys: ConnectivitySystem, trace: Optional[list] = None) -> DirectedDecomposition:
    """Turn a pre-decomposition into an exact one without raising any cone order.

    Repeatedly repairs the first non-exact node in preorder. Case 1a shrinks
    the children to the parent cone, Case 1b enlarges the parent, Case 2
    removes the overlap of the children. ``trace`` receives one
    ExactifyStep per iteration.
    """
    d.validate()
    cones = list(d.cones)
    order = d.nodes_preorder()
    ev = sys.evaluate

    def measure():
        return (sum(ev(c) for c in cones), sum(bits.popcount(c) for c in cones))

    cur = measure()
    if trace is not None:
        trace.append(ExactifyStep("start", -1, cur))
    while True:
        s = next((t for t in order if d.children[t] and not _exact(cones, d.children[t], t)), None)
        if s is None:
            break
        t1, t2 = d.children[s]
        x, y1, y2 = cones[s], cones[t1], cones[t2]
        before = (ev(x), ev(y1), ev(y2))
        if x != y1 | y2:
            if ev(x & y1) <= ev(y1) and ev(x & y2) <= ev(y2):
                case = "1a"
                cones[t1], cones[t2] = x & y1, x & y2
            else:
                case = "1b"
                if ev(x | y1) < ev(x):
                    cones[s] = x | y1
                elif ev(x | y2) < ev(x):
                    cones[s] = x | y2
                else:
                    raise InternalInconsistency("submodularity violated in Case 1b")
        else:
            case = "2"
            if ev(y1 & ~y2) <= ev(y1):
                cones[t1] = y1 & ~y2
            elif ev(y2 & ~y1) <= ev(y2):
                cones[t2] = y2 & ~y1
            else:
                raise InternalInconsistency("posimodularity violated in Case 2")
        after = (ev(cones[s]), ev(cones[t1]), ev(cones[t2]))
        if any(a > b for a, b in zip(after, before)):
            raise InternalInconsistency(f"Case {case} raised a cone order")
        new = measure()
        if not new < cur:
            raise InternalInconsistency(f"measure did not decrease in Case {case}")
        cur = new
        if trace is not None:
            trace.append(ExactifyStep(case, s, cur))
    out = d.copy(cones)
    out.validate(exact=True)
    return out


def _exact(cones, ch, t) -> bool:
    a, b = cones[ch[0]], cones[ch[1]]
    return a & b == 0 and a | b == cones[t]


def prune_empty_leaves(d: DirectedDecomposition) -> DirectedDecomposition:
    """Remove empty cones; the sibling subtree takes the parent's place."""
    if d.full == 0:
        raise PreconditionError("universe must be nonempty")
    d.validate(exact=True)
    children, cones = [], []

    def build(t):
        # exactness: an empty child leaves the parent cone equal to its sibling's
        while d.children[t]:
            a, b = d.children[t]
            if d.cones[a] == 0:
                t = b
            elif d.cones[b] == 0:
                t = a
            else:
                break
        idx = len(cones)
        cones.append(d.cones[t])
        children.append(())
        if d.children[t]:
            kids = tuple(build(c) for c in d.children[t])
            children[idx] = kids
        return idx

    build(d.root)
    out = DirectedDecomposition(d.full, children, cones, 0)
    out.validate(exact=True)
    return out


# ---------------------------------------------------------------- directed <-> undirected


def to_undirected(d: DirectedDecomposition) -> UndirectedDecomposition:
    """Suppress the root; Sep and At are preserved."""
    d.validate()
    if len(d) == 1:
        return UndirectedDecomposition(d.full, [()], {})
    if not d.is_exact_at(d.root):
        raise PreconditionError("directed decomposition must be exact at the root")
    ids = {}
    for t in d.nodes_preorder():
        if t != d.root:
            ids[t] = len(ids)
    adj = [[] for _ in ids]
    gamma = {}
    s0, s1 = d.children[d.root]
    a, b = ids[s0], ids[s1]
    adj[a].append(b)
    adj[b].append(a)
    gamma[(a, b)] = d.cones[s1]
    gamma[(b, a)] = d.cones[s0]
    for t in ids:
        for c in d.children[t]:
            p, q = ids[t], ids[c]
            adj[p].append(q)
            adj[q].append(p)
            gamma[(p, q)] = d.cones[c]
            gamma[(q, p)] = d.full ^ d.cones[c]
    out = UndirectedDecomposition(d.full, adj, gamma)
    out.validate()
    return out


def to_directed(u: UndirectedDecomposition, edge_choice: Optional[tuple[int, int]] = None) -> DirectedDecomposition:
    """Subdivide ``edge_choice`` with a new root; the choice is explicit because it is not canonical."""
    u.validate()
    if not u.gamma:
        return DirectedDecomposition.single(u.full)
    if edge_choice is None:
        raise PreconditionError("edge_choice is required for a tree with edges")
    s0, s1 = edge_choice
    if s1 not in u.adj[s0]:
        raise PreconditionError(f"{edge_choice} is not an edge of the tree")
    children = [()]
    cones = [u.full]
    kids = []
    stack = []
    for s, other in ((s0, s1), (s1, s0)):
        idx = len(cones)
        cones.append(u.gamma[(other, s)])
        children.append(())
        kids.append(idx)
        stack.append((s, other, idx))
    children[0] = tuple(kids)
    while stack:
        t, par, idx = stack.pop()
        ch = []
        for c in u.adj[t]:
            if c == par:
                continue
            j = len(cones)
            cones.append(u.gamma[(t, c)])
            children.append(())
            ch.append(j)
            stack.append((c, t, j))
        children[idx] = tuple(ch)
    out = DirectedDecomposition(u.full, children, cones, 0)
    out.validate()
    return out


# ---------------------------------------------------------------- exact branch width


def _from_choice(full: int, choice) -> DirectedDecomposition:
    children, cones = [], []

    def build(x):
        idx = len(cones)
        cones.append(x)
        children.append(())
        if bits.popcount(x) >= 2:
            half = int(choice(x))
            children[idx] = (build(half), build(x ^ half))
        return idx

    build(full)
    return DirectedDecomposition(full, children, cones, 0)


def branch_width(sys: ConnectivitySystem) -> WidthCertificate:
    """Exact branch width with an optimal complete directed decomposition."""
    n = sys.n
    if n == 0:
        return _certificate(sys, DirectedDecomposition.single(0), "trivial")
    memo = sys.memo.get("branch_width")
    if memo is not None:
        return memo
    if n <= LIMITS.dp:
        table = np.ascontiguousarray(sys.table(), dtype=np.int64)
        g, choice = kernels.bw_dp(table, n)
        d = _from_choice(sys.full, lambda x: choice[x])
        cert = _certificate(sys, d, "dp")
        if cert.value != int(g[sys.full]):
            raise InternalInconsistency("DP value and witness width disagree")
    elif sys.has_enumerator:
        cert = sparse_branch_width(sys)
    else:
        raise SizeLimitError("branch_width", n, LIMITS.dp, "use trisection_upper_bound for an upper bound")
    sys.memo["branch_width"] = cert
    return cert


def _popcount_order(masks: np.ndarray) -> np.ndarray:
    pc = bits.popcount_array(masks)
    return masks[np.lexsort((masks, pc))]


def sparse_branch_width(sys: ConnectivitySystem, start: Optional[int] = None) -> WidthCertificate:
    """Exact branch width from the lists of low-order separations.

    For w = val, val+1, ... decide whether the universe splits recursively
    into singletons through sets of order at most w. A cubic tree has an
    edge with at most 2n/3 leaves on either side, so only candidates of that
    size are grown and the universe is checked as one split at the top.
    """
    n = sys.n
    full = sys.full
    if n <= 1:
        return _certificate(sys, DirectedDecomposition.single(full), "sparse")
    leaves = np.array([1 << i for i in range(n)], dtype=np.int64)
    cap = (2 * n) // 3
    w = sys.valence() if start is None else start
    while True:
        seps = sys.separations_below(w + 1)
        cands = _popcount_order(seps[bits.popcount_array(seps) <= cap])
        choice = kernels.sparse_feasible(cands, leaves)
        ok = cands[choice >= 0]
        table = {int(c): int(v) for c, v in zip(cands, choice) if v >= 0}
        top = next((int(a) for a in ok if a & 1 and (full ^ int(a)) in table), None)
        if top is not None:
            table[full] = top
            d = _from_choice(full, lambda x: table[x])
            cert = _certificate(sys, d, "sparse")
            if cert.value != w:
                raise InternalInconsistency("sparse search witness has the wrong width")
            return cert
        w += 1


def upper_bound_decomposition(blocks: Sequence[int], full: int) -> DirectedDecomposition:
    """Join balanced binary trees over the blocks at a centre node.

    With three nonempty blocks the root subdivides the edge from the
    centre to the first block, as in the undirected construction.
    """
    blocks = [b for b in blocks if b]
    if not blocks:
        return DirectedDecomposition.single(full)
    children, cones = [], []

    def node(x, kids=()):
        idx = len(cones)
        cones.append(x)
        children.append(tuple(kids))
        return idx

    def balanced(x):
        idx = bits.indices(x)
        if len(idx) == 1:
            return node(x)
        half = bits.from_indices(idx[: (len(idx) + 1) // 2])
        a = balanced(half)
        b = balanced(x ^ half)
        return node(x, (a, b))

    if len(blocks) == 1:
        subtree = balanced(blocks[0])
        root = subtree
    elif len(blocks) == 2:
        a, b = balanced(blocks[0]), balanced(blocks[1])
        root = node(full, (a, b))
    else:
        a = balanced(blocks[0])
        rest = 0
        subs = []
        for blk in blocks[1:]:
            subs.append(balanced(blk))
            rest |= blk
        centre = subs[-1]
        acc = blocks[-1]
        for sub, blk in zip(reversed(subs[:-1]), reversed(blocks[1:-1])):
            acc |= blk
            centre = node(acc, (sub, centre))
        root = node(full, (a, centre))
    d = DirectedDecomposition(full, children, cones, root)
    d.validate(exact=True)
    return d


def balanced_blocks(n: int, parts: int = 3) -> list[int]:
    """Split indices 0..n-1 into contiguous blocks whose sizes differ by at most one."""
    out, start = [], 0
    for i in range(parts):
        size = n // parts + (1 if i < n % parts else 0)
        out.append(bits.from_indices(range(start, start + size)))
        start += size
    return out


def trisection_upper_bound(sys: ConnectivitySystem, blocks: Optional[Sequence[int]] = None) -> WidthCertificate:
    """Three-block decomposition certifying bw <= val * ceil(n/3)."""
    if blocks is None:
        blocks = balanced_blocks(sys.n)
    d = upper_bound_decomposition(blocks, sys.full)
    cert = _certificate(sys, d, "trisection")
    cert.bound = sys.valence() * -(-sys.n // 3)
    return cert


def edge_trisection_blocks(graph) -> list[int]:
    """Edge blocks E_i: edges inside V_i plus edges between V_i and V_{i+1 mod 3}."""
    vb = balanced_blocks(graph.n)
    part = {}
    for i, b in enumerate(vb):
        for v in bits.iter_bits(b):
            part[v] = i
    out = [0, 0, 0]
    for j, (u, v) in enumerate(graph.edges):
        pu, pv = part[u], part[v]
        if pu == pv:
            out[pu] |= 1 << j
        elif (pu + 1) % 3 == pv:
            out[pu] |= 1 << j
        else:
            out[pv] |= 1 << j
    return out


# ---------------------------------------------------------------- restricted atoms


class AtomFamily:
    """Subset-closed family of allowed atoms, given by a membership predicate."""

    def __init__(self, predicate: Callable[[int], bool], name: str = "custom"):
        self.predicate = predicate
        self.name = name

    def __contains__(self, x: int) -> bool:
        return bool(self.predicate(int(x)))

    @classmethod
    def singletons(cls) -> "AtomFamily":
        return cls(lambda x: bits.popcount(x) <= 1, "singletons")

    @classmethod
    def everything(cls) -> "AtomFamily":
        return cls(lambda x: True, "all")

    @classmethod
    def generated(cls, maximal: Iterable[int], name: str = "generated") -> "AtomFamily":
        """All subsets of the given sets, plus singletons and the empty set."""
        maxes = [int(m) for m in maximal]
        return cls(lambda x: bits.popcount(x) <= 1 or any(x & ~m == 0 for m in maxes), name)


def decompose_over(sys: ConnectivitySystem, family: AtomFamily, k: int) -> Optional[DirectedDecomposition]:
    """Decomposition with atoms in the family and every cone of order < k, or None."""
    n = sys.n
    require("decompose_over", n, "dp")
    for i in range(n):
        if (1 << i) not in family:
            raise PreconditionError(f"family misses the singleton {{{sys.universe.labels[i]}}}")
    table = np.ascontiguousarray(sys.table(), dtype=np.int64)
    allowed = np.fromiter((x in family for x in range(1 << n)), dtype=np.uint8, count=1 << n)
    choice = kernels.over_dp(table, n, allowed, int(k))
    if choice[sys.full] < 0:
        return None
    children, cones = [], []

    def build(x):
        idx = len(cones)
        cones.append(x)
        children.append(())
        c = int(choice[x])
        if c > 0:
            children[idx] = (build(c), build(x ^ c))
        return idx

    build(sys.full)
    d = DirectedDecomposition(sys.full, children, cones, 0)
    d.validate(exact=True)
    return d


# ---------------------------------------------------------------- enumeration (for tests)


def all_complete_decompositions(full: int) -> Iterable[DirectedDecomposition]:
    """Every complete directed branch decomposition rooted at the whole set (unordered children)."""

    def realise(x):
        if bits.popcount(x) == 1:
            yield [x], [()]
            return
        low = x & -x
        rest = x ^ low
        for a in bits.submasks(rest):
            half = a | low
            if half == x:
                continue
            for lc, lk in realise(half):
                for rc, rk in realise(x ^ half):
                    off_l = 1
                    off_r = 1 + len(lc)
                    cones = [x] + lc + rc
                    kids = [(off_l, off_r)]
                    kids += [tuple(c + off_l for c in k) for k in lk]
                    kids += [tuple(c + off_r for c in k) for k in rk]
                    yield cones, kids

    if full == 0:
        yield DirectedDecomposition.single(0)
        return
    for cones, kids in realise(full):
        yield DirectedDecomposition(full, kids, cones, 0)
