"""Nested separation sets, tangle-tree decompositions and the canonical decomposition.

Every step that adds inclusion-minimal sets adds the whole batch at once, so
no construction here depends on the order of the universe.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import bits
from .core import ConnectivitySystem, require
from .errors import InternalInconsistency, PreconditionError, ValidationError
from .graphbridge import GraphTreeDecomposition
from .instances import ContractionSystem, Graph, contract
from .tangles import Tangle, incomparable, is_extension, is_tangle, minimal_sets, tangle_levels, truncate


# ---------------------------------------------------------------- nested sets


def nested(x: int, y: int, full: int) -> bool:
    xc, yc = full ^ x, full ^ y
    return not (x & ~y) or not (x & y) or not (xc & ~y) or not (xc & y)


class NestedSeparationSet:
    """A complement-closed, pairwise nested family of subsets of the universe."""

    __slots__ = ("full", "members")

    def __init__(self, full: int, members: Iterable[int] = ()):
        self.full = int(full)
        self.members = frozenset(int(x) for x in members)

    @classmethod
    def closure(cls, full: int, members: Iterable[int]) -> "NestedSeparationSet":
        ms = {int(x) for x in members}
        return cls(full, ms | {full ^ x for x in ms})

    def sorted_members(self) -> list[int]:
        return sorted(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, x) -> bool:
        return int(x) in self.members

    def __iter__(self):
        return iter(self.sorted_members())

    def __eq__(self, other):
        return isinstance(other, NestedSeparationSet) and (self.full, self.members) == (other.full, other.members)

    def __hash__(self):
        return hash((self.full, self.members))

    def __repr__(self):
        return f"NestedSeparationSet({len(self.members)} members)"

    def crossing_pair(self) -> Optional[tuple[int, int]]:
        ms = self.sorted_members()
        for i, x in enumerate(ms):
            for y in ms[i + 1:]:
                if not nested(x, y, self.full):
                    return (x, y)
        return None

    def validate(self) -> None:
        for x in self.sorted_members():
            if x < 0 or x & ~self.full:
                raise ValidationError("universe", "member leaves the universe", witness=x)
            if self.full ^ x not in self.members:
                raise ValidationError("complement", "not closed under complementation", witness=x)
        pair = self.crossing_pair()
        if pair is not None:
            raise ValidationError("nested", "two members cross", witness=pair)


# ---------------------------------------------------------------- tree decompositions of a connectivity system


class KappaTreeDecomposition:
    """Rooted tree (parent array, root 0) with pairwise disjoint bags covering the universe."""

    def __init__(self, parent: Sequence[int], bags: Sequence[int], full: int):
        self.parent = [int(p) for p in parent]
        self.bags = [int(b) for b in bags]
        self.full = int(full)
        self.children: list[list[int]] = [[] for _ in self.parent]
        for t, p in enumerate(self.parent):
            if p >= 0:
                self.children[p].append(t)
        self._below = None

    def __len__(self):
        return len(self.bags)

    def validate(self) -> None:
        nn = len(self.bags)
        if nn == 0 or self.parent[0] != -1:
            raise ValidationError("tree", "node 0 must be the root")
        for t in range(1, nn):
            if not 0 <= self.parent[t] < t:
                raise ValidationError("tree", "parents must precede their children", witness=t)
        seen = 0
        for t, b in enumerate(self.bags):
            if b & seen or b & ~self.full:
                raise ValidationError("bag", "bags overlap or leave the universe", witness=t)
            seen |= b
        if seen != self.full:
            raise ValidationError("bag", "bags do not cover the universe")

    def neighbours(self, t: int) -> list[int]:
        p = self.parent[t]
        return ([p] if p >= 0 else []) + self.children[t]

    def degree(self, t: int) -> int:
        return len(self.neighbours(t))

    def edges(self) -> list[tuple[int, int]]:
        return [(p, t) for t, p in enumerate(self.parent) if p >= 0]

    def below(self, t: int) -> int:
        """Union of the bags in the subtree of t."""
        if self._below is None:
            out = list(self.bags)
            for u in range(len(out) - 1, 0, -1):
                out[self.parent[u]] |= out[u]
            self._below = out
        return self._below[t]

    def gamma(self, s: int, t: int) -> int:
        """Union of the bags on t's side of the edge st."""
        if self.parent[t] == s:
            return self.below(t)
        if self.parent[s] == t:
            return self.full ^ self.below(s)
        raise PreconditionError(f"nodes {s} and {t} are not adjacent")

    def oriented_edges(self) -> list[tuple[int, int]]:
        return [e for p, t in self.edges() for e in ((p, t), (t, p))]

    def separations(self) -> set[int]:
        return {self.gamma(s, t) for s, t in self.oriented_edges()}

    def path(self, s: int, t: int) -> list[int]:
        up_s, up_t = self._ancestors(s), self._ancestors(t)
        common = set(up_t)
        i = next(i for i, v in enumerate(up_s) if v in common)
        j = up_t.index(up_s[i])
        return up_s[: i + 1] + up_t[:j][::-1]

    def _ancestors(self, t: int) -> list[int]:
        out = [t]
        while self.parent[out[-1]] >= 0:
            out.append(self.parent[out[-1]])
        return out

    def depth(self, t: int) -> int:
        return len(self._ancestors(t)) - 1


def _minimal_batch(members: set[int]) -> list[int]:
    return [x for x in members if not any(y != x and not (y & ~x) for y in members)]


def treedec_from_nested(sys: ConnectivitySystem, s: NestedSeparationSet) -> KappaTreeDecomposition:
    """The tree decomposition whose separations are exactly ``s``.

    Rounds strip all inclusion-minimal members with their complements; the
    tree is then grown from the last round outward, each stripped set
    becoming a leaf under the deepest node whose cone contains it.
    """
    if s.full != sys.full:
        raise PreconditionError("nested set lives on a different universe")
    s.validate()
    rounds = []
    rest = set(s.members)
    while rest:
        batch = sorted(_minimal_batch(rest))
        rounds.append(batch)
        rest -= set(batch) | {sys.full ^ x for x in batch}
    parent, bags = [-1], [sys.full]
    for batch in reversed(rounds):
        td = KappaTreeDecomposition(parent, bags, sys.full)
        if batch == [0]:
            parent.append(0)
            bags.append(0)
            continue
        if 0 in batch:
            raise InternalInconsistency("empty member is minimal alongside others")
        hosts = []
        for x in batch:
            cands = [t for t in range(1, len(parent)) if not (x & ~td.below(t))]
            if not cands:
                hosts.append(0)
                continue
            deepest = max(td.depth(t) for t in cands)
            at = [t for t in cands if td.depth(t) == deepest]
            if len(at) != 1:
                raise InternalInconsistency("attachment node is not unique")
            hosts.append(at[0])
        union = 0
        for x in batch:
            union |= x
        bags = [b & ~union for b in bags]
        for x, h in zip(batch, hosts):
            parent.append(h)
            bags.append(x)
    out = _renumber(parent, bags, sys.full)
    out.validate()
    if out.separations() != set(s.members):
        raise InternalInconsistency("tree separations differ from the nested set")
    return out


def _renumber(parent: Sequence[int], bags: Sequence[int], full: int) -> KappaTreeDecomposition:
    """Breadth-first numbering from the root, children ordered by their cones."""
    raw = KappaTreeDecomposition(parent, bags, full)
    order, new_parent = [0], [-1]
    i = 0
    while i < len(order):
        t = order[i]
        for c in sorted(raw.children[t], key=lambda c: (raw.below(c), raw.bags[c])):
            order.append(c)
            new_parent.append(i)
        i += 1
    return KappaTreeDecomposition(new_parent, [raw.bags[t] for t in order], full)


# ---------------------------------------------------------------- tangle families and separations


def _min_separation(sys: ConnectivitySystem, t: Tangle, u: Tangle) -> tuple[int, list[int]]:
    full = sys.full
    seps = [x for x in t.members if (full ^ x) in u.members]
    if not seps:
        raise PreconditionError("tangles are comparable")
    best = min(sys.evaluate(x) for x in seps)
    return best, sorted(x for x in seps if sys.evaluate(x) == best)


def _is_min_separation(sys: ConnectivitySystem, x: int, t: Tangle, u: Tangle, order: int) -> bool:
    return x in t.members and (sys.full ^ x) in u.members and sys.evaluate(x) == order


def check_tn(sys: ConnectivitySystem, fam: Sequence[Tangle], s: NestedSeparationSet) -> None:
    """TN1 and TN2; raises ValidationError naming the offending pair or set."""
    pairs = {}
    for i, t in enumerate(fam):
        for j, u in enumerate(fam):
            if i != j:
                pairs[i, j] = _min_separation(sys, t, u)[0]
    for (i, j), order in pairs.items():
        if not any(_is_min_separation(sys, z, fam[i], fam[j], order) for z in s.sorted_members()):
            raise ValidationError("TN1", "no minimum separation for a tangle pair", witness=(i, j))
    for z in s.sorted_members():
        if not any(_is_min_separation(sys, z, fam[i], fam[j], o) for (i, j), o in pairs.items()):
            raise ValidationError("TN2", "member separates no tangle pair minimally", witness=z)


@dataclass
class TangleTreeDecomposition:
    tree: KappaTreeDecomposition
    tangles: list[Tangle]
    tau: list[int]
    nested: NestedSeparationSet

    @property
    def hubs(self) -> list[int]:
        used = set(self.tau)
        return [t for t in range(len(self.tree)) if t not in used]

    def tangle_at(self, node: int) -> Optional[int]:
        return self.tau.index(node) if node in self.tau else None


def _locate(sys: ConnectivitySystem, tree: KappaTreeDecomposition, t: Tangle) -> list[int]:
    """Nodes lying on the inward side of every edge of order below ord(t)."""
    k = t.order
    good = set(range(len(tree)))
    for p, c in tree.edges():
        g = tree.gamma(p, c)
        if sys.evaluate(g) >= k:
            continue
        inside = set(_subtree(tree, c))
        good &= inside if g in t.members else set(range(len(tree))) - inside
    return sorted(good)


def _subtree(tree: KappaTreeDecomposition, t: int) -> list[int]:
    out, stack = [], [t]
    while stack:
        u = stack.pop()
        out.append(u)
        stack.extend(tree.children[u])
    return out


def _path_edges(tree: KappaTreeDecomposition, a: int, b: int) -> list[tuple[int, int]]:
    p = tree.path(a, b)
    return list(zip(p, p[1:]))


def check_td(sys: ConnectivitySystem, dec: TangleTreeDecomposition) -> None:
    """TD(i)-(v), plus uniqueness of tau via the TD(iii) node sets."""
    tree, fam, tau = dec.tree, dec.tangles, dec.tau
    if len(set(tau)) != len(tau):
        raise ValidationError("tau", "tau is not injective")
    orders = {}
    for i, t in enumerate(fam):
        for j, u in enumerate(fam):
            if i != j:
                orders[i, j] = _min_separation(sys, t, u)[0]
    for (i, j), o in orders.items():
        if not any(_is_min_separation(sys, tree.gamma(b, a), fam[i], fam[j], o)
                   for a, b in _path_edges(tree, tau[i], tau[j])):
            raise ValidationError("TD(i)", "no minimum separation on the tangle path", witness=(i, j))
    for a, b in tree.oriented_edges():
        z = tree.gamma(b, a)
        if not any((a, b) in _path_edges(tree, tau[i], tau[j]) and _is_min_separation(sys, z, fam[i], fam[j], o)
                   for (i, j), o in orders.items()):
            raise ValidationError("TD(ii)", "edge separates no tangle pair minimally", witness=(a, b))
    for i, t in enumerate(fam):
        here = [v for v in range(len(tree)) if all(tree.gamma(w, v) in t.members for w in tree.neighbours(v))]
        if tau[i] not in here:
            raise ValidationError("TD(iii)", "a cone at the tangle node is not a member", witness=i)
        if len(here) != 1:
            raise ValidationError("tau", "tau is not the unique admissible map", witness=(i, here))
        for a, b in tree.oriented_edges():
            if tau[i] in _subtree_side(tree, a, b):
                z = tree.gamma(a, b)
                if sys.evaluate(z) < t.order and z not in t.members:
                    raise ValidationError("TD(iv)", "low-order inward cone missing", witness=(i, a, b))
    for v in range(len(tree)):
        if tree.degree(v) <= 1 and len(tree) > 1 and v not in tau:
            raise ValidationError("TD(v)", "leaf without a tangle", witness=v)
    if len(tree) == 1 and not tau:
        raise ValidationError("TD(v)", "leaf without a tangle", witness=0)


def _subtree_side(tree: KappaTreeDecomposition, a: int, b: int) -> set[int]:
    """Nodes on b's side of the edge ab."""
    if tree.parent[b] == a:
        return set(_subtree(tree, b))
    return set(range(len(tree))) - set(_subtree(tree, a))


def build_tangle_tree(sys: ConnectivitySystem, fam: Sequence[Tangle], s: NestedSeparationSet) -> TangleTreeDecomposition:
    fam = list(fam)
    if not fam:
        raise PreconditionError("tangle family must be nonempty")
    for i, t in enumerate(fam):
        for u in fam[i + 1:]:
            if not incomparable(t, u):
                raise PreconditionError("tangles must be mutually incomparable")
    check_tn(sys, fam, s)
    tree = treedec_from_nested(sys, s)
    tau = []
    for i, t in enumerate(fam):
        comp = _locate(sys, tree, t)
        if len(comp) != 1:
            raise InternalInconsistency(f"tangle {i} sits on {len(comp)} nodes")
        tau.append(comp[0])
    dec = TangleTreeDecomposition(tree, fam, tau, s)
    check_td(sys, dec)
    return dec


# ---------------------------------------------------------------- coherent families


def _check_coherent(sys: ConnectivitySystem, fam: Sequence[Tangle]) -> int:
    if not fam:
        raise PreconditionError("coherent family must be nonempty")
    k1 = fam[0].order
    if k1 < 1 or any(t.order != k1 for t in fam):
        raise PreconditionError("coherent family needs one common positive order")
    base = truncate(sys, fam[0], k1 - 1)
    if any(truncate(sys, t, k1 - 1) != base for t in fam[1:]):
        raise PreconditionError("tangles do not share their truncation")
    if len(set(fam)) != len(fam):
        raise PreconditionError("coherent family has repeated tangles")
    return k1 - 1


def coherent_nested_set(sys: ConnectivitySystem, fam: Sequence[Tangle]) -> NestedSeparationSet:
    """Nested set for tangles of order k+1 sharing their order-k truncation."""
    fam = list(fam)
    k = _check_coherent(sys, fam)
    full = sys.full
    seps = {}
    for i, t in enumerate(fam):
        for j, u in enumerate(fam):
            if i != j:
                order, ms = _min_separation(sys, t, u)
                if order != k:
                    raise InternalInconsistency("coherent pair separated below k")
                seps[i, j] = set(ms)
    chosen: set[int] = set()
    done: set[int] = set()
    while len(fam) - len(done) >= 2:
        live = [i for i in range(len(fam)) if i not in done]
        cands = set().union(*(seps[i, j] for i in live for j in live if i != j))
        batch = _minimal_batch(cands)
        for z in batch:
            for x in chosen | cands:
                if not nested(z, x, full):
                    raise InternalInconsistency(f"minimal separation {z:#x} crosses {x:#x}")
        chosen |= set(batch)
        now = {i for (i, j), ms in seps.items() if ms & chosen}
        if now <= done:
            raise InternalInconsistency("coherent iteration stalled")
        done |= now
    out = NestedSeparationSet.closure(full, chosen)
    if out.crossing_pair() is not None:
        raise InternalInconsistency("coherent nested set is not nested")
    check_tn(sys, fam, out)
    return out


# ---------------------------------------------------------------- contraction at a tangle


@dataclass
class TangleContraction:
    system: ContractionSystem
    tstar: Tangle
    zs: list[int]
    extensions: list[Tangle] = field(default_factory=list)

    def lift(self, x: int) -> int:
        return self.system.lift(x)

    def down(self, t: Tangle) -> Tangle:
        cs = self.system
        return Tangle(t.order, (cs.project(y) for y in t.members if cs.respects_atoms(y)), "contraction")

    def up(self, t: Tangle) -> Tangle:
        return Tangle(t.order, (self.system.lift(x) for x in t.members), "expansion")


def contract_at_tangle(sys: ConnectivitySystem, tstar: Tangle, sk: NestedSeparationSet) -> TangleContraction:
    """Contract the complement of every minimal member of tstar in sk to one element."""
    ups = [u for u in tangle_levels(sys, tstar.order + 1)[tstar.order + 1] if is_extension(u, tstar)]
    if not ups:
        raise PreconditionError("tangle is not extendible")
    zs = sorted(minimal_sets(x for x in sk.members if x in tstar.members))
    atoms = [sys.full ^ z for z in zs]
    cs = contract(sys, atoms)
    out = TangleContraction(cs, tstar, zs, ups)
    for t in [tstar] + ups:
        d = out.down(t)
        if d.order != t.order or not is_tangle(cs, d):
            raise InternalInconsistency("contracted tangle fails the axioms")
    downs = [out.down(u) for u in ups]
    for i, j in itertools.combinations(range(len(ups)), 2):
        if downs[i] == downs[j]:
            raise InternalInconsistency("contraction merged two tangles")
        ko, ms = _min_separation(cs, downs[i], downs[j])
        if ko != _min_separation(sys, ups[i], ups[j])[0]:
            raise InternalInconsistency("minimum separation order changed under contraction")
        for x in ms:
            if not _is_min_separation(sys, cs.lift(x), ups[i], ups[j], ko):
                raise InternalInconsistency("expanded separation is not minimum")
    return out


# ---------------------------------------------------------------- the canonical decomposition


def _level_max(levels: Sequence[Sequence[Tangle]], k: int) -> list[Tangle]:
    """Maximal tangles among those of order at most k."""
    out = []
    for j in range(k + 1):
        for t in levels[j]:
            if j == k or not any(t.members <= u.members for u in levels[j + 1]):
                out.append(t)
    return out


def canonical_decomposition(sys: ConnectivitySystem, k_max: Optional[int] = None
                            ) -> tuple[NestedSeparationSet, TangleTreeDecomposition]:
    if not sys.has_enumerator:
        require("canonical_decomposition", sys.n, "canonical")
    if k_max is None:
        k_max = sys.n
    if k_max < 0:
        raise PreconditionError("k_max must be nonnegative")
    key = ("canonical", k_max)
    if key not in sys.memo:
        sys.memo[key] = _canonical(sys, k_max)
    return sys.memo[key]


def _canonical(sys: ConnectivitySystem, k_max: int) -> tuple[NestedSeparationSet, TangleTreeDecomposition]:
    levels = tangle_levels(sys, k_max)
    k_top = max(j for j in range(k_max + 1) if levels[j])
    full = sys.full
    s = NestedSeparationSet(full)
    for k in range(k_top):
        added: set[int] = set()
        for tstar in levels[k]:
            ext = [u for u in levels[k + 1] if is_extension(u, tstar)]
            if len(ext) < 2:
                continue
            con = contract_at_tangle(sys, tstar, s)
            local = coherent_nested_set(con.system, [con.down(u) for u in ext])
            added |= {con.lift(x) for x in local.members}
        s = NestedSeparationSet(full, s.members | added)
        pair = s.crossing_pair()
        if pair is not None:
            raise InternalInconsistency(f"level {k + 1} crossing pair {pair[0]:#x}, {pair[1]:#x}")
        check_tn(sys, _level_max(levels, k + 1), s)
    fam = _level_max(levels, k_top)
    return s, build_tangle_tree(sys, fam, s)


# ---------------------------------------------------------------- canonicity


def _tree_isomorphism(a: TangleTreeDecomposition, b: TangleTreeDecomposition, bag_map, tangle_map) -> Optional[list[int]]:
    """Node bijection g with bag_map(bag) and tangle labels respected, by backtracking."""
    ta, tb = a.tree, b.tree
    if len(ta) != len(tb):
        return None
    label_b = {node: i for i, node in enumerate(b.tau)}
    cands = []
    for v in range(len(ta)):
        want_bag = bag_map(ta.bags[v])
        want_tangle = tangle_map.get(a.tangle_at(v)) if a.tangle_at(v) is not None else None
        cs = [w for w in range(len(tb)) if tb.bags[w] == want_bag and tb.degree(w) == ta.degree(v)
              and label_b.get(w) == want_tangle]
        if not cs:
            return None
        cands.append(cs)
    order = sorted(range(len(ta)), key=lambda v: (len(cands[v]), ta.depth(v)))
    g = [-1] * len(ta)
    used = set()

    def search(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for w in cands[v]:
            if w in used:
                continue
            if any(g[u] >= 0 and g[u] not in tb.neighbours(w) for u in ta.neighbours(v)):
                continue
            g[v] = w
            used.add(w)
            if search(i + 1):
                return True
            g[v] = -1
            used.discard(w)
        return False

    return g if search(0) else None


def canonicity_test(sys: ConnectivitySystem, perm: Sequence[int], k_max: Optional[int] = None) -> bool:
    """Does the decomposition of the relabeled system match the relabeled decomposition?"""
    perm = list(perm)
    other = sys.permuted(perm)
    _, a = canonical_decomposition(sys, k_max)
    _, b = canonical_decomposition(other, k_max)
    if len(a.tangles) != len(b.tangles):
        return False
    index_b = {t: i for i, t in enumerate(b.tangles)}
    tangle_map = {}
    for i, t in enumerate(a.tangles):
        moved = Tangle(t.order, (bits.permute_mask(x, perm) for x in t.members))
        if moved not in index_b:
            return False
        tangle_map[i] = index_b[moved]
    return _tree_isomorphism(a, b, lambda x: bits.permute_mask(x, perm), tangle_map) is not None


# ---------------------------------------------------------------- graph tree decompositions


def graph_treedec_from_kappa_treedec(g: Graph, td: KappaTreeDecomposition) -> GraphTreeDecomposition:
    """Vertex bags from hulls: v goes to every node on a path between nodes holding its edges."""
    full = (1 << g.m) - 1
    if td.full != full:
        raise PreconditionError("tree decomposition is not over the edge set")
    td.validate()
    nn = len(td)
    bags = [0] * nn
    for v in range(g.n):
        holders = [t for t in range(nn) if td.bags[t] & g.inc[v]]
        hull = set()
        for a, b in itertools.combinations(holders, 2):
            hull.update(td.path(a, b))
        hull.update(holders)
        for t in hull:
            bags[t] |= 1 << v
    adjacency = [td.neighbours(t) for t in range(nn)]
    out = GraphTreeDecomposition(adjacency, bags)
    out.validate(g)
    return out
