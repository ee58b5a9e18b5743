"""Graph tree decompositions and the bridges between kappa_G, mu_G and tree width."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Optional, Sequence

from . import bits
from .branchdec import (
    DirectedDecomposition,
    UndirectedDecomposition,
    exactify,
    prune_empty_leaves,
    to_directed,
    width,
)
from .core import require
from .errors import InternalInconsistency, PreconditionError, ValidationError
from .instances import Graph, matching_connectivity, vertex_connectivity


class GraphTreeDecomposition:
    """A tree (adjacency lists) with a vertex bag per node."""

    def __init__(self, adjacency: Sequence[Sequence[int]], bags: Sequence[int]):
        self.adj = [tuple(sorted(a)) for a in adjacency]
        self.bags = [int(b) for b in bags]

    def __len__(self):
        return len(self.bags)

    @property
    def width(self) -> int:
        return max(bits.popcount(b) for b in self.bags) - 1

    def edges(self) -> list[tuple[int, int]]:
        return [(t, u) for t in range(len(self.adj)) for u in self.adj[t] if t < u]

    def validate(self, g: Graph) -> None:
        """Tree shape, edge coverage and connected vertex traces.

        Vertices without edges need not appear in any bag.
        """
        nn = len(self.bags)
        if nn == 0 or len(self.adj) != nn:
            raise ValidationError("tree", "one adjacency list per bag required")
        for t in range(nn):
            for u in self.adj[t]:
                if t not in self.adj[u]:
                    raise ValidationError("tree", f"adjacency of {t},{u} not symmetric")
        if len(self.edges()) != nn - 1 or not _connected_nodes(self.adj, set(range(nn))):
            raise ValidationError("tree", "adjacency is not a tree")
        allv = (1 << g.n) - 1
        for t, b in enumerate(self.bags):
            if b & ~allv:
                raise ValidationError("bag", f"bag {t} leaves the vertex set")
        for j, (u, v) in enumerate(g.edges):
            pair = (1 << u) | (1 << v)
            if not any(b & pair == pair for b in self.bags):
                raise ValidationError("edge", f"edge {g.edge_labels[j]} is in no bag", witness=j)
        for v in range(g.n):
            nodes = {t for t, b in enumerate(self.bags) if b >> v & 1}
            if nodes and not _connected_nodes(self.adj, nodes):
                raise ValidationError("trace", f"bags containing {g.vertices[v]} are not connected", witness=v)

    def __repr__(self):
        return f"GraphTreeDecomposition(nodes={len(self.bags)})"


def _connected_nodes(adj, nodes: set) -> bool:
    start = next(iter(nodes))
    seen = {start}
    stack = [start]
    while stack:
        t = stack.pop()
        for u in adj[t]:
            if u in nodes and u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == len(nodes)


# ---------------------------------------------------------------- tree width


def _q_set(g: Graph, s: int, v: int) -> int:
    """Vertices outside S+v reachable from v through S."""
    inner = s | (1 << v)
    comp = 1 << v
    frontier = comp
    while frontier:
        nxt = 0
        for u in bits.iter_bits(frontier):
            nxt |= g.adj[u]
        nxt &= inner & ~comp
        comp |= nxt
        frontier = nxt
    out = 0
    for u in bits.iter_bits(comp):
        out |= g.adj[u]
    return out & ~inner


def elimination_order(g: Graph) -> tuple[int, list[int]]:
    """Exact tree width and an optimal elimination order.

    TW(S) = min over v in S of max(TW(S - v), |Q(S - v, v)|), where S is
    the set of already eliminated vertices.
    """
    n = g.n
    require("treewidth", n, "treewidth")
    size = 1 << n
    tw = [0] * size
    best = [0] * size
    tw[0] = -1
    for s in range(1, size):
        val = None
        for v in bits.iter_bits(s):
            rest = s ^ (1 << v)
            cand = max(tw[rest], bits.popcount(_q_set(g, rest, v)))
            if val is None or cand < val:
                val, best[s] = cand, v
        tw[s] = val
    order = []
    s = size - 1
    while s:
        v = best[s]
        order.append(v)
        s ^= 1 << v
    order.reverse()
    return tw[size - 1], order


def treedec_from_order(g: Graph, order: Sequence[int]) -> GraphTreeDecomposition:
    """Bags {v} + later neighbours in the fill-in graph, one node per vertex."""
    n = g.n
    if n == 0:
        return GraphTreeDecomposition([()], [0])
    pos = {v: i for i, v in enumerate(order)}
    adj = list(g.adj)
    bags, parent = [], []
    for v in order:
        later = adj[v] & ~bits.from_indices(u for u in order[: pos[v] + 1])
        for u in bits.iter_bits(later):
            adj[u] |= later & ~(1 << u)
        bags.append(later | (1 << v))
        parent.append(min((pos[u] for u in bits.iter_bits(later)), default=-1))
    tree = [[] for _ in order]
    roots = []
    for i, p in enumerate(parent):
        if p < 0:
            roots.append(i)
        else:
            tree[i].append(p)
            tree[p].append(i)
    # join the elimination forest; the root bags of distinct components are disjoint
    for a, b in zip(roots, roots[1:]):
        tree[a].append(b)
        tree[b].append(a)
    return GraphTreeDecomposition(tree, bags)


def treewidth(g: Graph) -> tuple[int, GraphTreeDecomposition]:
    value, order = elimination_order(g)
    td = treedec_from_order(g, order)
    td.validate(g)
    if g.n and td.width != value:
        raise InternalInconsistency("elimination witness has the wrong width")
    return value, td


# ---------------------------------------------------------------- tree decomposition -> branch decomposition


def treedec_to_branchdec(g: Graph, td: GraphTreeDecomposition) -> UndirectedDecomposition:
    """Branch decomposition of kappa_G of width at most width(td) + 1.

    The result carries ``bags``: for every node the bag it inherits from
    the tree decomposition.
    """
    if g.m == 0:
        raise PreconditionError("graph must have an edge")
    td.validate(g)
    adj = [set(a) for a in td.adj]
    bag = list(td.bags)
    edge_leaf = {}
    # step 1: a new leaf per edge, attached to the first node covering it
    for j, (u, v) in enumerate(g.edges):
        pair = (1 << u) | (1 << v)
        t = next(i for i in range(len(td.bags)) if td.bags[i] & pair == pair)
        leaf = len(bag)
        bag.append(pair)
        adj.append({t})
        adj[t].add(leaf)
        edge_leaf[leaf] = j
    alive = set(range(len(bag)))
    # step 2: only the edge leaves remain leaves
    changed = True
    while changed:
        changed = False
        for t in sorted(alive):
            if t not in edge_leaf and len(adj[t]) <= 1 and len(alive) > 1:
                for u in adj[t]:
                    adj[u].discard(t)
                adj[t] = set()
                alive.discard(t)
                changed = True
    # step 3: caterpillars replace nodes of degree above three
    for t in sorted(alive):
        nbrs = sorted(adj[t])
        if len(nbrs) <= 3:
            continue
        chain = [t] + [_new_node(adj, bag, alive, bag[t]) for _ in range(len(nbrs) - 3)]
        last = len(chain) - 1
        links = [[nbrs[0], nbrs[1]]] + [[nbrs[i + 1]] for i in range(1, last)] + [[nbrs[-2], nbrs[-1]]]
        for u in nbrs:
            adj[u].discard(t)
        adj[t] = set()
        for i, c in enumerate(chain):
            for u in links[i]:
                adj[c].add(u)
                adj[u].add(c)
            if i < last:
                adj[c].add(chain[i + 1])
                adj[chain[i + 1]].add(c)
    for t in alive:
        if len(adj[t]) > 3:
            raise InternalInconsistency("degree expansion left a node of degree above three")
    # step 4: suppress degree-2 nodes
    for t in sorted(alive):
        if len(adj[t]) == 2:
            a, b = sorted(adj[t])
            adj[a].discard(t)
            adj[b].discard(t)
            adj[a].add(b)
            adj[b].add(a)
            adj[t] = set()
            alive.discard(t)
    ids = {t: i for i, t in enumerate(sorted(alive))}
    new_adj = [sorted(ids[u] for u in adj[t]) for t in sorted(alive)]
    leaf_edge = {ids[t]: j for t, j in edge_leaf.items()}
    gamma = _cones_from_leaves(new_adj, {t: 1 << j for t, j in leaf_edge.items()})
    full = (1 << g.m) - 1
    out = UndirectedDecomposition(full, new_adj, gamma)
    out.bags = {ids[t]: bag[t] for t in alive}
    for (s, t), cone in out.gamma.items():
        if g.boundary(cone) & ~out.bags[t]:
            raise InternalInconsistency(f"boundary of cone ({s},{t}) is not inside the bag of {t}")
    out.validate(exact=True)
    kappa = vertex_connectivity(g)
    if width(out, kappa) > max(td.width + 1, 0):
        raise InternalInconsistency("converted decomposition is too wide")
    return out


def _new_node(adj, bag, alive, b) -> int:
    idx = len(bag)
    bag.append(b)
    adj.append(set())
    alive.add(idx)
    return idx


def _cones_from_leaves(adj, leaf_sets: dict) -> dict:
    """gamma(s, t) = union of leaf sets on t's side of the edge st."""
    gamma = {}

    def side(s, t):
        key = (s, t)
        if key in gamma:
            return gamma[key]
        stack = [(t, s)]
        acc = 0
        while stack:
            x, par = stack.pop()
            acc |= leaf_sets.get(x, 0)
            stack.extend((y, x) for y in adj[x] if y != par)
        gamma[key] = acc
        return acc

    for s in range(len(adj)):
        for t in adj[s]:
            side(s, t)
    return gamma


# ---------------------------------------------------------------- branch decomposition -> tree decomposition


def branchdec_to_treedec(g: Graph, bd) -> GraphTreeDecomposition:
    """Tree decomposition with width + 1 at most max(3/2 wd(bd), 2)."""
    if g.m == 0:
        raise PreconditionError("graph must have an edge")
    if isinstance(bd, DirectedDecomposition):
        from .branchdec import to_undirected

        bd = to_undirected(bd)
    full = (1 << g.m) - 1
    if bd.full != full:
        raise PreconditionError("decomposition is not over the edge set")
    bd.validate(exact=True)
    if not bd.is_complete():
        raise PreconditionError("branch decomposition must be complete")
    bags = []
    for t in bd.nodes():
        if len(bd.adj[t]) <= 1:
            atom = bd.atom(t)
            bags.append(g.edge_vertex_mask(atom))
        else:
            b = 0
            for u in bd.adj[t]:
                b |= g.boundary(bd.gamma[(t, u)])
            bags.append(b)
    td = GraphTreeDecomposition(bd.adj, bags)
    td.validate(g)
    wd = width(bd, vertex_connectivity(g))
    if td.width + 1 > max(Fraction(3, 2) * wd, 2):
        raise InternalInconsistency("tree decomposition exceeds the 3/2 bound")
    return td


# ---------------------------------------------------------------- kappa_G versus mu_G


def mu_branchdec_from_kappa(g: Graph, bd) -> DirectedDecomposition:
    """Branch decomposition of mu_G of width at most max(1, wd(bd))."""
    if g.m == 0:
        raise PreconditionError("graph needs a vertex of positive degree")
    if isinstance(bd, UndirectedDecomposition):
        bd = to_directed(bd, bd.edges()[0]) if bd.gamma else DirectedDecomposition.single(bd.full)
    full_e = (1 << g.m) - 1
    if bd.full != full_e:
        raise PreconditionError("decomposition is not over the edge set")
    bd.validate()
    kappa = vertex_connectivity(g)
    wd = width(bd, kappa)
    keep = [v for v in range(g.n) if g.adj[v]]
    isolated = [v for v in range(g.n) if not g.adj[v]]
    core = Graph([g.vertices[v] for v in keep], [(g.vertices[u], g.vertices[v]) for u, v in g.edges])
    pos = {v: i for i, v in enumerate(keep)}
    mu_core = matching_connectivity(core)
    cones = []
    for c in bd.cones:
        vm = g.edge_vertex_mask(c)
        cones.append(bits.from_indices(pos[v] for v in bits.iter_bits(vm)))
    core_full = (1 << core.n) - 1
    pre = DirectedDecomposition(core_full, bd.children, cones, bd.root)
    ex = exactify(pre, mu_core)
    children = list(ex.children)
    cones = list(ex.cones)
    for t in list(ex.leaves()):
        if bits.popcount(cones[t]) == 2:
            a, b = bits.indices(cones[t])
            kids = []
            for v in (a, b):
                kids.append(len(cones))
                cones.append(1 << v)
                children.append(())
            children[t] = tuple(kids)
    split = DirectedDecomposition(core_full, children, cones, ex.root)
    core_dec = prune_empty_leaves(split)
    # back to G's vertex indices; isolated vertices hang off a new root
    children = [tuple(c) for c in core_dec.children]
    cones = [bits.from_indices(keep[i] for i in bits.iter_bits(c)) for c in core_dec.cones]
    root = core_dec.root
    if isolated:
        sub = _balanced_subtree(isolated, children, cones)
        children.append((root, sub))
        cones.append((1 << g.n) - 1)
        root = len(cones) - 1
    out = DirectedDecomposition((1 << g.n) - 1, children, cones, root)
    out.validate(exact=True)
    if not out.is_complete():
        raise InternalInconsistency("mu decomposition is not complete")
    if width(out, matching_connectivity(g)) > max(1, wd):
        raise InternalInconsistency("mu decomposition is too wide")
    return out


def _balanced_subtree(items, children, cones) -> int:
    idx = len(cones)
    cones.append(bits.from_indices(items))
    children.append(())
    if len(items) > 1:
        half = (len(items) + 1) // 2
        a = _balanced_subtree(items[:half], children, cones)
        b = _balanced_subtree(items[half:], children, cones)
        children[idx] = (a, b)
    return idx


def least_min_cover(g: Graph, edge_mask: int) -> int:
    """Lexicographically least minimum vertex cover of an edge set."""
    ends = [g.edges[j] for j in bits.iter_bits(edge_mask)]
    if not ends:
        return 0
    cand = sorted(set(itertools.chain.from_iterable(ends)))
    for size in range(1, len(cand) + 1):
        for combo in itertools.combinations(cand, size):
            s = bits.from_indices(combo)
            if all(s >> u & 1 or s >> v & 1 for u, v in ends):
                return s
    raise InternalInconsistency("no vertex cover found")


def mu_tangle_from_kappa_tangle(g: Graph, tangle):
    """mu_G-tangle of order k+1 from a kappa_G-tangle of order 2k+1."""
    from .tangles import Tangle, is_tangle

    kappa = vertex_connectivity(g)
    check = is_tangle(kappa, tangle)
    if not check.ok:
        raise PreconditionError(f"input is not a kappa_G-tangle ({check.clause})")
    if tangle.order % 2 == 0:
        raise PreconditionError("order must be odd (2k+1)")
    k = (tangle.order - 1) // 2
    require("mu_tangle_from_kappa_tangle", g.n, "enumerate")
    mu = matching_connectivity(g)
    full = (1 << g.n) - 1
    covers: dict[int, int] = {}
    members = []
    for x in range(full + 1):
        if mu.evaluate(x) > k:
            continue
        key = min(x, full ^ x)
        s = covers.get(key)
        if s is None:
            s = covers[key] = least_min_cover(g, g.edges_between(key, full ^ key))
        if g.edges_between(x, x | s) in tangle.members:
            members.append(x)
    out = Tangle(k + 1, members)
    check = is_tangle(mu, out)
    if not check.ok:
        raise InternalInconsistency(f"constructed mu-tangle violates {check.clause}")
    return out
