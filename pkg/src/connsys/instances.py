"""Concrete connectivity systems from graphs, hypergraphs, vectors and polymatroids."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from . import bits
from .core import ConnectivitySystem, Universe, check_properties
from .errors import PreconditionError


class Graph:
    """Simple undirected graph with ordered vertices and ordered edges."""

    def __init__(self, vertices: Iterable, edges: Iterable[Sequence], edge_labels=None):
        self.vertices = tuple(str(v) for v in vertices)
        index = {v: i for i, v in enumerate(self.vertices)}
        if len(index) != len(self.vertices):
            raise PreconditionError("duplicate vertex label")
        self.index = index
        pairs = []
        seen = set()
        for e in edges:
            if len(e) != 2:
                raise PreconditionError(f"edge {e!r} must have two endpoints")
            a, b = (str(x) for x in e)
            if a not in index or b not in index:
                raise PreconditionError(f"edge {a}-{b} uses an undeclared vertex")
            if a == b:
                raise PreconditionError(f"loop at {a} not allowed")
            key = frozenset((a, b))
            if key in seen:
                raise PreconditionError(f"duplicate edge {a}-{b}")
            seen.add(key)
            pairs.append((index[a], index[b]))
        self.edges = tuple(pairs)
        if edge_labels is None:
            edge_labels = [f"{self.vertices[u]}-{self.vertices[v]}" for u, v in pairs]
        self.edge_labels = tuple(str(x) for x in edge_labels)
        if len(self.edge_labels) != len(pairs):
            raise PreconditionError("one label per edge required")
        nv = len(self.vertices)
        self.adj = [0] * nv
        self.inc = [0] * nv  # edge masks per vertex
        for j, (u, v) in enumerate(pairs):
            self.adj[u] |= 1 << v
            self.adj[v] |= 1 << u
            self.inc[u] |= 1 << j
            self.inc[v] |= 1 << j

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return bits.popcount(self.adj[v])

    def edge_vertex_mask(self, emask: int) -> int:
        """V(Y): vertices incident with an edge of Y."""
        out = 0
        for j in bits.iter_bits(emask):
            u, v = self.edges[j]
            out |= (1 << u) | (1 << v)
        return out

    def boundary(self, emask: int) -> int:
        """Vertices incident with an edge in Y and an edge outside Y."""
        full = (1 << self.m) - 1
        out = 0
        for v in range(self.n):
            inc = self.inc[v]
            if inc & emask and inc & (full ^ emask):
                out |= 1 << v
        return out

    def edges_between(self, xmask: int, ymask: int) -> int:
        """Edge mask of E(X,Y): one end in X, the other in Y."""
        out = 0
        for j, (u, v) in enumerate(self.edges):
            if (xmask >> u & 1 and ymask >> v & 1) or (xmask >> v & 1 and ymask >> u & 1):
                out |= 1 << j
        return out

    def induced_edges(self, vmask: int) -> int:
        """E(X): edges with both ends in X."""
        out = 0
        for j, (u, v) in enumerate(self.edges):
            if vmask >> u & 1 and vmask >> v & 1:
                out |= 1 << j
        return out

    def components(self, vmask: Optional[int] = None) -> list[int]:
        """Connected components of G[vmask] as vertex masks, ascending by lowest vertex."""
        if vmask is None:
            vmask = (1 << self.n) - 1
        comps = []
        left = vmask
        while left:
            seed = left & -left
            comp = seed
            frontier = seed
            while frontier:
                nxt = 0
                for v in bits.iter_bits(frontier):
                    nxt |= self.adj[v]
                nxt &= vmask & ~comp
                comp |= nxt
                frontier = nxt
            comps.append(comp)
            left &= ~comp
        return comps

    def relabeled(self, perm: Sequence[int]) -> "Graph":
        """Vertex i becomes position perm[i] in the new vertex order."""
        order = [None] * self.n
        for i, p in enumerate(perm):
            order[p] = self.vertices[i]
        edges = [(self.vertices[u], self.vertices[v]) for u, v in self.edges]
        return Graph(order, edges, self.edge_labels)

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


class Hypergraph:
    """Ordered vertices and an ordered list of edges (vertex masks); multi-edges allowed."""

    def __init__(self, vertices: Iterable, edges: Iterable[Iterable], edge_labels=None):
        self.vertices = tuple(str(v) for v in vertices)
        index = {v: i for i, v in enumerate(self.vertices)}
        if len(index) != len(self.vertices):
            raise PreconditionError("duplicate vertex label")
        self.index = index
        masks = []
        for e in edges:
            m = 0
            for x in e:
                if str(x) not in index:
                    raise PreconditionError(f"edge uses undeclared vertex {x!r}")
                m |= 1 << index[str(x)]
            masks.append(m)
        self.edges = tuple(masks)
        if edge_labels is None:
            edge_labels = [f"e{j}" for j in range(len(masks))]
        self.edge_labels = tuple(str(x) for x in edge_labels)
        self.inc = [0] * len(self.vertices)
        for j, m in enumerate(masks):
            for v in bits.iter_bits(m):
                self.inc[v] |= 1 << j

    @classmethod
    def from_graph(cls, g: Graph) -> "Hypergraph":
        return cls(g.vertices, [(g.vertices[u], g.vertices[v]) for u, v in g.edges], g.edge_labels)

    def dual(self) -> "Hypergraph":
        """Vertices become edges and vice versa."""
        return Hypergraph(
            self.edge_labels,
            [[self.edge_labels[j] for j in bits.iter_bits(self.inc[v])] for v in range(len(self.vertices))],
            self.vertices,
        )


class Gf2Matrix:
    """Dense matrix over the two-element field, rows stored as int bitsets."""

    def __init__(self, rows: Sequence[int], ncols: int):
        self.row_bits = tuple(int(r) for r in rows)
        self.rows = len(self.row_bits)
        self.cols = ncols

    @classmethod
    def from_lists(cls, data: Sequence[Sequence[int]]) -> "Gf2Matrix":
        ncols = len(data[0]) if data else 0
        return cls([sum((int(v) & 1) << j for j, v in enumerate(r)) for r in data], ncols)

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.cols)] for r in self.row_bits]

    def rank(self) -> int:
        return gf2_rank(self.row_bits)


def gf2_rank(rows: Iterable[int]) -> int:
    basis: dict[int, int] = {}  # leading bit -> row
    for r in rows:
        while r:
            lead = r.bit_length() - 1
            b = basis.get(lead)
            if b is None:
                basis[lead] = r
                break
            r ^= b
    return len(basis)


def _pair_xor_builder(pairs):
    us = np.array([p[0] for p in pairs], dtype=np.int64)
    vs = np.array([p[1] for p in pairs], dtype=np.int64)

    def build(masks):
        masks = np.asarray(masks, dtype=np.int64)
        out = np.zeros(masks.shape, dtype=np.int64)
        for u, v in zip(us, vs):
            out += ((masks >> u) ^ (masks >> v)) & 1
        return out

    return build


def _boundary_builder(inc_masks, full):
    incs = [int(x) for x in inc_masks if x]

    def build(masks):
        masks = np.asarray(masks, dtype=np.int64)
        out = np.zeros(masks.shape, dtype=np.int64)
        comp = full ^ masks
        for inc in incs:
            out += ((masks & inc) != 0) & ((comp & inc) != 0)
        return out

    return build


def edge_connectivity(g: Graph) -> ConnectivitySystem:
    """nu_G(X) = number of edges between X and its complement."""
    build = _pair_xor_builder(g.edges)
    return ConnectivitySystem(
        Universe(g.vertices), lambda x: int(build(np.array([x]))[0]), name="nu", table_builder=build
    )


def vertex_connectivity(g: Graph) -> ConnectivitySystem:
    """kappa_G(Y) = |boundary(Y)| on the edge set."""
    full = (1 << g.m) - 1
    build = _boundary_builder(g.inc, full)

    def oracle(y):
        return bits.popcount(g.boundary(y))

    sys = ConnectivitySystem(
        Universe(g.edge_labels), oracle, name="kappa", table_builder=build,
        enumerator=lambda k: _kappa_enumerate(g, k, build),
    )
    sys.graph = g
    return sys


# Below this many edges a full table scan is cheaper than the structural enumeration.
STRUCTURAL_MIN_EDGES = 17


def _kappa_enumerate(g: Graph, k: int, build) -> Optional[np.ndarray]:
    """All edge sets with boundary smaller than k.

    Every such Y has boundary inside some vertex set S with |S| < k, and is
    then a union of pieces: the edges meeting one component of G - S, or a
    single edge inside S. Enumerate S and piece unions with boundary exactly S.
    """
    if g.m < STRUCTURAL_MIN_EDGES:
        return None
    if k <= 0:
        return np.zeros(0, dtype=np.int64)
    found = []
    allv = (1 << g.n) - 1
    for size in range(0, min(k - 1, g.n) + 1):
        for s_idx in itertools.combinations(range(g.n), size):
            s = bits.from_indices(s_idx)
            pieces = []
            for comp in g.components(allv & ~s):
                em = 0
                for v in bits.iter_bits(comp):
                    em |= g.inc[v]
                if em:
                    pieces.append(em)
            pieces.extend(1 << j for j in bits.iter_bits(g.induced_edges(s)))
            unions = np.zeros(1 << len(pieces), dtype=np.int64)
            for j, p in enumerate(pieces):
                block = 1 << j
                unions[block: 2 * block] = unions[:block] | p
            vals = build(unions)
            found.append(unions[vals == size])
    out = np.unique(np.concatenate(found)) if found else np.zeros(0, dtype=np.int64)
    return out


def max_bipartite_matching(left: Sequence[int], right_adj: Sequence[int]) -> tuple[int, dict]:
    """Augmenting-path matching; ``right_adj[i]`` is the neighbour mask of ``left[i]``."""
    match_r: dict[int, int] = {}

    def augment(i, seen):
        for r in bits.iter_bits(right_adj[i]):
            if seen[0] >> r & 1:
                continue
            seen[0] |= 1 << r
            if r not in match_r or augment(match_r[r], seen):
                match_r[r] = i
                return True
        return False

    size = 0
    for i in range(len(left)):
        if augment(i, [0]):
            size += 1
    return size, {left[i]: r for r, i in match_r.items()}


def matching_number(g: Graph, x: int) -> int:
    xs = list(bits.iter_bits(x))
    comp = ((1 << g.n) - 1) ^ x
    size, _ = max_bipartite_matching(xs, [g.adj[v] & comp for v in xs])
    return size


def matching_connectivity(g: Graph) -> ConnectivitySystem:
    """mu_G(X) = maximum matching between X and its complement."""
    return ConnectivitySystem(Universe(g.vertices), lambda x: matching_number(g, x), name="mu")


def cut_rank_matrix(g: Graph, x: int) -> Gf2Matrix:
    """M(X, X-bar): rows X ascending, columns complement ascending."""
    comp = [v for v in range(g.n) if not x >> v & 1]
    rows = []
    for v in bits.iter_bits(x):
        r = 0
        for j, w in enumerate(comp):
            if g.adj[v] >> w & 1:
                r |= 1 << j
        rows.append(r)
    return Gf2Matrix(rows, len(comp))


def cut_rank(g: Graph) -> ConnectivitySystem:
    """rho_G(X) = GF(2) rank of the X by X-bar adjacency submatrix."""
    full = (1 << g.n) - 1

    def oracle(x):
        comp = full ^ x
        return gf2_rank(g.adj[v] & comp for v in bits.iter_bits(x))

    return ConnectivitySystem(Universe(g.vertices), oracle, name="rho")


def hypergraph_connectivities(h: Hypergraph) -> tuple[ConnectivitySystem, ConnectivitySystem]:
    """(nu_H on vertices, kappa_H on edges)."""
    edges = h.edges

    def nu(x):
        return sum(1 for e in edges if e & x and e & ~x)

    def nu_build(masks):
        masks = np.asarray(masks, dtype=np.int64)
        out = np.zeros(masks.shape, dtype=np.int64)
        for e in edges:
            out += ((masks & e) != 0) & ((masks & e) != e)
        return out

    full_e = (1 << len(edges)) - 1
    kb = _boundary_builder(h.inc, full_e)

    def kappa(y):
        return sum(1 for inc in h.inc if inc & y and inc & (full_e ^ y))

    nu_sys = ConnectivitySystem(Universe(h.vertices), nu, name="hypergraph-nu", table_builder=nu_build)
    k_sys = ConnectivitySystem(Universe(h.edge_labels), kappa, name="hypergraph-kappa", table_builder=kb)
    return nu_sys, k_sys


def hypergraph_cover_function(h: Hypergraph) -> ConnectivitySystem:
    """mu_H(X) = minimum vertex cover of the edges split by X.

    Not submodular in general; returned as a plain set function for checking.
    """
    nv = len(h.vertices)
    edges = h.edges

    def cover(x):
        split = [e for e in edges if e & x and e & ~x]
        if not split:
            return 0
        for size in range(1, nv + 1):
            for combo in itertools.combinations(range(nv), size):
                s = bits.from_indices(combo)
                if all(e & s for e in split):
                    return size
        raise AssertionError("unreachable: all vertices cover every edge")

    return ConnectivitySystem(Universe(h.vertices), cover, name="hypergraph-cover")


class RationalVectorFamily:
    """Ordered vectors of a common dimension with exact rational entries."""

    def __init__(self, d: int, vectors: Sequence[Sequence], labels=None):
        self.d = int(d)
        self.vectors = tuple(tuple(Fraction(c) for c in v) for v in vectors)
        for v in self.vectors:
            if len(v) != self.d:
                raise PreconditionError(f"vector {v} does not have dimension {self.d}")
        self.labels = tuple(labels) if labels is not None else tuple(f"v{i}" for i in range(len(self.vectors)))

    def rank(self, mask: int) -> int:
        return rational_rank([self.vectors[i] for i in bits.iter_bits(mask)])


def rational_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    mat = [list(r) for r in rows]
    rank = 0
    ncols = len(mat[0]) if mat else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(mat)) if mat[r][col] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        p = mat[rank][col]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                f = mat[r][col] / p
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
    return rank


def vector_connectivity(fam: RationalVectorFamily) -> ConnectivitySystem:
    """dim<X> + dim<X-bar> - dim<U>, the dimension of the intersection."""
    full = (1 << len(fam.vectors)) - 1
    ranks: dict[int, int] = {}

    def rk(m):
        r = ranks.get(m)
        if r is None:
            r = ranks[m] = fam.rank(m)
        return r

    total = rk(full)
    return ConnectivitySystem(
        Universe(fam.labels), lambda x: rk(x) + rk(full ^ x) - total, name="vector"
    )


def vector_rank_function(fam: RationalVectorFamily) -> ConnectivitySystem:
    """The rank function X -> dim<X> as a set function."""
    return ConnectivitySystem(Universe(fam.labels), fam.rank, name="rank")


class PolymatroidError(PreconditionError):
    def __init__(self, clause, witness):
        super().__init__(f"not an integer polymatroid: {clause} fails at {tuple(hex(w) for w in witness)}")
        self.clause, self.witness = clause, witness


def verify_polymatroid(pi: ConnectivitySystem, univalent: bool = False) -> None:
    """Raise PolymatroidError unless pi is normalised, monotone and submodular."""
    t = pi.table()
    n = pi.n
    if t[0] != 0:
        raise PolymatroidError("normalised", (0,))
    for x in range(1 << n):
        for i in range(n):
            if not x >> i & 1 and t[x | 1 << i] < t[x]:
                raise PolymatroidError("monotone", (x, x | 1 << i))
    if univalent:
        for i in range(n):
            if t[1 << i] > 1:
                raise PolymatroidError("univalent", (1 << i,))
    rep = check_properties(pi)
    if not rep.submodular:
        raise PolymatroidError("submodular", rep.witnesses["submodular"])


def polymatroid_connectivity(pi: ConnectivitySystem, *, univalent: bool = False) -> ConnectivitySystem:
    """kappa_pi(X) = pi(X) + pi(X-bar) - pi(U) after verifying the polymatroid axioms."""
    verify_polymatroid(pi, univalent)
    full = pi.full
    top = pi.evaluate(full)
    name = "matroid" if univalent else "polymatroid"
    return ConnectivitySystem(
        pi.universe, lambda x: pi.evaluate(x) + pi.evaluate(full ^ x) - top, name=name
    )


def matroid_connectivity(rank: ConnectivitySystem) -> ConnectivitySystem:
    return polymatroid_connectivity(rank, univalent=True)


def jowett_polymatroid(sys: ConnectivitySystem) -> ConnectivitySystem:
    """pi(X) = kappa(X) + sum of singleton values over X; its connectivity is 2 kappa."""
    single = sys.singleton_values()

    def pi(x):
        return sys.evaluate(x) + sum(single[i] for i in bits.iter_bits(x))

    return ConnectivitySystem(sys.universe, pi, name="jowett")


class ContractionSystem(ConnectivitySystem):
    """Each atom becomes one fresh element; values are read through the expansion."""

    def __init__(self, base: ConnectivitySystem, atoms: Sequence[int]):
        atoms = [int(a) for a in atoms]
        seen = 0
        for a in atoms:
            if a == 0:
                raise PreconditionError("atoms must be nonempty")
            if a & ~base.full:
                raise PreconditionError("atom outside the universe")
            if a & seen:
                raise PreconditionError("atoms must be pairwise disjoint (overlaps are rejected)")
            seen |= a
        self.base = base
        self.atoms = sorted(atoms)
        kept = [i for i in range(base.n) if not seen >> i & 1]
        labels = [base.universe.labels[i] for i in kept]
        labels += ["<" + "|".join(base.universe.labels_of(a)) + ">" for a in self.atoms]
        self.expansion = [1 << i for i in kept] + list(self.atoms)
        self._covered = seen
        super().__init__(
            Universe(labels),
            lambda x: base.evaluate(self.lift(x)),
            name=f"{base.name}/contracted",
            table_builder=lambda m: base.values(self.lift_array(m)),
            enumerator=(self._enum if base.has_enumerator else None),
        )

    def lift(self, x: int) -> int:
        out = 0
        for i in bits.iter_bits(x):
            out |= self.expansion[i]
        return out

    def lift_array(self, masks) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.int64)
        out = np.zeros_like(masks)
        for i, e in enumerate(self.expansion):
            out |= ((masks >> i) & 1) * np.int64(e)
        return out

    def respects_atoms(self, y: int) -> bool:
        return all((y & a) in (0, a) for a in self.atoms)

    def project(self, y: int) -> int:
        """Inverse of lift on base subsets that do not split an atom."""
        if not self.respects_atoms(y):
            raise PreconditionError("subset splits an atom")
        out = 0
        for i, e in enumerate(self.expansion):
            if y & e:
                out |= 1 << i
        return out

    def project_array(self, ys) -> np.ndarray:
        ys = np.asarray(ys, dtype=np.int64)
        out = np.zeros_like(ys)
        for i, e in enumerate(self.expansion):
            out |= ((ys & np.int64(e)) != 0).astype(np.int64) << i
        return out

    def respects_array(self, ys) -> np.ndarray:
        ys = np.asarray(ys, dtype=np.int64)
        ok = np.ones(ys.shape, dtype=bool)
        for a in self.atoms:
            part = ys & np.int64(a)
            ok &= (part == 0) | (part == a)
        return ok

    def _enum(self, k):
        src = self.base.separations_below(k)
        return np.sort(self.project_array(src[self.respects_array(src)]))


def contract(sys: ConnectivitySystem, atoms: Sequence[int]) -> ContractionSystem:
    return ContractionSystem(sys, atoms)


def dual_cover_function(h: Hypergraph) -> ConnectivitySystem:
    """On edge sets: minimum number of edges covering the boundary vertices."""
    return hypergraph_cover_function(h.dual())
