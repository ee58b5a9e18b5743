"""JSON and DOT renderings of decompositions, tangles and canonical decompositions.

Every JSON document carries ``"schema": 1``. Subsets are hex bitmasks where
bit i is universe element i in declaration order.
"""

from __future__ import annotations

import json
from typing import Optional

from . import bits
from .branchdec import DirectedDecomposition, UndirectedDecomposition, WidthCertificate
from .canonical import KappaTreeDecomposition, NestedSeparationSet, TangleTreeDecomposition
from .core import ConnectivitySystem
from .errors import PreconditionError
from .graphbridge import GraphTreeDecomposition
from .instances import Graph
from .tangles import Tangle

SCHEMA = 1
_h = bits.to_hex


def dumps(doc: dict) -> str:
    """Stable text form: sorted keys, fixed separators, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _check_schema(doc: dict) -> None:
    if doc.get("schema") != SCHEMA:
        raise PreconditionError(f"unsupported schema {doc.get('schema')!r}")


def universe_json(sys: ConnectivitySystem) -> list[str]:
    return list(sys.universe.labels)


# ---------------------------------------------------------------- branch decompositions


def directed_json(d: DirectedDecomposition, sys: Optional[ConnectivitySystem] = None) -> dict:
    doc = {
        "schema": SCHEMA,
        "kind": "directed-decomposition",
        "root": d.root,
        "parent": list(d.parent),
        "cones": [_h(c) for c in d.cones],
        "full": _h(d.full),
    }
    if sys is not None:
        doc["orders"] = [sys.evaluate(c) for c in d.cones]
        doc["universe"] = universe_json(sys)
    return doc


def directed_from_json(doc: dict) -> DirectedDecomposition:
    _check_schema(doc)
    parent = doc["parent"]
    children = [[] for _ in parent]
    for t, p in enumerate(parent):
        if p >= 0:
            children[p].append(t)
    return DirectedDecomposition(bits.from_hex(doc["full"]), children,
                                 [bits.from_hex(c) for c in doc["cones"]], doc["root"])


def undirected_json(u: UndirectedDecomposition, sys: Optional[ConnectivitySystem] = None) -> dict:
    edges = u.oriented_edges()
    doc = {
        "schema": SCHEMA,
        "kind": "undirected-decomposition",
        "adjacency": [list(a) for a in u.adj],
        "cones": [[s, t, _h(u.gamma[s, t])] for s, t in edges],
        "full": _h(u.full),
    }
    if sys is not None:
        doc["orders"] = [sys.evaluate(u.gamma[e]) for e in edges]
    return doc


def undirected_from_json(doc: dict) -> UndirectedDecomposition:
    _check_schema(doc)
    gamma = {(s, t): bits.from_hex(c) for s, t, c in doc["cones"]}
    return UndirectedDecomposition(bits.from_hex(doc["full"]), doc["adjacency"], gamma)


def certificate_json(cert: WidthCertificate, sys: ConnectivitySystem) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "branch-width",
        "value": cert.value,
        "method": cert.method,
        "decomposition": directed_json(cert.witness, sys),
    }


def directed_dot(d: DirectedDecomposition, sys: ConnectivitySystem) -> str:
    out = ["graph decomposition {", "  node [shape=circle, label=\"\"];"]
    for t in d.nodes_preorder():
        if not d.children[t]:
            label = ",".join(sys.universe.labels_of(d.cones[t])) or "-"
            out.append(f"  n{t} [shape=box, label=\"{label}\"];")
        else:
            out.append(f"  n{t};")
    for t in d.nodes_preorder():
        for c in d.children[t]:
            out.append(f"  n{t} -- n{c} [label=\"{sys.evaluate(d.cones[c])}\"];")
    out.append("}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- graph tree decompositions


def graph_treedec_json(td: GraphTreeDecomposition, g: Graph) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "graph-tree-decomposition",
        "adjacency": [list(a) for a in td.adj],
        "bags": [[g.vertices[v] for v in bits.iter_bits(b)] for b in td.bags],
        "width": td.width,
    }


def graph_treedec_from_json(doc: dict, g: Graph) -> GraphTreeDecomposition:
    _check_schema(doc)
    index = {v: i for i, v in enumerate(g.vertices)}
    return GraphTreeDecomposition(doc["adjacency"], [bits.from_indices(index[v] for v in b) for b in doc["bags"]])


def graph_treedec_dot(td: GraphTreeDecomposition, g: Graph) -> str:
    out = ["graph treedec {", "  node [shape=box];"]
    for t, b in enumerate(td.bags):
        out.append(f"  n{t} [label=\"{','.join(g.vertices[v] for v in bits.iter_bits(b))}\"];")
    for s, t in td.edges():
        out.append(f"  n{s} -- n{t};")
    out.append("}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- tangles


def tangle_json(t: Tangle) -> dict:
    doc = {"schema": SCHEMA, "kind": "tangle", "order": t.order, "members": [_h(x) for x in t.sorted_members()]}
    if t.provenance:
        doc["provenance"] = t.provenance
    return doc


def tangle_from_json(doc: dict) -> Tangle:
    _check_schema(doc)
    return Tangle(doc["order"], (bits.from_hex(x) for x in doc["members"]), doc.get("provenance", ""))


# ---------------------------------------------------------------- canonical decompositions


def canonical_json(s: NestedSeparationSet, dec: TangleTreeDecomposition, sys: ConnectivitySystem) -> dict:
    tree = dec.tree
    hubs = set(dec.hubs)
    return {
        "schema": SCHEMA,
        "kind": "canonical-decomposition",
        "universe": universe_json(sys),
        "full": _h(s.full),
        "nested": [_h(x) for x in s.sorted_members()],
        "parent": list(tree.parent),
        "bags": [_h(b) for b in tree.bags],
        "hub": [t in hubs for t in range(len(tree))],
        "tangles": [
            {"node": dec.tau[i], "order": t.order, "members": len(t), "tangle": tangle_json(t)}
            for i, t in enumerate(dec.tangles)
        ],
    }


def canonical_from_json(doc: dict) -> tuple[NestedSeparationSet, TangleTreeDecomposition]:
    _check_schema(doc)
    full = bits.from_hex(doc["full"])
    s = NestedSeparationSet(full, (bits.from_hex(x) for x in doc["nested"]))
    tree = KappaTreeDecomposition(doc["parent"], [bits.from_hex(b) for b in doc["bags"]], full)
    tangles = [tangle_from_json(e["tangle"]) for e in doc["tangles"]]
    tau = [e["node"] for e in doc["tangles"]]
    return s, TangleTreeDecomposition(tree, tangles, tau, s)


_PALETTE = ["#ffffff", "#d9d9d9", "#a6d96a", "#fdae61", "#74add1", "#f46d43", "#abd9e9", "#fee090"]


def canonical_dot(dec: TangleTreeDecomposition, sys: ConnectivitySystem) -> str:
    tree = dec.tree
    out = ["graph canonical {", "  node [style=filled];"]
    for v in range(len(tree)):
        bag = ",".join(sys.universe.labels_of(tree.bags[v]))
        i = dec.tangle_at(v)
        if i is None:
            out.append(f"  n{v} [shape=diamond, fillcolor=\"#ffffff\", label=\"hub\\n{bag}\"];")
        else:
            k = dec.tangles[i].order
            color = _PALETTE[k % len(_PALETTE)]
            out.append(f"  n{v} [shape=circle, fillcolor=\"{color}\", label=\"T{i} ord {k}\\n{bag}\"];")
    for p, c in tree.edges():
        out.append(f"  n{p} -- n{c} [label=\"{sys.evaluate(tree.gamma(p, c))}\"];")
    out.append("}")
    return "\n".join(out) + "\n"
