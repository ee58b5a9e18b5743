"""Text input formats: graph, hypergraph, vectors and explicit oracle tables.

Declaration order fixes the universe order. Blank lines and ``#`` comments
are ignored.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Union

from .core import ConnectivitySystem, from_table
from .errors import PreconditionError
from .instances import Graph, Hypergraph, RationalVectorFamily


class FormatError(PreconditionError):
    pass


def _lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((no, line.split()))
    return out


def parse_graph(text: str) -> Graph:
    lines = _lines(text)
    if not lines or lines[0][1] != ["graph"]:
        raise FormatError("graph file must start with 'graph'")
    verts, edges = [], []
    for no, tok in lines[1:]:
        if tok[0] == "v" and len(tok) == 2:
            verts.append(tok[1])
        elif tok[0] == "e" and len(tok) == 3:
            edges.append((tok[1], tok[2]))
        else:
            raise FormatError(f"line {no}: expected 'v <label>' or 'e <label> <label>'")
    return Graph(verts, edges)


def parse_hypergraph(text: str) -> Hypergraph:
    lines = _lines(text)
    if not lines or lines[0][1] != ["hypergraph"]:
        raise FormatError("hypergraph file must start with 'hypergraph'")
    verts, edges = [], []
    for no, tok in lines[1:]:
        if tok[0] == "v" and len(tok) == 2:
            verts.append(tok[1])
        elif tok[0] == "e":
            edges.append(tok[1:])
        else:
            raise FormatError(f"line {no}: expected 'v <label>' or 'e <label>...'")
    return Hypergraph(verts, edges)


def parse_vectors(text: str) -> RationalVectorFamily:
    lines = _lines(text)
    if not lines or lines[0][1][0] != "vectors" or len(lines[0][1]) != 2:
        raise FormatError("vector file must start with 'vectors d'")
    d = int(lines[0][1][1])
    rows = []
    for no, tok in lines[1:]:
        try:
            rows.append([Fraction(t) for t in tok])
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"line {no}: entries must be integers or p/q") from None
    return RationalVectorFamily(d, rows)


def parse_oracle(text: str) -> ConnectivitySystem:
    lines = _lines(text)
    if not lines or lines[0][1][0] != "oracle" or len(lines[0][1]) != 2:
        raise FormatError("oracle file must start with 'oracle n'")
    n = int(lines[0][1][1])
    vals = [int(tok[0]) for _, tok in lines[1:]]
    if len(vals) != 1 << n:
        raise FormatError(f"expected {1 << n} values, found {len(vals)}")
    return from_table(vals)


PARSERS = {
    "graph": parse_graph,
    "hypergraph": parse_hypergraph,
    "vectors": parse_vectors,
    "oracle": parse_oracle,
}


def detect_kind(text: str) -> str:
    lines = _lines(text)
    if not lines:
        raise FormatError("empty input")
    kind = lines[0][1][0]
    if kind not in PARSERS:
        raise FormatError(f"unknown input kind {kind!r}")
    return kind


def load(source: Union[str, Path]) -> tuple[str, object]:
    text = Path(source).read_text()
    kind = detect_kind(text)
    return kind, PARSERS[kind](text)


def format_graph(g: Graph) -> str:
    out = ["graph"]
    out += [f"v {v}" for v in g.vertices]
    out += [f"e {g.vertices[u]} {g.vertices[v]}" for u, v in g.edges]
    return "\n".join(out) + "\n"
