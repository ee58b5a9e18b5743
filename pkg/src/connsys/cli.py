"""Command-line front end.

Universe order is declaration order in the input file. Hex bitmasks in the
output are little-endian over that order: bit i is the i-th declared element.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import bits
from .branchdec import AtomFamily, branch_width, to_undirected
from .canonical import canonical_decomposition, canonicity_test, check_td, check_tn, graph_treedec_from_kappa_treedec
from .core import LIMITS, ConnectivitySystem, check_properties
from .duality import duality_check
from .errors import ConnsysError, PreconditionError, SizeLimitError, ValidationError
from .formats import PARSERS, detect_kind
from .graphbridge import branchdec_to_treedec, mu_branchdec_from_kappa, treedec_to_branchdec, treewidth
from .instances import (
    Graph,
    Hypergraph,
    cut_rank,
    edge_connectivity,
    hypergraph_connectivities,
    hypergraph_cover_function,
    matching_connectivity,
    matroid_connectivity,
    vector_connectivity,
    vector_rank_function,
    vertex_connectivity,
)
from .serialize import (
    SCHEMA,
    canonical_dot,
    canonical_from_json,
    canonical_json,
    certificate_json,
    directed_dot,
    directed_from_json,
    directed_json,
    dumps,
    graph_treedec_dot,
    graph_treedec_from_json,
    graph_treedec_json,
    tangle_from_json,
    tangle_json,
    undirected_from_json,
    undirected_json,
)
from .tangles import enumerate_tangles, greedy_cover, is_tangle, minimum_cover

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3

SELECTORS = {
    "graph": {
        "nu": edge_connectivity,
        "kappa": vertex_connectivity,
        "mu": matching_connectivity,
        "rho": cut_rank,
    },
    "vectors": {
        "vector": vector_connectivity,
        "matroid": lambda fam: matroid_connectivity(vector_rank_function(fam)),
    },
    "oracle": {"oracle": lambda s: s},
    "hypergraph": {
        "hypergraph-nu": lambda h: hypergraph_connectivities(h)[0],
        "hypergraph-kappa": lambda h: hypergraph_connectivities(h)[1],
        "hypergraph-cover": hypergraph_cover_function,
    },
}
DEFAULT_SELECTOR = {"graph": "kappa", "vectors": "vector", "oracle": "oracle", "hypergraph": "hypergraph-kappa"}


class UsageError(ConnsysError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load(path: str, selector: Optional[str]):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    kind = detect_kind(text)
    obj = PARSERS[kind](text)
    name = selector or DEFAULT_SELECTOR[kind]
    if name not in SELECTORS[kind]:
        raise UsageError(f"selector {name!r} does not apply to {kind} input "
                         f"(choose from {', '.join(SELECTORS[kind])})")
    return kind, obj, SELECTORS[kind][name](obj)


def _require_graph(kind: str, obj) -> Graph:
    if kind != "graph":
        raise UsageError("this command needs a graph input")
    return obj


def _labels(sys: ConnectivitySystem, x: int) -> list[str]:
    return sys.universe.labels_of(x)


class _Out:
    def __init__(self, stream):
        self.stream = stream

    def json(self, doc: dict) -> None:
        self.stream.write(dumps(doc))

    def text(self, s: str) -> None:
        self.stream.write(s if s.endswith("\n") else s + "\n")


# ---------------------------------------------------------------- commands


def cmd_props(args, out: _Out) -> int:
    _, _, s = _load(args.input, args.selector)
    rep = check_properties(s)
    doc = {"schema": SCHEMA, "kind": "properties", **rep.as_dict()}
    if rep.counterexample:
        doc["counterexample_labels"] = [_labels(s, x) for x in rep.counterexample]
        doc["counterexample"] = [bits.to_hex(x) for x in rep.counterexample]
    doc["witnesses"] = {k: [bits.to_hex(x) for x in v] for k, v in sorted(rep.witnesses.items())}
    if args.format == "json":
        out.json(doc)
    else:
        flags = ("normalised", "symmetric", "submodular", "posimodular", "nonnegative")
        out.text(" ".join(f"{f}={'yes' if getattr(rep, f) else 'no'}" for f in flags) + f" valence={rep.valence}")
        if rep.counterexample:
            sets = " ".join("{" + ",".join(_labels(s, x)) + "}" for x in rep.counterexample)
            out.text(f"counterexample ({rep.violation}): {sets}")
    return EXIT_OK if rep.is_connectivity_function else EXIT_VIOLATION


def cmd_bw(args, out: _Out) -> int:
    _, _, s = _load(args.input, args.selector)
    cert = branch_width(s)
    if args.format == "json":
        out.json(certificate_json(cert, s))
    elif args.format == "dot":
        out.text(directed_dot(cert.witness, s))
    else:
        out.text(str(cert.value))
    return EXIT_OK


def cmd_tangles(args, out: _Out) -> int:
    _, _, s = _load(args.input, args.selector)
    ts = enumerate_tangles(s, args.k)
    if args.format == "json":
        out.json({"schema": SCHEMA, "kind": "tangles", "order": args.k, "tangles": [tangle_json(t) for t in ts]})
    else:
        out.text(json.dumps([[",".join(_labels(s, x)) for x in t.minimal_members()] for t in ts]))
    return EXIT_OK


def cmd_cover(args, out: _Out) -> int:
    _, _, s = _load(args.input, args.selector)
    rows = []
    for t in enumerate_tangles(s, args.k):
        g, m = greedy_cover(s, t), minimum_cover(s, t)
        rows.append({"greedy": bits.to_hex(g), "greedy_labels": _labels(s, g),
                     "minimum": bits.to_hex(m), "minimum_labels": _labels(s, m), "order": t.order})
    if args.format == "json":
        out.json({"schema": SCHEMA, "kind": "covers", "order": args.k, "covers": rows})
    else:
        for r in rows:
            out.text(f"greedy {{{','.join(r['greedy_labels'])}}} minimum {{{','.join(r['minimum_labels'])}}}")
    return EXIT_OK


def _atom_family(s: ConnectivitySystem, spec: Optional[str]) -> Optional[AtomFamily]:
    if not spec:
        return None
    groups = [g for g in spec.split(";") if g.strip()]
    return AtomFamily.generated([s.universe.subset(x.strip() for x in g.split(",")) for g in groups], "generated")


def cmd_duality(args, out: _Out) -> int:
    _, _, s = _load(args.input, args.selector)
    v = duality_check(s, _atom_family(s, args.atoms), args.k)
    doc = {"schema": SCHEMA, "kind": "duality", "k": v.k, "atoms": v.atoms,
           "verdict": "decomposition" if v.has_decomposition else "tangle"}
    if v.decomposition is not None:
        doc["decomposition"] = directed_json(v.decomposition, s)
    if v.tangle is not None:
        doc["tangle"] = tangle_json(v.tangle)
    if args.format == "json":
        out.json(doc)
    else:
        out.text(f"k={v.k}: {doc['verdict']}")
    return EXIT_OK


def cmd_canonical(args, out: _Out) -> int:
    _, _, s = _load(args.input, args.selector)
    nested, dec = canonical_decomposition(s, args.kmax)
    if args.relabel:
        rng = random.Random(args.seed)
        for _ in range(args.relabel):
            perm = list(range(s.n))
            rng.shuffle(perm)
            if not canonicity_test(s, perm, args.kmax):
                raise ValidationError("canonicity", "relabeled decomposition differs", witness=perm)
    if args.format == "json":
        out.json(canonical_json(nested, dec, s))
    elif args.format == "dot":
        out.text(canonical_dot(dec, s))
    else:
        out.text(f"{len(dec.tangles)} maximal tangles, {len(dec.tree)} nodes, {len(dec.hubs)} hubs")
        for v in range(len(dec.tree)):
            i = dec.tangle_at(v)
            tag = "hub" if i is None else f"tangle order {dec.tangles[i].order}"
            out.text(f"node {v} parent {dec.tree.parent[v]} {tag} bag {{{','.join(_labels(s, dec.tree.bags[v]))}}}")
    return EXIT_OK


def cmd_convert(args, out: _Out) -> int:
    kind, obj, s = _load(args.input, args.selector or "kappa")
    g = _require_graph(kind, obj)
    kappa = vertex_connectivity(g)
    if args.mode == "tw2bw":
        tw, td = treewidth(g)
        bd = treedec_to_branchdec(g, td)
        doc = undirected_json(bd, kappa)
        doc["treewidth"] = tw
        text = f"treewidth {tw}, branch decomposition width {max(doc['orders'], default=0)}"
        dot = graph_treedec_dot(td, g)
    elif args.mode == "bw2tw":
        cert = branch_width(kappa)
        if g.m < 2:
            raise PreconditionError("bw2tw needs at least two edges")
        td = branchdec_to_treedec(g, to_undirected(cert.witness))
        doc = graph_treedec_json(td, g)
        doc["branch_width"] = cert.value
        text = f"branch width {cert.value}, tree decomposition width {td.width}"
        dot = graph_treedec_dot(td, g)
    else:
        cert = branch_width(kappa)
        mu = matching_connectivity(g)
        d = mu_branchdec_from_kappa(g, cert.witness)
        doc = directed_json(d, mu)
        doc["kappa_width"] = cert.value
        text = f"kappa width {cert.value}, mu decomposition width {max(doc['orders'])}"
        dot = directed_dot(d, mu)
    if args.format == "json":
        out.json(doc)
    elif args.format == "dot":
        out.text(dot)
    else:
        out.text(text)
    return EXIT_OK


def cmd_export(args, out: _Out) -> int:
    try:
        doc = json.loads(Path(args.document).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {args.document}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"not JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise UsageError("document lacks \"schema\": 1")
    s = None
    g = None
    if args.system:
        kind, obj, s = _load(args.system, args.selector)
        g = obj if kind == "graph" else None
    kind = doc.get("kind")
    if kind == "branch-width":
        doc = doc["decomposition"]
        kind = doc.get("kind")
    if kind == "directed-decomposition":
        d = directed_from_json(doc)
        d.validate(exact=True)
        if s is not None and "orders" in doc and doc["orders"] != [s.evaluate(c) for c in d.cones]:
            raise ValidationError("orders", "stored cone orders disagree with the system")
        if args.fmt == "dot":
            if s is None:
                raise UsageError("dot export of a decomposition needs --system")
            out.text(directed_dot(d, s))
        else:
            out.json(directed_json(d, s))
    elif kind == "undirected-decomposition":
        u = undirected_from_json(doc)
        u.validate(exact=True)
        out.json(undirected_json(u, s))
    elif kind == "graph-tree-decomposition":
        if g is None:
            raise UsageError("graph tree decompositions need --system GRAPH")
        td = graph_treedec_from_json(doc, g)
        td.validate(g)
        out.text(graph_treedec_dot(td, g)) if args.fmt == "dot" else out.json(graph_treedec_json(td, g))
    elif kind in ("tangle", "tangles"):
        ts = [tangle_from_json(doc)] if kind == "tangle" else [tangle_from_json(x) for x in doc["tangles"]]
        if s is not None:
            for t in ts:
                chk = is_tangle(s, t)
                if not chk:
                    raise ValidationError(chk.clause, "tangle axiom fails",
                                          witness=[bits.to_hex(x) for x in chk.witness])
        if kind == "tangle":
            out.json(tangle_json(ts[0]))
        else:
            out.json({"schema": SCHEMA, "kind": "tangles", "order": doc.get("order"),
                      "tangles": [tangle_json(t) for t in ts]})
    elif kind == "canonical-decomposition":
        nested, dec = canonical_from_json(doc)
        nested.validate()
        dec.tree.validate()
        if dec.tree.separations() != set(nested.members):
            raise ValidationError("Sep", "tree separations differ from the nested set")
        if s is not None:
            check_tn(s, dec.tangles, nested)
            check_td(s, dec)
        if args.fmt == "dot":
            if s is None:
                raise UsageError("dot export of a canonical decomposition needs --system")
            out.text(canonical_dot(dec, s))
        elif s is not None:
            out.json(canonical_json(nested, dec, s))
        else:
            out.json(doc)
    else:
        raise UsageError(f"cannot export documents of kind {kind!r}")
    return EXIT_OK


# ---------------------------------------------------------------- parser and entry point


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="connsys",
        description="Branch width, tangles and canonical decompositions of connectivity systems.",
        epilog="Universe order is declaration order in the input file; hex bitmasks are "
               "little-endian over that order (bit i = i-th declared element).",
    )
    p.add_argument("--json-errors", action="store_true", help="report errors as JSON on stderr")
    p.add_argument("--limit", action="append", default=[], metavar="NAME=N", help="override a size limit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, selector=True):
        sp.add_argument("input")
        if selector:
            sp.add_argument("--selector", help="nu|kappa|mu|rho|vector|matroid|oracle|"
                                               "hypergraph-nu|hypergraph-kappa|hypergraph-cover")
        sp.add_argument("--format", choices=("text", "json", "dot"), default="text")

    sp = sub.add_parser("props", help="verify the connectivity-function axioms")
    common(sp)
    sp.set_defaults(func=cmd_props)
    sp = sub.add_parser("bw", help="exact branch width with a witness")
    common(sp)
    sp.set_defaults(func=cmd_bw)
    sp = sub.add_parser("tangles", help="all tangles of order k")
    common(sp)
    sp.add_argument("-k", type=int, required=True)
    sp.set_defaults(func=cmd_tangles)
    sp = sub.add_parser("cover", help="greedy and minimum covers of the order-k tangles")
    common(sp)
    sp.add_argument("-k", type=int, required=True)
    sp.set_defaults(func=cmd_cover)
    sp = sub.add_parser("duality", help="decomposition or tangle at order k")
    common(sp)
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--atoms", help="maximal atoms as label groups, e.g. 'a,b;c,d'")
    sp.set_defaults(func=cmd_duality)
    sp = sub.add_parser("canonical", help="canonical tangle-tree decomposition")
    common(sp)
    sp.add_argument("--kmax", type=int, default=None)
    sp.add_argument("--relabel", type=int, default=0, help="also check N random relabelings")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_canonical)
    sp = sub.add_parser("convert", help="convert between graph decompositions")
    sp.add_argument("mode", choices=("tw2bw", "bw2tw", "mu-from-kappa"))
    common(sp)
    sp.set_defaults(func=cmd_convert)
    sp = sub.add_parser("export", help="re-validate a JSON document and emit JSON or DOT")
    sp.add_argument("fmt", choices=("dot", "json"))
    sp.add_argument("document")
    sp.add_argument("--system", help="input file to validate against")
    sp.add_argument("--selector")
    sp.set_defaults(func=cmd_export)
    return p


def _apply_limits(items: Sequence[str]) -> None:
    for item in items:
        name, _, value = item.partition("=")
        if not hasattr(LIMITS, name) or not value.isdigit():
            raise UsageError(f"bad limit override {item!r}")
        setattr(LIMITS, name, int(value))


def _report(exc: Exception, code: int, as_json: bool, err) -> int:
    if as_json:
        doc = {"schema": SCHEMA, "error": type(exc).__name__, "message": str(exc), "exit": code}
        w = getattr(exc, "witness", None)
        if w is not None:
            doc["witness"] = w if isinstance(w, (list, str)) else repr(w)
        err.write(json.dumps(doc, sort_keys=True) + "\n")
    else:
        err.write(f"connsys: {exc}\n")
    return code


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    as_json = "--json-errors" in argv
    saved = LIMITS.__dict__.copy()
    try:
        args = build_parser().parse_args(argv)
        _apply_limits(args.limit)
        return args.func(args, _Out(stdout))
    except (UsageError, PreconditionError) as exc:
        return _report(exc, EXIT_USAGE, as_json, stderr)
    except SizeLimitError as exc:
        return _report(exc, EXIT_LIMIT, as_json, stderr)
    except ValidationError as exc:
        return _report(exc, EXIT_VIOLATION, as_json, stderr)
    except SystemExit as exc:
        return int(exc.code or 0)
    finally:
        LIMITS.__dict__.update(saved)


def main() -> None:
    sys.exit(run())
