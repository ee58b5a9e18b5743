"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line for its criterion. Run
``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from connsys import bits  # noqa: E402
from connsys.branchdec import AtomFamily, branch_width, edge_trisection_blocks, exactify, trisection_upper_bound, width  # noqa: E402
from connsys.canonical import canonical_decomposition, canonicity_test, check_td, check_tn  # noqa: E402
from connsys.core import check_properties  # noqa: E402
from connsys.duality import branch_width_via_tangles, duality_check  # noqa: E402
from connsys.formats import load  # noqa: E402
from connsys.graphbridge import branchdec_to_treedec, mu_branchdec_from_kappa, treedec_to_branchdec, treewidth  # noqa: E402
from connsys.instances import (  # noqa: E402
    cut_rank,
    cut_rank_matrix,
    edge_connectivity,
    hypergraph_cover_function,
    matching_connectivity,
    vector_connectivity,
    vertex_connectivity,
)
from connsys.tangles import (  # noqa: E402
    TouchingFamily,
    enumerate_g_tangles,
    enumerate_tangles,
    g_tangle_from_kappa,
    g_tangle_from_touching,
    is_g_tangle,
    is_tangle,
    is_well_linked,
    kappa_tangle_from_g,
    min_vertex_cover_size,
    minimum_cover,
    touches_triplewise,
    touching_from_g_tangle,
)

from _corpus import (  # noqa: E402
    CUTRANK,
    CUTRANK_MATRIX,
    EXADEC,
    EXADEC2,
    FIXTURES,
    GRAPH_SYSTEMS,
    VECTOR_DEC_B,
    VECTOR_LABELS,
    atlas,
    complete,
    connected_graphs,
    cycle,
    graph,
    nested_decomposition,
    path,
    random_pre_decomposition,
    random_system,
    rankdec_decomposition,
    vector_family,
)

TITLES = {
    1: "exact fixture values",
    2: "duality suite on graphs with at most 5 vertices",
    3: "inequality suite on connected graphs with at most 7 vertices",
    4: "exactness suite on 1000 random pre-decompositions",
    5: "tangle-axiom suite on universes of size at most 8",
    6: "canonical suite with 100 relabelings per instance",
    7: "graph-tangle correspondence and touching families",
}


def _require(cond, msg):
    if not cond:
        raise AssertionError(msg)


# ---------------------------------------------------------------- criterion 1


def criterion_1() -> str:
    t0 = time.perf_counter()
    vec = vector_connectivity(vector_family())
    _require(branch_width(vec).value == 1, "vector family: bw != 1")
    _require(width(nested_decomposition(VECTOR_LABELS, VECTOR_DEC_B), vec) == 2, "second decomposition width != 2")

    x = bits.from_indices(CUTRANK.vertices.index(v) for v in "abc")
    _require(cut_rank_matrix(CUTRANK, x).to_lists() == CUTRANK_MATRIX, "cut-rank matrix differs")
    _require(cut_rank(CUTRANK).evaluate(x) == 2, "cut rank of {a,b,c} != 2")

    d = rankdec_decomposition(CUTRANK)
    widths = tuple(width(d, f(CUTRANK)) for f in (edge_connectivity, matching_connectivity, cut_rank))
    _require(widths == (8, 3, 2), f"rank decomposition widths {widths}")

    for n in range(1, 8):
        g = complete(n)
        nu, mu, rho = edge_connectivity(g), matching_connectivity(g), cut_rank(g)
        full = (1 << n) - 1
        for s in range(1 << n):
            a = bits.popcount(s)
            b = n - a
            _require(nu.evaluate(s) == a * b, f"K{n}: nu")
            _require(mu.evaluate(s) == min(a, b), f"K{n}: mu")
            _require(rho.evaluate(s) == (0 if s in (0, full) else 1), f"K{n}: rho")

    _, h = load(FIXTURES / "h0.hyp")
    cover = hypergraph_cover_function(h)
    idx = lambda labels: bits.from_indices(h.vertices.index(v) for v in labels)  # noqa: E731
    xs, ys = idx("14"), idx("24")
    vals = (cover.evaluate(xs), cover.evaluate(ys), cover.evaluate(xs & ys), cover.evaluate(xs | ys))
    _require(vals == (1, 1, 1, 2), f"H0 values {vals}")
    _require(vals[0] + vals[1] < vals[2] + vals[3], "H0 pair is not a violation")
    _require(not check_properties(cover).submodular, "H0 cover passes submodularity")

    elapsed = time.perf_counter() - t0
    _require(elapsed < 1.0, f"took {elapsed:.2f}s")
    return f"{elapsed:.2f}s"


# ---------------------------------------------------------------- criterion 2


def criterion_2() -> str:
    singletons = AtomFamily.singletons()
    checks = 0
    for g in atlas(5):
        for name, make in sorted(GRAPH_SYSTEMS.items()):
            sys_ = make(g)
            bw = branch_width(sys_).value
            _require(branch_width_via_tangles(sys_) == bw, f"{name} on {g.edges}: bw mismatch")
            for k in range(1, bw + 2):
                v = duality_check(sys_, singletons, k)
                _require((v.decomposition is None) != (v.tangle is None), f"{name} k={k}: not exactly one witness")
                if v.tangle is not None:
                    _require(is_tangle(sys_, v.tangle) and v.tangle.order == k, f"{name} k={k}: bad tangle")
                    _require(not any(x in singletons for x in v.tangle.members), f"{name} k={k}: tangle meets atoms")
                    _require(k <= bw, f"{name} k={k}: tangle above bw")
                else:
                    _require(width(v.decomposition, sys_) < k, f"{name} k={k}: decomposition too wide")
                    _require(all(a in singletons for a in v.decomposition.atoms()), f"{name} k={k}: bad atoms")
                    _require(k > bw, f"{name} k={k}: decomposition below bw")
                checks += 1
    return f"{checks} verdicts"


# ---------------------------------------------------------------- criterion 3


def _has_degree_two(g) -> bool:
    return any(g.degree(v) == 2 for v in range(g.n))


def criterion_3() -> str:
    count = 0
    for n in range(1, 8):
        for g in connected_graphs(n):
            count += 1
            nu, mu, rho, kappa = edge_connectivity(g), matching_connectivity(g), cut_rank(g), vertex_connectivity(g)
            for x in range(1 << n):
                _require(rho.evaluate(x) <= mu.evaluate(x) <= nu.evaluate(x), f"chain fails on {g.edges}")
            bk = branch_width(kappa)
            tw, td = treewidth(g)
            _require(bk.value <= tw + 1 <= max(Fraction(3, 2) * bk.value, 2), f"tw/bw bounds fail on {g.edges}")
            if g.m:
                bd = treedec_to_branchdec(g, td)
                _require(width(bd, kappa) <= tw + 1, f"tw2bw witness too wide on {g.edges}")
                back = branchdec_to_treedec(g, bk.witness)
                back.validate(g)
                _require(back.width + 1 <= max(Fraction(3, 2) * bk.value, 2), f"bw2tw witness too wide on {g.edges}")
            bm = branch_width(mu).value
            if _has_degree_two(g):
                _require(bm <= bk.value <= 2 * bm, f"mu/kappa bounds fail on {g.edges}")
                md = mu_branchdec_from_kappa(g, bk.witness)
                _require(width(md, mu) <= bk.value, f"mu-from-kappa witness too wide on {g.edges}")
            third = math.ceil(n / 3)
            for sys_ in (mu, rho):
                cert = trisection_upper_bound(sys_)
                _require(cert.value <= third, f"vertex trisection bound fails on {g.edges}")
                _require(width(cert.witness, sys_) == cert.value, "trisection witness width")
            if g.m >= 1:
                cert = trisection_upper_bound(kappa, edge_trisection_blocks(g))
                _require(cert.value <= math.ceil(2 * n / 3), f"edge trisection bound fails on {g.edges}")
                _require(width(cert.witness, kappa) == cert.value, "edge trisection witness width")
    return f"{count} graphs"


# ---------------------------------------------------------------- criterion 4


def criterion_4() -> str:
    rng = random.Random(2024)
    steps = 0
    done = 0
    while done < 1000:
        sys_ = random_system(rng, rng.randint(2, 8))
        if sys_.n < 1 or sys_.n > 8 or not check_properties(sys_).is_connectivity_function:
            continue
        d = random_pre_decomposition(rng, sys_.n)
        trace = []
        out = exactify(d, sys_, trace)
        out.validate(exact=True)
        _require(out.is_exact(), "output not exact")
        _require(width(out, sys_) <= width(d, sys_), "width increased")
        for t in out.leaves():
            _require(out.cones[t] & ~d.cones[t] == 0, "leaf cone grew")
        ms = [s.measure for s in trace]
        _require(all(b < a for a, b in zip(ms, ms[1:])), "measure did not decrease")
        steps += len(trace)
        done += 1
    return f"{done} runs, {steps} steps"


# ---------------------------------------------------------------- criterion 5


def _tangle_suite_systems():
    for g in atlas(5):
        for name in ("nu", "mu", "rho"):
            yield name, g, GRAPH_SYSTEMS[name](g)
    for g in atlas(6):
        if 1 <= g.m <= 8:
            yield "kappa", g, vertex_connectivity(g)


def _check_tangle(sys_, t, g=None):
    k, full, val = t.order, sys_.full, sys_.valence()
    table = [sys_.evaluate(x) for x in range(full + 1)]
    members = t.members
    _require(is_tangle(sys_, t), "axioms")
    for x in members:
        rest = full & ~x
        for add in bits.submask_array(rest).tolist():
            y = x | add
            if table[y] < k:
                _require(y in members, "closure under supersets")
    ms = sorted(members)
    for i, x in enumerate(ms):
        for y in ms[i:]:
            if table[x & y] < k:
                _require(x & y in members, "closure under intersections")
    small = [x for x in range(full + 1) if all(table[z] < k for z in bits.submask_array(x).tolist())]
    for x in small:
        _require(full ^ x in members, "small-set complement")
    if val:
        for x in range(full + 1):
            if bits.popcount(x) * val < k:
                _require(full ^ x in members, "small-set corollary (cardinality)")
    if g is not None:
        for x in range(full + 1):
            if bits.popcount(g.edge_vertex_mask(x)) < k:
                _require(full ^ x in members, "small-set corollary (vertices)")
    s = minimum_cover(sys_, t)
    size = bits.popcount(s)
    _require(all(x & s for x in members), "minimum cover misses a member")
    _require(size <= k and (k == 0 or size * val >= k), "cover bounds")
    _require(is_well_linked(sys_, s), "minimum cover is not well-linked")


def criterion_5() -> str:
    tangles = 0
    systems = 0
    for name, g, sys_ in _tangle_suite_systems():
        systems += 1
        for k in itertools.count(1):
            ts = enumerate_tangles(sys_, k)
            if not ts:
                break
            for t in ts:
                _check_tangle(sys_, t, g if name == "kappa" else None)
                tangles += 1
    rng = random.Random(5)
    for _ in range(40):
        sys_ = random_system(rng, rng.randint(6, 8))
        systems += 1
        for k in itertools.count(1):
            ts = enumerate_tangles(sys_, k)
            if not ts:
                break
            for t in ts:
                _check_tangle(sys_, t)
                tangles += 1
    return f"{tangles} tangles over {systems} systems"


# ---------------------------------------------------------------- criterion 6


def canonical_corpus():
    out = {f"P{n}": path(n) for n in range(2, 8)}
    out.update({f"C{n}": cycle(n) for n in range(3, 9)})
    out["K4"] = complete(4)
    out["K5"] = complete(5)
    out["triangles sharing a vertex"] = graph("a-b b-c c-a c-d d-e e-c")
    out["triangles joined by an edge"] = graph("a-b b-c c-a c-d d-e e-f f-d")
    out["triangles sharing an edge"] = graph("a-b b-c c-a b-d c-d")
    out["exadec"] = EXADEC
    out["exadec2"] = EXADEC2
    return out


def criterion_6(relabelings: int = 100) -> str:
    rng = random.Random(7)
    for name, g in canonical_corpus().items():
        k = vertex_connectivity(g)
        s, dec = canonical_decomposition(k)
        s.validate()
        check_tn(k, dec.tangles, s)
        check_td(k, dec)
        _require(dec.tree.separations() == set(s.members), f"{name}: tree separations differ")
        if k.n >= 2:
            _require(len(dec.tangles) <= k.n - 1, f"{name}: too many maximal tangles")
        s2, dec2 = canonical_decomposition(vertex_connectivity(g))
        _require(s2 == s and dec2.tree.parent == dec.tree.parent and dec2.tree.bags == dec.tree.bags
                 and dec2.tau == dec.tau and dec2.tangles == dec.tangles, f"{name}: re-run differs")
        for _ in range(relabelings):
            perm = list(range(k.n))
            rng.shuffle(perm)
            _require(canonicity_test(k, perm), f"{name}: relabeling {perm} breaks canonicity")
    return f"{len(canonical_corpus())} instances"


# ---------------------------------------------------------------- criterion 7


EXCEPTIONAL = {
    "i": (graph("a-b b-c c-a", "z"), 1),
    "ii": (graph("a-b"), 1),
    "iii": (graph("a-b b-c c-a c-d"), 2),
}


def _connected_sets(g) -> list[int]:
    return [x for x in range(1, 1 << g.n) if len(g.components(x)) == 1]


def criterion_7() -> str:
    seen_cases = set()
    rng = random.Random(11)
    corpus = atlas(5) + [g for g, _ in EXCEPTIONAL.values()]
    pairs = 0
    for g in corpus:
        kappa = vertex_connectivity(g)
        sets = _connected_sets(g)
        for k in range(0, g.n + 2):
            gts = enumerate_g_tangles(g, k)
            kts = enumerate_tangles(kappa, k)
            images = []
            for s in gts:
                res = kappa_tangle_from_g(g, s)
                if res.tangle is None:
                    seen_cases.add(res.case)
                else:
                    _require(g_tangle_from_kappa(g, res.tangle) == s, "G-tangle round trip")
                    images.append(res.tangle)
                if k >= 1:
                    fam = touching_from_g_tangle(g, s)
                    _require(touches_triplewise(g, fam) and min_vertex_cover_size(g, fam) >= k, "Reed forward")
                    _require(g_tangle_from_touching(g, fam, k) == s, "Reed round trip")
            for t in kts:
                s = g_tangle_from_kappa(g, t)
                _require(s in gts, "kappa tangle image is not enumerated")
                _require(kappa_tangle_from_g(g, s).tangle == t, "kappa round trip")
                pairs += 1
            _require(sorted(images, key=lambda t: sorted(t.members)) == kts, "images differ from kappa tangles")
            # Reed backward: random touching families give G-tangles of their cover order
            if k >= 1 and sets:
                for _ in range(10):
                    fam = TouchingFamily(rng.sample(sets, rng.randint(1, min(5, len(sets)))))
                    if not touches_triplewise(g, fam) or min_vertex_cover_size(g, fam) < k:
                        continue
                    s = g_tangle_from_touching(g, fam, k)
                    _require(is_g_tangle(g, s) and s in gts, "Reed backward")
    for case, (g, k) in EXCEPTIONAL.items():
        res = [kappa_tangle_from_g(g, s).case for s in enumerate_g_tangles(g, k)]
        _require(case in res, f"exceptional case {case} not produced by its fixture")
    _require(seen_cases == {"i", "ii", "iii"}, f"exceptional cases seen: {sorted(seen_cases)}")
    return f"{len(corpus)} graphs, {pairs} kappa tangles"


# ---------------------------------------------------------------- harness


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6, 7: criterion_7}


def evaluate(n: int) -> tuple[bool, str]:
    t0 = time.perf_counter()
    try:
        detail = CRITERIA[n]()
        ok = True
    except Exception as exc:  # report any failure as FAIL with its message
        detail = f"{type(exc).__name__}: {exc}"
        ok = False
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {TITLES[n]} ({detail}; {time.perf_counter() - t0:.1f}s)"
    return ok, line


def _run_criterion(n, capsys):
    ok, line = evaluate(n)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def test_criterion_1(capsys):
    _run_criterion(1, capsys)


def test_criterion_2(capsys):
    _run_criterion(2, capsys)


def test_criterion_3(capsys):
    _run_criterion(3, capsys)


def test_criterion_4(capsys):
    _run_criterion(4, capsys)


def test_criterion_5(capsys):
    _run_criterion(5, capsys)


def test_criterion_6(capsys):
    _run_criterion(6, capsys)


def test_criterion_7(capsys):
    _run_criterion(7, capsys)


if __name__ == "__main__":
    results = [evaluate(n) for n in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
