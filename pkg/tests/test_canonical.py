import itertools
import random

import pytest

from connsys.canonical import (
    KappaTreeDecomposition,
    NestedSeparationSet,
    TangleTreeDecomposition,
    build_tangle_tree,
    canonical_decomposition,
    canonicity_test,
    check_td,
    check_tn,
    coherent_nested_set,
    contract_at_tangle,
    graph_treedec_from_kappa_treedec,
    nested,
    treedec_from_nested,
)
from connsys.errors import PreconditionError, ValidationError
from connsys.instances import edge_connectivity, vertex_connectivity
from connsys.tangles import enumerate_tangles, min_tangle_separations, tangle_levels

from _corpus import EXADEC, EXADEC2, TRIANGLES, complete, cycle, graph, path

TWO_TRIANGLES = graph("a-b b-c c-a c-d d-e e-c")
FAN = graph("t-m t-n m-n t-o t-p o-p t-q t-r q-r")


def _edges(g, names):
    """Edge mask of the listed 'u-v' pairs."""
    out = 0
    for e in names.split():
        u, v = (g.vertices.index(x) for x in e.split("-"))
        out |= 1 << [frozenset(e) for e in g.edges].index(frozenset((u, v)))
    return out


# ---------------------------------------------------------------- nested sets


def test_nested_relation():
    full = 0b1111
    assert nested(0b0011, 0b0001, full)
    assert nested(0b0011, 0b1100, full)
    assert not nested(0b0011, 0b0110, full)


def test_validator_reports_crossing_pair():
    s = NestedSeparationSet.closure(0b1111, [0b0011, 0b0110])
    with pytest.raises(ValidationError) as err:
        s.validate()
    assert err.value.clause == "nested"
    with pytest.raises(ValidationError) as err:
        NestedSeparationSet(0b1111, [0b0011]).validate()
    assert err.value.clause == "complement"


def test_empty_nested_set_gives_one_node():
    k = vertex_connectivity(cycle(4))
    td = treedec_from_nested(k, NestedSeparationSet(k.full))
    assert td.parent == [-1] and td.bags == [k.full]


def test_single_separation_gives_hub_and_two_leaves():
    k = vertex_connectivity(cycle(4))
    x = 0b0011
    td = treedec_from_nested(k, NestedSeparationSet.closure(k.full, [x]))
    td.validate()
    assert td.parent == [-1, 0, 0] and td.bags[0] == 0
    assert td.separations() == {x, k.full ^ x}


def test_empty_member_gets_an_empty_child():
    k = vertex_connectivity(cycle(4))
    td = treedec_from_nested(k, NestedSeparationSet.closure(k.full, [0]))
    assert td.separations() == {0, k.full}
    assert sorted(td.bags) == [0, k.full]


def test_triangles_star():
    k = vertex_connectivity(TRIANGLES)
    lab = TRIANGLES.edge_labels
    mask = lambda s: sum(1 << lab.index(c) for c in s)  # noqa: E731
    s = NestedSeparationSet.closure(k.full, [mask("bc"), mask("de"), mask("fg")])
    td = treedec_from_nested(k, s)
    assert td.parent == [-1, 0, 0, 0]
    assert td.bags == [mask("a"), mask("bc"), mask("de"), mask("fg")]
    assert td.separations() == set(s.members)
    out = graph_treedec_from_kappa_treedec(TRIANGLES, td)
    assert out.bags == [0b00011, 0b00111, 0b01011, 0b10011]


def test_treedec_rejects_crossing_input():
    k = vertex_connectivity(cycle(4))
    with pytest.raises(ValidationError):
        treedec_from_nested(k, NestedSeparationSet.closure(k.full, [0b0011, 0b0110]))


def test_treedec_round_trip_on_random_nested_sets():
    rng = random.Random(3)
    k = vertex_connectivity(path(8))
    for _ in range(40):
        members = set()
        # grow a laminar family by repeatedly splitting a random member
        pool = [k.full]
        for _ in range(rng.randint(0, 5)):
            x = rng.choice(pool)
            sub = rng.randrange(1, x + 1) & x
            if sub and sub != x:
                members.add(sub)
                pool.remove(x)
                pool += [sub, x & ~sub]
        s = NestedSeparationSet.closure(k.full, members)
        td = treedec_from_nested(k, s)
        td.validate()
        assert td.separations() == set(s.members)


# ---------------------------------------------------------------- tangle-tree decompositions


def test_single_tangle_tree():
    k = vertex_connectivity(complete(4))
    t = enumerate_tangles(k, 3)[0]
    dec = build_tangle_tree(k, [t], NestedSeparationSet(k.full))
    assert len(dec.tree) == 1 and dec.tau == [0] and dec.hubs == []


def test_two_triangles_sharing_a_vertex():
    k = vertex_connectivity(TWO_TRIANGLES)
    ts = enumerate_tangles(k, 2)
    assert len(ts) == 2
    order, ms = min_tangle_separations(k, ts[0], ts[1])
    assert order == 1
    s = NestedSeparationSet.closure(k.full, [_edges(TWO_TRIANGLES, "a-b b-c c-a")])
    dec = build_tangle_tree(k, ts, s)
    assert sorted(dec.tau) == [1, 2] and dec.hubs == [0]
    check_td(k, dec)


def test_tn_violations_are_reported():
    k = vertex_connectivity(TWO_TRIANGLES)
    ts = enumerate_tangles(k, 2)
    with pytest.raises(ValidationError) as err:
        check_tn(k, ts, NestedSeparationSet(k.full))
    assert err.value.clause == "TN1"
    extra = NestedSeparationSet.closure(k.full, [_edges(TWO_TRIANGLES, "a-b b-c c-a"), _edges(TWO_TRIANGLES, "a-b")])
    with pytest.raises(ValidationError) as err:
        check_tn(k, ts, extra)
    assert err.value.clause == "TN2"


def test_build_rejects_comparable_tangles():
    k = vertex_connectivity(complete(4))
    low, high = enumerate_tangles(k, 2)[0], enumerate_tangles(k, 3)[0]
    with pytest.raises(PreconditionError):
        build_tangle_tree(k, [low, high], NestedSeparationSet(k.full))


def test_wrong_tau_fails_td_check():
    k = vertex_connectivity(TWO_TRIANGLES)
    dec = canonical_decomposition(k)[1]
    swapped = TangleTreeDecomposition(dec.tree, dec.tangles, dec.tau[::-1], dec.nested)
    with pytest.raises(ValidationError):
        check_td(k, swapped)


# ---------------------------------------------------------------- coherent families


def test_coherent_singleton_family_is_empty():
    k = vertex_connectivity(complete(4))
    assert len(coherent_nested_set(k, enumerate_tangles(k, 3)[:1])) == 0


def test_fan_family_gives_three_separations():
    k = vertex_connectivity(FAN)
    fam = tangle_levels(k, 2)[2]
    assert len(fam) == 3
    s = coherent_nested_set(k, fam)
    tris = [_edges(FAN, f"t-{u} t-{v} {u}-{v}") for u, v in ("mn", "op", "qr")]
    assert set(s.members) == set(tris) | {k.full ^ x for x in tris}


def test_coherent_output_satisfies_tn_on_random_graphs():
    rng = random.Random(6)
    seen = 0
    for _ in range(30):
        n = rng.randint(4, 7)
        g = graph(" ".join(f"v{u}-v{v}" for u, v in itertools.combinations(range(n), 2) if rng.random() < 0.45))
        if g.m > 10 or g.m == 0:
            continue
        k = vertex_connectivity(g)
        levels = tangle_levels(k, 3)
        for j in range(1, 4):
            by_base = {}
            for t in levels[j]:
                base = frozenset(x for x in t.members if k.evaluate(x) < j - 1)
                by_base.setdefault(base, []).append(t)
            for fam in by_base.values():
                if len(fam) >= 2:
                    s = coherent_nested_set(k, fam)
                    s.validate()
                    check_tn(k, fam, s)
                    seen += 1
    assert seen


def test_coherent_rejects_mixed_orders():
    k = vertex_connectivity(complete(4))
    with pytest.raises(PreconditionError):
        coherent_nested_set(k, [enumerate_tangles(k, 2)[0], enumerate_tangles(k, 3)[0]])


# ---------------------------------------------------------------- contraction


def test_contraction_with_empty_nested_set():
    k = vertex_connectivity(FAN)
    tstar = tangle_levels(k, 2)[1][0]
    con = contract_at_tangle(k, tstar, NestedSeparationSet(k.full))
    assert con.zs == [] and con.system.n == k.n
    assert len(con.extensions) == 3


def test_contraction_rejects_maximal_tangle():
    k = vertex_connectivity(TWO_TRIANGLES)
    with pytest.raises(PreconditionError):
        contract_at_tangle(k, enumerate_tangles(k, 2)[0], NestedSeparationSet(k.full))


def test_minimum_separations_meet_or_avoid():
    for g in (TWO_TRIANGLES, FAN, graph("a-b b-c c-a c-d d-e e-f f-d")):
        k = vertex_connectivity(g)
        levels = tangle_levels(k, 3)
        ts = [t for lv in levels[1:] for t in lv]
        for t, u in itertools.combinations(ts, 2):
            if t.members <= u.members or u.members <= t.members:
                continue
            _, ms = min_tangle_separations(k, t, u)
            for x in ms:
                for y in range(k.full + 1):
                    ky = k.evaluate(y)
                    assert k.evaluate(x & y) <= ky or k.evaluate(x & ~y) <= ky


# ---------------------------------------------------------------- canonical decomposition


def test_single_element_universe():
    k = edge_connectivity(graph("", "a"))
    s, dec = canonical_decomposition(k)
    assert len(s) == 0 and len(dec.tree) == 1
    assert [t.order for t in dec.tangles] == [0]


@pytest.fixture(scope="module")
def exadec():
    k = vertex_connectivity(EXADEC)
    return k, canonical_decomposition(k, 5)


def test_exadec_structure(exadec):
    k, (s, dec) = exadec
    assert sorted(t.order for t in dec.tangles) == [2, 2, 2, 2, 3, 3, 3, 3, 3]
    assert dec.tree.parent == [-1, 0, 0, 1, 1, 1, 1, 2, 2, 2]
    assert dec.hubs == [0]
    assert dec.tree.degree(1) == 5
    red = dec.tangles[dec.tangle_at(1)]
    grey = dec.tangles[dec.tangle_at(2)]
    assert red.order == 3 and grey.order == 2
    assert dec.tree.bags[0] == 0
    check_td(k, dec)
    s.validate()


def test_exadec2_root_is_a_hub():
    k = vertex_connectivity(EXADEC2)
    s, dec = canonical_decomposition(k, 5)
    assert len(dec.tangles) == 8
    assert dec.hubs == [0, 1]
    assert dec.tree.degree(1) == 5
    check_td(k, dec)


CORPUS = {
    "P5": path(5),
    "C5": cycle(5),
    "C6": cycle(6),
    "K4": complete(4),
    "two-triangles": TWO_TRIANGLES,
    "fan": FAN,
}


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_canonical_corpus(name):
    g = CORPUS[name]
    k = vertex_connectivity(g)
    s, dec = canonical_decomposition(k)
    s.validate()
    check_tn(k, dec.tangles, s)
    check_td(k, dec)
    assert dec.tree.separations() == set(s.members)
    assert len(dec.tangles) <= max(1, k.n - 1)


def test_identity_and_c6_automorphisms():
    g = cycle(6)
    k = vertex_connectivity(g)
    assert canonicity_test(k, list(range(k.n)))
    # rotations and reflections of the hexagon, acting on edge indices
    edge_index = {frozenset(e): j for j, e in enumerate(g.edges)}
    for shift, flip in itertools.product(range(6), (False, True)):
        f = lambda v: ((-v if flip else v) + shift) % 6  # noqa: E731
        perm = [edge_index[frozenset((f(u), f(v)))] for u, v in g.edges]
        assert canonicity_test(k, perm)


def test_random_relabelings_small():
    rng = random.Random(1)
    k = vertex_connectivity(TWO_TRIANGLES)
    for _ in range(10):
        perm = list(range(k.n))
        rng.shuffle(perm)
        assert canonicity_test(k, perm)


def test_determinism():
    a = canonical_decomposition(vertex_connectivity(FAN))
    b = canonical_decomposition(vertex_connectivity(FAN))
    assert a[0] == b[0]
    assert a[1].tree.parent == b[1].tree.parent and a[1].tree.bags == b[1].tree.bags
    assert a[1].tau == b[1].tau and a[1].tangles == b[1].tangles


# ---------------------------------------------------------------- graph tree decompositions


def test_single_node_graph_treedec():
    g = complete(4)
    td = KappaTreeDecomposition([-1], [(1 << g.m) - 1], (1 << g.m) - 1)
    assert graph_treedec_from_kappa_treedec(g, td).bags == [(1 << g.n) - 1]


def test_graph_treedec_rejects_wrong_universe():
    g = complete(3)
    with pytest.raises(PreconditionError):
        graph_treedec_from_kappa_treedec(g, KappaTreeDecomposition([-1], [1], 1))
