import itertools
from fractions import Fraction

import networkx as nx
import pytest

from connsys import bits
from connsys.branchdec import branch_width, to_undirected, width
from connsys.errors import PreconditionError, SizeLimitError, ValidationError
from connsys.graphbridge import (
    GraphTreeDecomposition,
    branchdec_to_treedec,
    least_min_cover,
    mu_branchdec_from_kappa,
    mu_tangle_from_kappa_tangle,
    treedec_to_branchdec,
    treewidth,
)
from connsys.instances import Graph, matching_connectivity, vertex_connectivity
from connsys.tangles import enumerate_tangles, is_tangle

from _corpus import atlas, complete, cycle, graph, grid, path


def _nx_treewidth(g: Graph) -> int:
    """Exact treewidth by brute force over elimination orders."""
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    best = g.n
    for order in itertools.permutations(range(g.n)):
        cur = h.copy()
        w = 0
        for v in order:
            nb = list(cur.neighbors(v))
            w = max(w, len(nb))
            cur.add_edges_from(itertools.combinations(nb, 2))
            cur.remove_node(v)
        best = min(best, w)
    return best


def test_treewidth_of_a_tree():
    assert treewidth(graph("a-b b-c b-d d-e"))[0] == 1


@pytest.mark.parametrize("g,expected", [(complete(4), 3), (cycle(5), 2)])
def test_treewidth_examples(g, expected):
    value, td = treewidth(g)
    assert value == expected == _nx_treewidth(g) == td.width


def test_treewidth_agrees_with_elimination_brute_force():
    for g in atlas(6)[::7]:
        assert treewidth(g)[0] == _nx_treewidth(g)


def test_treewidth_size_limit():
    with pytest.raises(SizeLimitError):
        treewidth(grid(3, 5))


def test_tree_decomposition_validation():
    g = graph("a-b b-c")
    GraphTreeDecomposition([[1], [0]], [0b011, 0b110]).validate(g)
    with pytest.raises(ValidationError):
        GraphTreeDecomposition([[]], [0b011]).validate(g)  # b-c uncovered
    with pytest.raises(ValidationError):
        # the bags holding b are not connected
        GraphTreeDecomposition([[1], [0, 2], [1]], [0b011, 0, 0b110]).validate(g)


def test_k4_treedec_to_branchdec():
    g = complete(4)
    tw, td = treewidth(g)
    bd = treedec_to_branchdec(g, td)
    bd.validate(exact=True)
    assert bd.is_complete()
    assert width(bd, vertex_connectivity(g)) <= tw + 1


def test_single_edge_conversions():
    g = graph("v-w")
    tw, td = treewidth(g)
    bd = treedec_to_branchdec(g, td)
    assert width(bd, vertex_connectivity(g)) <= 2
    back = branchdec_to_treedec(g, bd)
    assert back.bags == [0b11]


def test_c5_conversions():
    g = cycle(5)
    tw, td = treewidth(g)
    k = vertex_connectivity(g)
    assert width(treedec_to_branchdec(g, td), k) <= 3
    assert branch_width(k).value == 2


def test_branchdec_to_treedec_bag_bound():
    for g in atlas(6, min_edges=1)[::5]:
        cert = branch_width(vertex_connectivity(g))
        td = branchdec_to_treedec(g, cert.witness)
        td.validate(g)
        assert td.width + 1 <= max(Fraction(3, 2) * cert.value, 2)


def test_c6_round_trip_keeps_treewidth():
    g = cycle(6)
    td = branchdec_to_treedec(g, branch_width(vertex_connectivity(g)).witness)
    assert td.width == 2 == treewidth(g)[0]


def test_converters_reject_bad_input():
    g = Graph("ab", [])
    with pytest.raises(PreconditionError):
        branchdec_to_treedec(g, None)
    h = cycle(4)
    with pytest.raises(ValidationError):
        treedec_to_branchdec(h, GraphTreeDecomposition([[]], [0b0111]))


def test_mu_branchdec_from_kappa():
    for g in (path(3), cycle(5), complete(4), graph("a-b b-c c-a c-d", "z")):
        cert = branch_width(vertex_connectivity(g))
        d = mu_branchdec_from_kappa(g, cert.witness)
        mu = matching_connectivity(g)
        assert d.is_complete() and d.is_exact()
        assert width(d, mu) <= max(1, cert.value)


def test_mu_branchdec_of_p3_has_width_one():
    g = path(3)
    d = mu_branchdec_from_kappa(g, to_undirected(branch_width(vertex_connectivity(g)).witness))
    assert width(d, matching_connectivity(g)) == 1


def test_matching_graph_degree_one():
    g = graph("a-b c-d")
    assert branch_width(vertex_connectivity(g)).value == 0
    assert branch_width(matching_connectivity(g)).value == 1


def test_least_min_cover_is_lexicographic():
    g = graph("a-b b-c")
    assert least_min_cover(g, 0b11) == 0b010
    assert least_min_cover(g, 0) == 0


def test_mu_tangle_from_k5_kappa_tangle():
    g = complete(5)
    kappa = vertex_connectivity(g)
    ts = enumerate_tangles(kappa, 3)
    assert ts
    for t in ts[:3]:
        out = mu_tangle_from_kappa_tangle(g, t)
        assert out.order == 2 and is_tangle(matching_connectivity(g), out)


def test_mu_tangle_from_order_one():
    g = complete(4)
    t = enumerate_tangles(vertex_connectivity(g), 1)[0]
    out = mu_tangle_from_kappa_tangle(g, t)
    full = (1 << g.n) - 1
    mu = matching_connectivity(g)
    assert out.order == 1
    assert out.members == {x for x in range(full + 1) if mu.evaluate(x) == 0 and x == full}


def test_c6_has_no_order_three_kappa_tangle():
    k = vertex_connectivity(cycle(6))
    assert enumerate_tangles(k, 3) == []
    assert branch_width(k).value == 2


def test_mu_tangle_rejects_even_order():
    g = complete(4)
    t = enumerate_tangles(vertex_connectivity(g), 2)[0]
    with pytest.raises(PreconditionError):
        mu_tangle_from_kappa_tangle(g, t)
