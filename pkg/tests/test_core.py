import itertools
import random

import numpy as np
import pytest

from connsys import LIMITS, bits
from connsys.core import (
    ConnectivitySystem,
    Universe,
    check_properties,
    from_table,
    leftmost_min_separation,
    lipschitz_check,
    min_separations,
)
from connsys.errors import EvaluationError, PreconditionError, SizeLimitError
from connsys.instances import Hypergraph, edge_connectivity, hypergraph_cover_function, vertex_connectivity
from connsys.formats import load

from _corpus import CUTRANK, FIXTURES, complete, graph, random_graph
from connsys.instances import cut_rank


def test_universe_indices_follow_declaration_order():
    u = Universe(["x", "y", "z"])
    assert u.index("z") == 2
    assert u.subset(["x", "z"]) == 0b101
    assert u.complement(0b101) == 0b010
    assert u.labels_of(0b110) == ["y", "z"]


def test_universe_rejects_duplicates_and_unknown_labels():
    with pytest.raises(PreconditionError):
        Universe(["a", "a"])
    with pytest.raises(PreconditionError):
        Universe(["a"]).index("b")


def test_evaluate_k4_pair():
    nu = edge_connectivity(complete(4))
    assert nu.evaluate(nu.universe.subset(["v1", "v2"])) == 4


def test_evaluate_empty_set_is_zero():
    assert edge_connectivity(complete(5)).evaluate(0) == 0


def test_evaluate_cut_rank_figure():
    rho = cut_rank(CUTRANK)
    assert rho.evaluate(rho.universe.subset("abc")) == 2


def test_evaluate_is_memoized_and_deterministic():
    calls = []

    def oracle(x):
        calls.append(x)
        return bits.popcount(x) * (3 - bits.popcount(x))

    sys = ConnectivitySystem(Universe("abc"), oracle)
    assert sys.evaluate(0b011) == sys.evaluate(0b011) == 2
    assert calls.count(0b011) == 1


def test_evaluate_rejects_outside_subsets_and_wraps_oracle_failures():
    sys = ConnectivitySystem(Universe("ab"), lambda x: 1 // 0)
    with pytest.raises(PreconditionError):
        sys.evaluate(0b100)
    with pytest.raises(EvaluationError):
        sys.evaluate(0b01)


@pytest.mark.parametrize("seed", range(5))
def test_graph_edge_connectivity_is_a_connectivity_function(seed):
    g = random_graph(random.Random(seed), 8)
    rep = check_properties(edge_connectivity(g))
    assert rep.is_connectivity_function and rep.posimodular
    assert rep.counterexample is None


def test_h0_cover_function_counterexample():
    _, h = load(FIXTURES / "h0.hyp")
    mu = hypergraph_cover_function(h)
    rep = check_properties(mu)
    assert not rep.submodular
    x, y = rep.witnesses["submodular"]
    assert mu.universe.labels_of(x) == ["1", "4"]
    assert mu.universe.labels_of(y) == ["2", "4"]
    assert (mu.evaluate(x), mu.evaluate(y), mu.evaluate(x & y), mu.evaluate(x | y)) == (1, 1, 1, 2)


def test_empty_universe_is_trivially_fine():
    rep = check_properties(from_table([0]))
    assert rep.is_connectivity_function and rep.valence == 0


def test_properties_are_deterministic():
    _, h = load(FIXTURES / "h0.hyp")
    a = check_properties(hypergraph_cover_function(h)).as_dict()
    b = check_properties(hypergraph_cover_function(h)).as_dict()
    assert a == b


def test_reported_counterexamples_reproduce():
    # symmetric but not submodular: value 1 on the four one- and three-element sets only
    t = [0] * 16
    for x in range(16):
        if bits.popcount(x) in (1, 3):
            t[x] = 1
    sys = from_table(t)
    rep = check_properties(sys)
    assert rep.symmetric and not rep.submodular
    x, y = rep.witnesses["submodular"]
    assert sys.evaluate(x) + sys.evaluate(y) < sys.evaluate(x & y) + sys.evaluate(x | y)


def test_negative_and_asymmetric_values_are_flagged():
    rep = check_properties(from_table([0, -1, 1, 0]))
    assert not rep.nonnegative and not rep.symmetric
    assert not rep.is_connectivity_function


def test_check_properties_refuses_large_universes():
    sys = ConnectivitySystem(Universe(range(LIMITS.exhaustive + 1)), lambda x: 0)
    with pytest.raises(SizeLimitError):
        check_properties(sys)


def test_valence():
    assert check_properties(edge_connectivity(complete(4))).valence == 3


def test_lipschitz_examples():
    nu = edge_connectivity(complete(4))
    u = nu.universe
    assert lipschitz_check(nu, 0b1011, 0b1011)
    assert lipschitz_check(nu, u.subset(["v1"]), u.subset(["v1", "v2"]))


def test_lipschitz_exhaustive_on_random_graphs():
    for seed in range(3):
        nu = edge_connectivity(random_graph(random.Random(seed), 6))
        for x, y in itertools.product(range(64), repeat=2):
            assert lipschitz_check(nu, x, y)


def test_leftmost_trivial():
    nu = edge_connectivity(complete(3))
    assert leftmost_min_separation(nu, 0, 0) == 0


def test_leftmost_on_path_edges():
    k = vertex_connectivity(graph("a-b b-c"))
    assert leftmost_min_separation(k, 0b01, 0b10) == 0b01
    assert k.evaluate(0b01) == 1


def test_leftmost_on_two_triangles():
    g = graph("a-b b-c a-c d-e e-f d-f")
    nu = edge_connectivity(g)
    u = nu.universe
    z = leftmost_min_separation(nu, u.subset("a"), u.subset("d"))
    assert z == u.subset("abc") and nu.evaluate(z) == 0


def test_leftmost_requires_disjoint_sets():
    with pytest.raises(PreconditionError):
        leftmost_min_separation(edge_connectivity(complete(3)), 1, 1)


def test_leftmost_is_below_every_minimum_separation():
    rng = random.Random(7)
    for _ in range(30):
        g = random_graph(rng, 7, 0.45)
        nu = edge_connectivity(g)
        x = 1 << rng.randrange(7)
        y = (1 << rng.randrange(7)) & ~x
        if not y:
            continue
        z = leftmost_min_separation(nu, x, y)
        _, mins = min_separations(nu, x, y)
        assert all(z & ~int(m) == 0 for m in mins)


def test_table_matches_pointwise_evaluation():
    rho = cut_rank(complete(5))
    t = rho.table()
    assert isinstance(t, np.ndarray)
    assert all(int(t[x]) == rho.evaluate(x) for x in range(32))


def test_permuted_system_moves_elements():
    nu = edge_connectivity(graph("a-b b-c"))
    perm = [2, 0, 1]
    p = nu.permuted(perm)
    for x in range(8):
        assert p.evaluate(bits.permute_mask(x, perm)) == nu.evaluate(x)
