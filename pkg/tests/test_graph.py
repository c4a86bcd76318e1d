import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gibbs_spectral.errors import GraphFormatError, ResourceLimitError
from gibbs_spectral.graph import (Graph, SawWalk, complete_graph,
                                  connective_constant_k, count_walks,
                                  cycle_graph, enumerate_saws, load_edge_list,
                                  path_graph, saw_count_sup, star_graph)


def test_saw_walk_basics():
    w = SawWalk((0, 1, 2))
    assert w.length == 2 and w.start == 0 and w.end == 2
    assert w.reverse() == SawWalk((2, 1, 0))
    assert w.reverse().reverse() == w
    with pytest.raises(ValueError):
        SawWalk((0, 1, 0))


def test_graph_validation():
    with pytest.raises(GraphFormatError):
        Graph.from_edges(3, [(0, 0)])
    with pytest.raises(GraphFormatError):
        Graph.from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(GraphFormatError):
        Graph.from_edges(2, [(0, 5)])
    with pytest.raises(GraphFormatError):
        Graph.from_edges(4, [(0, 1), (2, 3)])  # disconnected
    g = Graph.from_edges(4, [(0, 1), (2, 3)], require_connected=False)
    assert not g.is_connected()


def test_enumerate_saws_examples():
    # A cycle admits exactly the two directions.
    assert len(enumerate_saws(cycle_graph(4), 0, 2)) == 2
    # Complete graph on 4 vertices: 3 * 2 walks of length 2.
    assert len(enumerate_saws(complete_graph(4), 0, 2)) == 6
    # Length zero is the vertex itself.
    assert enumerate_saws(path_graph(3), 1, 0) == [SawWalk((1,))]


def test_enumerate_saws_order_and_validity():
    g = complete_graph(4)
    walks = enumerate_saws(g, 0, 3)
    assert walks == sorted(walks)
    for w in walks:
        assert w.is_walk_in(g)
        assert len(set(w)) == len(w)


def test_saw_count_sup_examples():
    assert saw_count_sup(cycle_graph(6), 3) == 2
    assert saw_count_sup(complete_graph(4), 2) == 6
    # Star with 3 leaves: from a leaf, leaf -> center -> other leaf.
    assert saw_count_sup(star_graph(3), 2) == 2


def test_connective_constant_examples():
    assert connective_constant_k(cycle_graph(8), 3) == pytest.approx(2 ** (1 / 3))
    assert connective_constant_k(complete_graph(4), 2) == pytest.approx(np.sqrt(6))
    g = star_graph(3)
    assert connective_constant_k(g, 1) == pytest.approx(g.max_degree)
    with pytest.raises(ValueError):
        connective_constant_k(complete_graph(2), 2)  # no walks of length 2


def test_count_walks_examples():
    k2 = complete_graph(2)
    assert count_walks(k2, 0, 1, 1) == 1
    assert count_walks(k2, 0, 0, 2) == 1
    c4 = cycle_graph(4)
    assert count_walks(c4, 0, 2, 2) == 2


def test_count_walks_matches_matrix_power(catalog_small):
    from gibbs_spectral.spectral import adjacency_matrix

    for g in catalog_small:
        a = adjacency_matrix(g).data
        power = np.eye(g.n, dtype=np.int64)
        for l in range(5):
            u, w = 0, g.n - 1
            assert count_walks(g, u, w, l) == power[u, w]
            power = power @ a


def test_saw_cap():
    with pytest.raises(ResourceLimitError):
        enumerate_saws(complete_graph(7), 0, 5, cap=10)


def test_degree_bound_on_saw_counts(catalog_small):
    for g in catalog_small:
        d = g.max_degree
        for k in (1, 2, 3):
            if d == 0:
                continue
            bound = d * max(d - 1, 1) ** (k - 1)
            for v in g.vertices():
                assert len(enumerate_saws(g, v, k)) <= bound


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=2, max_value=7), st.integers(min_value=0, max_value=4),
       st.randoms(use_true_random=False))
def test_saws_property(n, k, rnd):
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rnd.random() < 0.6]
    try:
        g = Graph.from_edges(n, edges)
    except GraphFormatError:
        return
    for w in enumerate_saws(g, 0, k):
        assert w.is_walk_in(g)
        assert w.length == k


def test_load_edge_list(tmp_path):
    p = tmp_path / "g.edges"
    p.write_text("# a comment\n4 4\n0 1\n1 2\n2 3\n3 0\n")
    g = load_edge_list(p)
    assert g.n == 4 and g.m == 4
    assert g.relabeling == ()

    bad = tmp_path / "bad.edges"
    bad.write_text("4 2\n0 1\n")
    with pytest.raises(GraphFormatError):
        load_edge_list(bad)

    gappy = tmp_path / "gappy.edges"
    gappy.write_text("3 3\n10 20\n20 30\n30 10\n")
    g2 = load_edge_list(gappy)
    assert g2.n == 3 and dict(g2.relabeling) == {10: 0, 20: 1, 30: 2}


def test_distance():
    g = path_graph(5)
    assert g.distance(0, 4) == 4
    assert g.distance(2, 2) == 0
