import numpy as np
import pytest

from gibbs_spectral.extensions import (compatible, domination_matrix_j,
                                       extend_graph, extend_graph_pq,
                                       extended_gibbs, extended_gibbs_pq,
                                       extended_influence_matrix,
                                       structural_matrices, walks_avoiding)
from gibbs_spectral.gibbs import (GibbsSpec, Pinning, influence_matrix_exact)
from gibbs_spectral.graph import (Graph, complete_graph, cycle_graph,
                                  enumerate_saws, path_graph, star_graph)
from gibbs_spectral.regimes import h_sup, h_sup_on_ratio_range

HC1 = GibbsSpec.hardcore(1.0)


def test_extend_star_example():
    g = star_graph(3)
    ext = extend_graph(g, (0, 2))
    assert ext.graph.n == 6
    assert {(s.origin, s.attached) for s in ext.splits} == {(0, 1), (0, 3)}
    for s in ext.splits:
        assert ext.graph.degree(s.index) == 1
    assert (0, 2) in ext.graph.edges
    assert len(ext.removed_edges) == 2


def test_extend_path_noop():
    g = path_graph(4)
    ext = extend_graph(g, (0, 1, 2))
    assert len(ext.splits) == 0
    assert set(ext.graph.edges) == set(g.edges)


def test_split_count_for_length_one():
    g = complete_graph(5)
    ext = extend_graph(g, (0, 1))
    assert len(ext.splits) == g.degree(0) - 1


def test_extend_errors():
    with pytest.raises(ValueError):
        extend_graph(path_graph(3), (0, 2))  # not a walk
    with pytest.raises(ValueError):
        extend_graph(path_graph(3), (1,))  # too short


def test_replay_reproduces():
    g = cycle_graph(6)
    ext = extend_graph(g, (0, 1, 2))
    replayed = ext.replay()
    assert replayed.canonical_edges() == ext.canonical_edges()


def test_pq_order_independence():
    g = cycle_graph(6)
    p, q = (0, 1), (3, 4)
    assert compatible(g, p, q)
    pq = extend_graph_pq(g, p, q)
    qp = extend_graph_pq(g, q, p)
    assert pq.canonical_edges() == qp.canonical_edges()


def test_pq_incompatible_error():
    g = cycle_graph(6)
    with pytest.raises(ValueError):
        extend_graph_pq(g, (0, 1), (1, 2))


def test_disjoint_stars_union():
    # Two far-apart stars joined by a path: the pair extension is the union
    # of the single extensions.
    edges = [(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (5, 6), (5, 7), (5, 8)]
    g = Graph.from_edges(9, edges)
    p, q = (0, 3), (5, 4)
    assert compatible(g, p, q)
    pq = extend_graph_pq(g, p, q)
    ext_p = extend_graph(g, p)
    ext_q = extend_graph(g, q)
    # Split sets are the union of the individual split sets, and the
    # surviving original edges are those that survive both single surgeries.
    names = {(s.origin, s.attached) for s in pq.splits}
    names_p = {(s.origin, s.attached) for s in ext_p.splits}
    names_q = {(s.origin, s.attached) for s in ext_q.splits}
    assert names == names_p | names_q
    assert set(pq.removed_edges) == set(ext_p.removed_edges) | set(ext_q.removed_edges)


def test_split_pin_rule():
    g = star_graph(3)
    eg = extended_gibbs(HC1, g, None, (0, 2))
    pins = {eg.ext.split_label(i): s for i, s in eg.pin.items()}
    # Successor is 2: above neighbor 1, below neighbor 3.
    assert pins[(0, 1)] == 1
    assert pins[(0, 3)] == -1


def test_extended_gibbs_keeps_original_pins():
    g = cycle_graph(6)
    pin = Pinning({3: -1})
    eg = extended_gibbs(HC1, g, pin, (0, 1))
    assert eg.pin.spin(3) == -1
    with pytest.raises(ValueError):
        extended_gibbs(HC1, g, Pinning({0: 1}), (0, 1))


def test_extended_influence_zero_when_incompatible():
    g = cycle_graph(6)
    m = extended_influence_matrix(HC1, g, None, 1)
    for p in m.row_labels:
        for q in m.col_labels:
            if g.distance(p[0], q[0]) < 2:
                assert m.get(p, q) == 0.0
    # Self pairs are incompatible (distance zero).
    p = m.row_labels[0]
    assert m.get(p, p) == 0.0


def test_extended_influence_equals_extension_influence():
    # The walk-level entry is the (w, u) entry of the influence matrix of the
    # extended distribution.
    g = cycle_graph(6)
    spec = HC1
    m = extended_influence_matrix(spec, g, None, 1)
    p, q = (0, 1), (3, 4)
    eg = extended_gibbs_pq(spec, g, None, p, q)
    infl = influence_matrix_exact(spec, eg.ext.graph, eg.pin)
    assert m.get(p, q) == pytest.approx(infl.get(0, 3), abs=1e-12)


def test_structural_matrices():
    g = cycle_graph(6)
    d1, c1, short = structural_matrices(HC1, g, None, 1)
    walks = walks_avoiding(g, None, 1)
    # Row sums of D: number of walks starting at each vertex.
    starts = np.array([sum(1 for w in walks if w.start == v) for v in g.vertices()])
    assert np.array_equal(d1.data.sum(axis=1), starts)
    ends = np.array([sum(1 for w in walks if w.end == v) for v in g.vertices()])
    assert np.array_equal(c1.data.sum(axis=0), ends)
    # The short-range block vanishes outside the distance band.
    infl = influence_matrix_exact(HC1, g)
    for a, u in enumerate(short.row_labels):
        for b, v in enumerate(short.col_labels):
            if g.distance(u, v) >= 2:
                assert short.data[a, b] == 0.0
            else:
                assert short.data[a, b] == infl.data[a, b]


def test_structural_norm_bounds(catalog_small):
    for g in catalog_small[::4]:
        if g.n < 3:
            continue
        d = g.max_degree
        for k in (1, 2):
            if not walks_avoiding(g, None, k):
                continue
            dk, ck, short = structural_matrices(HC1, g, None, k)
            assert np.linalg.norm(dk.data, 2) <= d ** (k / 2) + 1e-6
            assert np.linalg.norm(ck.data, 2) <= d ** (k / 2) + 1e-6
            assert np.linalg.norm(short.data, 2) <= (d ** (2 * k + 1) - 1) / (d - 1) + 1e-6


def test_domination_inequalities():
    # |L| <= J entrywise, and the J norm is below the geometric sum of
    # non-backtracking power norms.
    from gibbs_spectral.spectral import involution_r, knb_matrix

    for g, spec in [
        (cycle_graph(6), HC1),
        (cycle_graph(6), GibbsSpec.ising(2.0, 1.0)),
        (path_graph(6), GibbsSpec.hardcore(0.5)),
    ]:
        k = 1
        if spec.kind == "hard_core":
            delta = h_sup_on_ratio_range(spec, max(g.max_degree + 1, 2))
        else:
            delta = h_sup(spec)
        ell = extended_influence_matrix(spec, g, None, k)
        j = domination_matrix_j(spec, g, None, k, delta)
        assert np.all(np.abs(ell.data) <= j.data + 1e-9)
        assert np.all(j.data >= 0)

        h = knb_matrix(g, k)
        r = involution_r(h.row_labels).data
        power = np.eye(h.shape[0])
        hf = h.data.astype(float)
        total = 0.0
        max_len = g.n - 1  # walks cannot be longer than the vertex count
        for l in range(1, max_len + 1):
            power = power @ hf
            if l >= k:
                total += delta ** (l + k) * np.linalg.norm(power, 2)
        assert np.linalg.norm(j.data, 2) <= total + 1e-6


def test_domination_j_incompatible_zero():
    g = cycle_graph(6)
    j = domination_matrix_j(HC1, g, None, 1, 0.3)
    for p in j.row_labels:
        assert j.get(p, p) == 0.0
