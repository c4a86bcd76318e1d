import numpy as np
import pytest

from gibbs_spectral.errors import ResourceLimitError
from gibbs_spectral.graph import (SawWalk, complete_graph, cycle_graph,
                                  path_graph, star_graph)
from gibbs_spectral.spectral import (LabeledMatrix, adjacency_matrix,
                                     hk_power_root_norm, involution_r,
                                     knb_matrix, matrix_power_int, sigma_kl,
                                     spectral_radius_sym, spectral_report)


def test_labeled_matrix_contract():
    m = LabeledMatrix(["a", "b"], ["x", "y"], np.arange(4).reshape(2, 2))
    assert m.get("b", "x") == 2
    with pytest.raises(ValueError):
        LabeledMatrix(["a", "a"], ["x", "y"], np.zeros((2, 2)))
    with pytest.raises(ValueError):
        LabeledMatrix(["a"], ["x"], np.zeros((2, 2)))


def test_adjacency_matrix_examples():
    assert np.array_equal(adjacency_matrix(complete_graph(2)).data,
                          [[0, 1], [1, 0]])
    c3 = adjacency_matrix(complete_graph(3)).data
    assert np.array_equal(c3, np.ones((3, 3)) - np.eye(3))
    p3 = adjacency_matrix(path_graph(3)).data
    assert np.array_equal(p3, [[0, 1, 0], [1, 0, 1], [0, 1, 0]])


def test_spectral_radius_examples():
    for n in (3, 4, 5, 6):
        assert spectral_radius_sym(adjacency_matrix(cycle_graph(n))) == pytest.approx(2, abs=1e-9)
    for n in (2, 3, 4, 5):
        assert spectral_radius_sym(adjacency_matrix(complete_graph(n))) == pytest.approx(n - 1, abs=1e-9)
    # Star: bipartite with eigenvalues +-sqrt(leaves); the shifted iteration
    # must handle the magnitude tie.
    assert spectral_radius_sym(adjacency_matrix(star_graph(3))) == pytest.approx(np.sqrt(3), abs=1e-9)


def test_spectral_radius_against_dense_oracle(catalog_small):
    for g in catalog_small:
        a = adjacency_matrix(g).data.astype(float)
        oracle = float(np.max(np.abs(np.linalg.eigvalsh(a)))) if g.n else 0.0
        assert spectral_radius_sym(a) == pytest.approx(oracle, abs=1e-8)


def test_spectral_radius_rejects_asymmetric():
    with pytest.raises(ValueError):
        spectral_radius_sym(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_perron_vector():
    rho, vec = spectral_radius_sym(adjacency_matrix(cycle_graph(5)), want_vector=True)
    assert rho == pytest.approx(2, abs=1e-9)
    assert np.all(vec > 0)
    assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-9)


def test_rho_between_sqrt_delta_and_delta(catalog_small):
    for g in catalog_small:
        if g.n < 2:
            continue
        rho = spectral_radius_sym(adjacency_matrix(g))
        d = g.max_degree
        assert np.sqrt(d) - 1e-9 <= rho <= d + 1e-9


def test_knb_matrix_hashimoto_cycle():
    h = knb_matrix(cycle_graph(5), 1)
    # Every directed edge of a cycle has exactly one non-backtracking successor.
    assert np.array_equal(h.data.sum(axis=1), np.ones(10, dtype=np.int64))
    assert np.array_equal(h.data.sum(axis=0), np.ones(10, dtype=np.int64))


def test_knb_matrix_path_example():
    h = knb_matrix(path_graph(3), 1)
    assert h.shape == (4, 4)
    assert h.data.sum() == 2
    assert h.get(SawWalk((0, 1)), SawWalk((1, 2))) == 1
    assert h.get(SawWalk((2, 1)), SawWalk((1, 0))) == 1


def test_knb_matrix_shift_rule():
    # Consecutive shifts chain but a double shift is not one step.
    g = path_graph(5)
    h = knb_matrix(g, 3)
    p = SawWalk((0, 1, 2, 3))
    q = SawWalk((1, 2, 3, 4))
    assert h.get(p, q) == 1
    h2 = knb_matrix(cycle_graph(6), 3)
    p = SawWalk((0, 1, 2, 3))
    q = SawWalk((1, 2, 3, 4))
    r = SawWalk((2, 3, 4, 5))
    assert h2.get(p, q) == 1 and h2.get(q, r) == 1 and h2.get(p, r) == 0


def test_knb_empty_error():
    with pytest.raises(ValueError):
        knb_matrix(complete_graph(2), 2)
    with pytest.raises(ResourceLimitError):
        knb_matrix(complete_graph(6), 2, cap_labels=5)


def test_involution():
    h = knb_matrix(complete_graph(3), 1)
    r = involution_r(h.row_labels)
    assert np.array_equal(r.data @ r.data, np.eye(r.shape[0], dtype=np.int64))
    assert np.trace(r.data) == 0  # no walk of positive length is its own reverse
    with pytest.raises(ValueError):
        involution_r([SawWalk((0, 1))])


def test_pt_invariance(catalog_small):
    for g in catalog_small:
        for k in (1, 2):
            try:
                h = knb_matrix(g, k)
            except ValueError:
                continue
            r = involution_r(h.row_labels).data
            power = np.eye(h.shape[0], dtype=np.int64)
            for _ in range(4):
                power = power @ h.data
                hr = power @ r
                assert np.array_equal(hr, hr.T)


def test_sigma_examples():
    # Permutation matrix: all singular values are one.
    for l in (1, 2, 5):
        assert sigma_kl(cycle_graph(5), 1, l) == pytest.approx(1.0, abs=1e-9)
    # K4 Hashimoto: dense SVD oracle.
    h = knb_matrix(complete_graph(4), 1).data.astype(float)
    oracle = float(np.linalg.svd(h, compute_uv=False)[0])
    assert sigma_kl(complete_graph(4), 1, 1) == pytest.approx(oracle, abs=1e-8)
    assert oracle == pytest.approx(2.0, abs=1e-9)


def test_sigma_matches_svd_oracle(catalog_small):
    for g in catalog_small:
        try:
            h = knb_matrix(g, 1)
        except ValueError:
            continue
        power = np.eye(h.shape[0], dtype=np.int64)
        for l in (1, 2, 3):
            power = power @ h.data
            oracle = float(np.linalg.svd(power.astype(float), compute_uv=False)[0])
            assert sigma_kl(g, 1, l) == pytest.approx(oracle, abs=1e-7)


def test_hk_power_root_norm():
    assert hk_power_root_norm(cycle_graph(6), 1, 5) == pytest.approx(1.0, abs=1e-9)
    assert hk_power_root_norm(complete_graph(4), 1, 1) == pytest.approx(2.0, abs=1e-9)


def _count_knb_walks(g, k, l, p, q):
    """DFS oracle: k-non-backtracking walks of length l from walk p to walk q."""
    total = 0
    stack = [tuple(p)]

    def rec(walk):
        nonlocal total
        if len(walk) == k + 1 + l:
            if walk[-(k + 1):] == tuple(q):
                total += 1
            return
        for y in g.adjacency[walk[-1]]:
            window = walk[-(k + 1):] + (y,)
            if len(set(window)) == len(window):
                rec(walk + (y,))

    rec(tuple(p))
    return total


def test_knb_powers_count_walks():
    for g in (cycle_graph(5), complete_graph(4), path_graph(5), star_graph(3)):
        for k in (1, 2):
            try:
                h = knb_matrix(g, k)
            except ValueError:
                continue
            power = matrix_power_int(h.data, 3)
            labels = h.row_labels
            for i in range(min(4, len(labels))):
                for j in range(min(4, len(labels))):
                    assert power[i, j] == _count_knb_walks(g, k, 3, labels[i], labels[j])


def test_sigma_root_convergence():
    # For fixed N, the root sequence eventually sits below (1+z) sigma_N^(1/N).
    z = 0.1
    for g in (cycle_graph(6), complete_graph(4), path_graph(6)):
        n_ref = 3
        ref = sigma_kl(g, 1, n_ref) ** (1.0 / n_ref)
        ok_from = None
        for l in range(1, 13):
            val = sigma_kl(g, 1, l) ** (1.0 / l)
            if val <= (1 + z) * ref:
                if ok_from is None:
                    ok_from = l
            else:
                ok_from = None
        assert ok_from is not None and ok_from <= 12


def test_spectral_report_serialization():
    rep = spectral_report(cycle_graph(6), 1, 3)
    d = rep.to_json_dict()
    assert set(d) == {"rho_adjacency", "connective_k", "hk_norms", "hk_root_norms"}
    assert d["rho_adjacency"] == pytest.approx(2.0, abs=1e-9)
    assert d["connective_k"] == pytest.approx(2.0, abs=1e-9)
    assert [l for l, _ in d["hk_norms"]] == [1, 2, 3]
    for (_, norm), (_, root) in zip(d["hk_norms"], d["hk_root_norms"]):
        assert norm >= 0 and root >= 0
