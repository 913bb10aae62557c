import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elpmeans.centrality import (
    DecisionPoint,
    SimilarityMatrix,
    auto_k,
    laplacian_centralities,
    laplacian_energy,
    laplacian_matrix,
    minimum_distances,
    pairwise_distances,
    select_centers,
    similarity_weights,
)
from elpmeans.errors import ConfigError, DegenerateInputError

PATH = SimilarityMatrix.from_weights([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
CLIQUE = SimilarityMatrix.from_weights(np.ones((3, 3)) - np.eye(3))


def energy_by_definition(w):
    """Sum of squared strengths plus twice each squared edge, by explicit loops."""
    n = len(w)
    x = [sum(w[i][j] for j in range(n)) for i in range(n)]
    total = sum(xi * xi for xi in x)
    for i in range(n):
        for j in range(i + 1, n):
            total += 2 * w[i][j] ** 2
    return total


def energy_drop_by_deletion(weights, i):
    keep = [j for j in range(weights.node_count) if j != i]
    reduced = SimilarityMatrix.from_weights(weights.w[np.ix_(keep, keep)])
    return laplacian_energy(weights) - laplacian_energy(reduced)


def random_weights(rng, n):
    pts = rng.normal(size=(n, rng.integers(1, 6)))
    return similarity_weights(pairwise_distances(pts), sigma_multiplier=rng.uniform(0.2, 2.0))


def test_pairwise_distances_345():
    d = pairwise_distances(np.array([[0.0, 0.0], [3.0, 4.0]]))
    assert d[0, 1] == 5.0 and d[1, 0] == 5.0


def test_pairwise_distances_duplicates():
    d = pairwise_distances(np.ones((4, 3)))
    assert np.all(d == 0)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 30), st.integers(1, 6), st.integers(0, 2**31))
def test_distance_matrix_invariants(n, dim, seed):
    x = np.random.default_rng(seed).normal(size=(n, dim))
    d = pairwise_distances(x)
    assert np.array_equal(d, d.T)
    assert np.all(np.diag(d) == 0)
    assert np.all(np.isfinite(d)) and np.all(d >= 0)


def test_kernel_at_zero_distance():
    d = np.array([[0.0, 0.0, 2.0], [0.0, 0.0, 2.0], [2.0, 2.0, 0.0]])
    assert similarity_weights(d).w[0, 1] == 1.0


@pytest.mark.parametrize("t", [0.1, 1.0, 7.5])
def test_equidistant_points(t):
    d = t * (np.ones((3, 3)) - np.eye(3))
    w = similarity_weights(d, sigma_multiplier=1.0).w
    off = w[~np.eye(3, dtype=bool)]
    assert np.allclose(off, math.exp(-0.5), rtol=0, atol=1e-15)
    assert off[0] == pytest.approx(0.60653, abs=1e-5)


def test_coincident_points_are_degenerate():
    with pytest.raises(DegenerateInputError):
        similarity_weights(np.zeros((3, 3)))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2**31), st.floats(0.1, 3.0))
def test_similarity_invariants(n, seed, mult):
    x = np.random.default_rng(seed).normal(size=(n, 3))
    s = similarity_weights(pairwise_distances(x), mult)
    off = ~np.eye(n, dtype=bool)
    assert np.array_equal(s.w, s.w.T)
    assert np.all(np.diag(s.w) == 0)
    assert np.all(s.w[off] > 0) and np.all(s.w[off] <= 1)
    assert np.allclose(s.strength, s.w.sum(axis=1), rtol=0, atol=1e-12)


def test_laplacian_two_nodes():
    s = SimilarityMatrix.from_weights([[0, 1], [1, 0]])
    assert laplacian_matrix(s).tolist() == [[1, -1], [-1, 1]]


def test_laplacian_rows_and_trace():
    s = random_weights(np.random.default_rng(3), 12)
    L = laplacian_matrix(s)
    assert np.allclose(L.sum(axis=1), 0, atol=1e-12)
    assert np.trace(L) == pytest.approx(s.strength.sum(), rel=1e-12)


def test_energy_hand_values():
    assert laplacian_energy(CLIQUE) == 18.0
    assert laplacian_energy(PATH) == 10.0
    assert laplacian_energy(SimilarityMatrix.from_weights([[0.0]])) == 0.0


def test_centrality_path():
    res = laplacian_centralities(PATH)
    assert res.delta_energy.tolist() == [6.0, 10.0, 6.0]
    assert np.allclose(res.c, [0.6, 1.0, 0.6], rtol=0, atol=1e-12)


def test_centrality_clique():
    res = laplacian_centralities(CLIQUE)
    assert np.allclose(res.c, 14 / 18, rtol=0, atol=1e-12)


def test_centrality_matches_brute_force_on_hand_cases():
    for s in (PATH, CLIQUE):
        res = laplacian_centralities(s)
        for i in range(3):
            assert res.delta_energy[i] == pytest.approx(energy_drop_by_deletion(s, i), rel=1e-12)


def test_centrality_degenerate():
    with pytest.raises(DegenerateInputError):
        laplacian_centralities(SimilarityMatrix.from_weights(np.zeros((3, 3))))


@pytest.mark.parametrize("seed", range(20))
def test_energy_oracles(seed):
    rng = np.random.default_rng(seed)
    s = random_weights(rng, int(rng.integers(2, 11)))
    L = laplacian_matrix(s)
    e = laplacian_energy(s)
    assert e == pytest.approx(energy_by_definition(s.w.tolist()), rel=1e-9)
    assert e == pytest.approx(np.sum(L * L), rel=1e-9)
    assert e == pytest.approx(np.trace(L @ L), rel=1e-9)
    assert e == pytest.approx(np.sum(np.linalg.eigvalsh(L) ** 2), rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 25), st.integers(0, 2**31))
def test_centrality_in_unit_interval(n, seed):
    s = random_weights(np.random.default_rng(seed), n)
    c = laplacian_centralities(s).c
    assert np.all(c > 0) and np.all(c <= 1)


def test_min_distance_tie_two_nodes():
    d = np.array([[0.0, 1.0], [1.0, 0.0]])
    pts = minimum_distances([0.5, 0.5], d)
    assert pts[0].nearest_higher is None and pts[0].delta == 1.0
    assert pts[1].nearest_higher == 0 and pts[1].delta == 1.0


def test_min_distance_path_by_enumeration():
    # higher sets: node1 -> {} (top), node0 -> {1}, node2 -> {1, 0} (tie broken by id)
    d = np.array([[0.0, 1.0, 2.5], [1.0, 0.0, 2.0], [2.5, 2.0, 0.0]])
    pts = minimum_distances([0.6, 1.0, 0.6], d)
    assert (pts[1].delta, pts[1].nearest_higher) == (2.0, None)
    assert (pts[0].delta, pts[0].nearest_higher) == (1.0, 1)
    assert (pts[2].delta, pts[2].nearest_higher) == (2.0, 1)
    d2 = d.copy()
    d2[0, 2] = d2[2, 0] = 0.5
    pts = minimum_distances([0.6, 1.0, 0.6], d2)
    assert (pts[2].delta, pts[2].nearest_higher) == (0.5, 0)


def test_min_distance_ties_go_to_smaller_id():
    d = np.array([[0, 3, 1, 1], [3, 0, 1, 1], [1, 1, 0, 1], [1, 1, 1, 0]], dtype=float)
    pts = minimum_distances([0.9, 0.8, 0.7, 0.1], d)
    assert pts[3].nearest_higher == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**31))
def test_decision_point_invariants(n, seed):
    x = np.random.default_rng(seed).normal(size=(n, 3))
    d = pairwise_distances(x)
    c = laplacian_centralities(similarity_weights(d)).c
    pts = minimum_distances(c, d)
    assert sum(p.nearest_higher is None for p in pts) == 1
    assert all(p.delta > 0 for p in pts)
    assert all(0 <= p.gamma <= 1 for p in pts)
    for p in pts:
        if p.nearest_higher is not None:
            q = p.nearest_higher
            assert c[q] > c[p.node] or (c[q] == c[p.node] and q < p.node)
            assert p.delta == d[p.node, q]


def _points(gammas):
    return [DecisionPoint(i, 0.0, 1.0, g, None if i == 0 else 0) for i, g in enumerate(gammas)]


def test_auto_k_gap_ratio():
    gammas = [0.9, 0.8, 0.05, 0.04, 0.03, 0.02, 0.015, 0.01, 0.008, 0.0]
    # ratios 1.125, 16, 1.25, 1.33 within the ceil(sqrt(10)) = 4 cap
    assert auto_k(gammas) == 2
    cs = select_centers(_points(gammas), np.eye(10))
    assert cs.centers == (0, 1) and cs.k == 2


def test_auto_k_cap_ignores_tail_gap():
    gammas = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.0]
    # in-range ratios 1.11, 1.125, 1.14, 1.17 grow; the 0.2 / eps gap sits past the cap
    assert auto_k(gammas) == 4
    assert auto_k(gammas, max_k=9) == 9


def test_select_centers_fixed_k_and_order():
    gammas = [0.2, 0.9, 0.9, 0.1]
    cs = select_centers(_points(gammas), np.arange(8.0).reshape(4, 2), k=3)
    assert cs.centers == (1, 2, 0)
    assert cs.centroids.tolist() == [[2, 3], [4, 5], [0, 1]]


def test_select_all_and_range_errors():
    pts = _points([0.5, 0.4, 0.3])
    assert select_centers(pts, np.eye(3), k=3).centers == (0, 1, 2)
    for bad in (0, 4):
        with pytest.raises(ConfigError):
            select_centers(pts, np.eye(3), k=bad)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2**31), st.data())
def test_fixed_k_returns_k_distinct(n, seed, data):
    k = data.draw(st.integers(1, n))
    x = np.random.default_rng(seed).normal(size=(n, 2))
    d = pairwise_distances(x)
    pts = minimum_distances(laplacian_centralities(similarity_weights(d)).c, d)
    cs = select_centers(pts, x, k=k)
    assert cs.k == k == len(set(cs.centers))


def _decide(x, k=None):
    d = pairwise_distances(x)
    c = laplacian_centralities(similarity_weights(d)).c
    pts = minimum_distances(c, d)
    return c, pts, select_centers(pts, x, k=k)


@pytest.mark.parametrize("seed", range(10))
def test_permutation_equivariance(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(30, 4))
    perm = rng.permutation(30)  # new row r holds old row perm[r]
    c, pts, cs = _decide(x, k=3)
    c2, pts2, cs2 = _decide(x[perm], k=3)
    assert np.allclose(c2, c[perm], rtol=1e-12)
    assert np.allclose([p.delta for p in pts2], [pts[i].delta for i in perm], rtol=1e-12)
    assert np.allclose([p.gamma for p in pts2], [pts[i].gamma for i in perm], rtol=1e-9, atol=1e-12)
    assert {int(perm[i]) for i in cs2.centers} == set(cs.centers)
    _, _, auto1 = _decide(x)
    _, _, auto2 = _decide(x[perm])
    assert {int(perm[i]) for i in auto2.centers} == set(auto1.centers)


@pytest.mark.parametrize("scale", [0.5, 2.0, 8.0])
def test_uniform_scaling_exact_for_powers_of_two(scale):
    x = np.random.default_rng(1).normal(size=(20, 3))
    d = pairwise_distances(x)
    assert np.array_equal(similarity_weights(d * scale).w, similarity_weights(d).w)


@pytest.mark.parametrize("scale", [0.37, 3.1, 250.0])
def test_uniform_scaling_invariance(scale):
    x = np.random.default_rng(2).normal(size=(25, 3))
    d = pairwise_distances(x)
    assert np.allclose(similarity_weights(d * scale).w, similarity_weights(d).w, rtol=1e-12)
    c, pts, cs = _decide(x, k=3)
    c2, pts2, cs2 = _decide(x * scale, k=3)
    assert np.allclose(c2, c, rtol=1e-12)
    assert np.allclose([p.delta for p in pts2], [p.delta * scale for p in pts], rtol=1e-12)
    assert set(cs2.centers) == set(cs.centers)
