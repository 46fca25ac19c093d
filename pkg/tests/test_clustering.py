import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, minimum_spanning_tree
from scipy.spatial.distance import pdist, squareform

from clustsel.clustering import (
    ClusterSummary,
    LinkageKind,
    hierarchical,
    kmeans,
    kmeanspp_init,
    kmedoids,
    linkage_merges,
    merge_distance,
)
from clustsel.metrics import clustering_objective

import oracles

SLACK = 1e-12


def _nonincreasing(history):
    return all(b <= a + SLACK * max(1.0, abs(a)) for a, b in zip(history, history[1:]))


# --- K-means++ seeding -------------------------------------------------------


def test_seeding_exhaustion_and_single():
    X = np.random.default_rng(1).random((9, 2))
    np.testing.assert_array_equal(kmeanspp_init(X, 9, 0), np.arange(9))
    picks = {int(kmeanspp_init(X, 1, s)[0]) for s in range(200)}
    assert len(picks) == 9  # uniform first draw reaches every point


def test_seeding_prefers_far_point():
    X = np.array([[0.0], [0.0], [100.0]])
    hits = sum(2 in kmeanspp_init(X, 2, s) for s in range(1000))
    # exact probability: 1/3 (first pick) + 2/3 * 1 (D^2 mass all on the far point)
    assert hits / 1000 > 0.95


def test_seeding_distinct_with_duplicates():
    X = np.zeros((6, 2))
    for s in range(20):
        idx = kmeanspp_init(X, 4, s)
        assert len(set(idx.tolist())) == 4


def test_seeding_errors():
    X = np.zeros((3, 2))
    for k in (0, 4):
        with pytest.raises(ValueError):
            kmeanspp_init(X, k, 0)


# --- K-means -------------------------------------------------------------------


def test_kmeans_examples():
    res = kmeans([[0.0], [2.0]], 1, rng=0)
    assert res.state.centroids[0, 0] == 1.0
    X = np.random.default_rng(2).random((7, 3))
    res = kmeans(X, 7, rng=3)
    assert res.objective_history[-1] == 0.0
    assert sorted(res.state.sizes.tolist()) == [1] * 7


def test_kmeans_two_groups_every_seed():
    X = np.array([[0.0], [1.0], [10.0], [11.0]])
    for s in range(50):
        res = kmeans(X, 2, rng=s)
        assert oracles.partition(res.labels) == {frozenset({0, 1}), frozenset({2, 3})}
        assert sorted(res.state.centroids[:, 0].tolist()) == [0.5, 10.5]


def test_kmeans_state_invariants(rng):
    X = rng.random((300, 3))
    res = kmeans(X, 12, rng=5)
    assert res.state.sizes.sum() == 300
    assert np.all(np.bincount(res.labels, minlength=12) > 0)
    for i in range(12):
        np.testing.assert_allclose(res.state.centroids[i], X[res.labels == i].mean(axis=0), atol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_kmeans_objective_nonincreasing(seed):
    g = np.random.default_rng(seed)
    X = g.random((int(g.integers(50, 400)), int(g.integers(2, 6))))
    res = kmeans(X, int(g.integers(2, 30)), rng=seed)
    assert _nonincreasing(res.objective_history)


def test_kmeans_repairs_empty_clusters():
    # five coincident points plus one outlier: assignment ties collapse clusters
    X = np.array([[0.0, 0.0]] * 5 + [[1.0, 1.0]])
    for s in range(20):
        res = kmeans(X, 3, rng=s)
        assert np.all(np.bincount(res.labels, minlength=3) > 0)


def test_kmeans_max_iter_cap(rng):
    X = rng.random((500, 2))
    res = kmeans(X, 40, max_iter=1, rng=0)
    assert res.n_iter == 1
    with pytest.raises(ValueError):
        kmeans(X, 3, max_iter=0)
    with pytest.raises(ValueError):
        kmeans(X, 501)


# --- K-medoids -----------------------------------------------------------------


def test_kmedoids_examples():
    X = np.array([[0.0], [1.0], [3.0]])
    assert kmedoids(X, 1, rng=0).medoids.tolist() == [1]
    Y = np.random.default_rng(4).random((5, 2))
    res = kmedoids(Y, 5, rng=0)
    assert res.medoids.tolist() == list(range(5))
    assert clustering_objective(Y, res.medoids, res.labels) == 0.0


@pytest.mark.parametrize("seed", range(6))
def test_kmedoids_vs_exhaustive_pairs(seed):
    g = np.random.default_rng(100 + seed)
    n = int(g.integers(5, 11))
    X = g.random((n, 2))
    best = oracles.best_medoid_objective(X, 2)
    finals = []
    for s in range(20):
        res = kmedoids(X, 2, rng=s)
        obj = clustering_objective(X, res.medoids, res.labels)
        assert obj >= best - 1e-12
        finals.append(obj)
    assert min(finals) == pytest.approx(best, abs=1e-12)


def test_kmedoids_result_invariants(rng):
    X = rng.random((200, 3))
    res = kmedoids(X, 15, rng=1)
    assert np.all(np.diff(res.medoids) > 0)
    assert np.all(np.bincount(res.labels, minlength=15) > 0)
    # each point sits with its nearest medoid and each medoid is its cluster's medoid
    D = squareform(pdist(X))
    assert np.all(res.labels == np.argmin(D[:, res.medoids], axis=1))
    assert _nonincreasing(res.objective_history)
    assert res.objective_history[-1] == pytest.approx(clustering_objective(X, res.medoids, res.labels))


def test_kmedoids_with_duplicates_keeps_k_clusters():
    X = np.array([[0.0, 0.0]] * 6 + [[2.0, 0.0], [0.0, 2.0]])
    for s in range(20):
        res = kmedoids(X, 4, rng=s)
        assert len(set(res.medoids.tolist())) == 4
        assert np.all(np.bincount(res.labels, minlength=4) > 0)


# --- merge distances -------------------------------------------------------------


def test_merge_distance_examples():
    a, b = ClusterSummary(members=[[0.0, 0.0]]), ClusterSummary(members=[[3.0, 4.0]])
    assert merge_distance("ward", a, b) == pytest.approx(5.0, abs=1e-15)
    assert merge_distance("weighted_average", a, b, cached=(2.0, 4.0)) == 3.0
    assert merge_distance("weighted_average", a, b) == 5.0
    left = ClusterSummary(members=[[0.0], [1.0]])
    right = ClusterSummary(members=[[5.0], [6.0]])
    assert merge_distance(LinkageKind.SINGLE, left, right) == 4.0
    assert merge_distance(LinkageKind.COMPLETE, left, right) == 6.0
    w = merge_distance("ward", ClusterSummary(centroid=[0.5], size=2), ClusterSummary(centroid=[5.5], size=2))
    assert w == pytest.approx(np.sqrt(2.0) * 5.0, abs=1e-14)
    assert merge_distance("ward", left, right) == pytest.approx(w, abs=1e-14)


def test_merge_distance_missing_data():
    c = ClusterSummary(centroid=[0.0], size=1)
    with pytest.raises(ValueError):
        merge_distance("single", c, c)
    with pytest.raises(ValueError):
        merge_distance("ward", ClusterSummary(), c)
    pair = ClusterSummary(members=[[0.0], [1.0]])
    with pytest.raises(ValueError):
        merge_distance("weighted", pair, pair)
    with pytest.raises(ValueError):
        LinkageKind.parse("centroid")


# --- hierarchical --------------------------------------------------------------------


KINDS = ["single", "complete", "weighted", "ward"]


@pytest.mark.parametrize("kind", KINDS)
def test_hierarchical_examples(kind):
    X = np.array([[0.0], [1.0], [5.0], [6.0]])
    assert oracles.partition(hierarchical(X, 2, kind)) == {frozenset({0, 1}), frozenset({2, 3})}
    np.testing.assert_array_equal(hierarchical(X, 4, kind), [0, 1, 2, 3])
    assert hierarchical(X, 1, kind).tolist() == [0, 0, 0, 0]


@pytest.mark.parametrize("kind", KINDS)
def test_hierarchical_matches_naive_agglomerator(kind):
    g = np.random.default_rng(7)
    for _ in range(15):
        n = int(g.integers(2, 9))
        X = g.random((n, 2))
        for k in range(1, n + 1):
            expect, _ = oracles.agglomerate(X, k, kind)
            assert oracles.partition(hierarchical(X, k, kind)) == expect


@pytest.mark.parametrize("kind,method", [("single", "single"), ("complete", "complete"), ("weighted", "weighted"), ("ward", "ward")])
def test_hierarchical_matches_scipy(kind, method):
    g = np.random.default_rng(11)
    for n, m in [(60, 2), (150, 3), (120, 8)]:
        X = g.random((n, m))
        Z = linkage(X, method=method)
        heights = [h for _, _, h in linkage_merges(X, kind)]
        np.testing.assert_allclose(heights, Z[:, 2], rtol=1e-9, atol=1e-12)
        for k in (1, 2, 5, 17, n):
            ref = fcluster(Z, k, criterion="maxclust")
            assert oracles.partition(hierarchical(X, k, kind)) == oracles.partition(ref)


def test_ward_centroid_formula_matches_lance_williams():
    g = np.random.default_rng(3)
    for _ in range(10):
        X = g.random((int(g.integers(3, 12)), 3))
        got = [h for _, _, h in linkage_merges(X, "ward")]
        np.testing.assert_allclose(got, oracles.ward_lance_williams_heights(X), rtol=1e-9)


def test_single_linkage_is_mst_cut():
    g = np.random.default_rng(5)
    for n in (10, 40, 100):
        X = g.random((n, 2))
        T = minimum_spanning_tree(squareform(pdist(X))).tocoo()
        order = np.argsort(T.data)
        for k in (1, 3, 7, n):
            keep = order[: n - k]
            G = coo_matrix((np.ones(len(keep)), (T.row[keep], T.col[keep])), shape=(n, n))
            _, comp = connected_components(G, directed=False)
            assert oracles.partition(hierarchical(X, k, "single")) == oracles.partition(comp)


@pytest.mark.parametrize("kind", KINDS)
def test_hierarchical_permutation_invariant(kind):
    g = np.random.default_rng(9)
    X = g.random((40, 3))
    perm = g.permutation(40)
    a = oracles.partition(hierarchical(X, 6, kind))
    b = hierarchical(X[perm], 6, kind)
    back = {frozenset(int(perm[i]) for i in grp) for grp in oracles.partition(b)}
    assert back == a


def test_hierarchical_labels_first_appearance():
    X = np.array([[10.0], [0.0], [10.5], [0.2], [5.0]])
    lab = hierarchical(X, 3, "single")
    assert lab.tolist() == [0, 1, 0, 1, 2]


def test_hierarchical_errors():
    with pytest.raises(ValueError):
        hierarchical(np.zeros((3, 2)), 4)
    with pytest.raises(ValueError):
        hierarchical(np.zeros((3, 2)), 2, "median")


@given(arrays(np.float64, st.tuples(st.integers(2, 25), st.integers(1, 4)), elements=st.floats(-4, 4)), st.data())
def test_hierarchical_always_k_nonempty_clusters(X, data):
    k = data.draw(st.integers(1, len(X)))
    for kind in KINDS:
        lab = hierarchical(X, k, kind)
        assert np.bincount(lab).size == k and np.all(np.bincount(lab) > 0)
