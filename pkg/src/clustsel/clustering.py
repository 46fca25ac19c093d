"""K-means++, alternating K-medoids and agglomerative hierarchical clustering.

All routines break ties toward the lowest index (nearest-center ties,
medoid-candidate ties, closest-pair ties) so results are reproducible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .core import RngStream, as_points, check_subset_size, make_rng
from .metrics import _block_rows, distance_block, distances_to, igd_plus_block, nearest_assignment


# ---------------------------------------------------------------------------
# K-means++
# ---------------------------------------------------------------------------


def _kmeanspp_order(X: np.ndarray, k: int, rng: RngStream) -> list[int]:
    n = len(X)
    first = int(rng.integers(0, n))
    chosen = [first]
    taken = np.zeros(n, dtype=bool)
    taken[first] = True
    d2 = distances_to(X, X[first]) ** 2
    d2[first] = 0.0
    while len(chosen) < k:
        cum = np.cumsum(d2)
        total = cum[-1]
        if total > 0.0:
            u = float(rng.uniform(0.0, total))
            nxt = int(np.searchsorted(cum, u, side="right"))
            nxt = min(nxt, n - 1)
            if taken[nxt]:  # only reachable through rounding at the top end
                nxt = int(np.flatnonzero(~taken & (d2 > 0))[-1])
        else:
            # every remaining point coincides with a chosen center
            free = np.flatnonzero(~taken)
            nxt = int(free[rng.integers(0, len(free))])
        chosen.append(nxt)
        taken[nxt] = True
        d2 = np.minimum(d2, distances_to(X, X[nxt]) ** 2)
        d2[taken] = 0.0
    return chosen


def kmeanspp_init(points, k: int, rng=None) -> np.ndarray:
    """K-means++ seeding: a uniform first center, then D^2-weighted draws.

    Returns the chosen row indices sorted ascending.
    """
    X = as_points(points)
    k = check_subset_size(k, len(X))
    return np.sort(np.asarray(_kmeanspp_order(X, k, make_rng(rng)), dtype=np.intp))


def _repair_empty(labels: np.ndarray, dist: np.ndarray, k: int, protected=()) -> list[tuple[int, int]]:
    """Give every empty cluster the point farthest from its current center.

    Only points whose cluster keeps at least one other member (and that are
    not in ``protected``) are eligible. Mutates ``labels``/``dist`` in place
    and returns the ``(cluster, point)`` moves.
    """
    moves = []
    sizes = np.bincount(labels, minlength=k)
    blocked = np.zeros(len(labels), dtype=bool)
    blocked[list(protected)] = True
    for e in np.flatnonzero(sizes == 0):
        eligible = (sizes[labels] >= 2) & ~blocked
        cand = np.flatnonzero(eligible)
        if cand.size == 0:
            raise RuntimeError("cannot repair an empty cluster: no movable point")
        x = int(cand[np.argmax(dist[cand])])
        sizes[labels[x]] -= 1
        sizes[e] += 1
        labels[x] = e
        dist[x] = 0.0
        blocked[x] = True
        moves.append((int(e), x))
    return moves


@dataclass
class CentroidState:
    """Cluster means and member counts."""

    centroids: np.ndarray
    sizes: np.ndarray


class KMeansResult(NamedTuple):
    state: CentroidState
    labels: np.ndarray
    n_iter: int
    objective_history: list


def _centroids(X: np.ndarray, labels: np.ndarray, k: int) -> CentroidState:
    sizes = np.bincount(labels, minlength=k)
    C = np.empty((k, X.shape[1]))
    for j in range(X.shape[1]):
        C[:, j] = np.bincount(labels, weights=X[:, j], minlength=k)
    C /= np.maximum(sizes, 1)[:, None]
    return CentroidState(C, sizes)


def _sse(X: np.ndarray, labels: np.ndarray, C: np.ndarray) -> float:
    diff = X - C[labels]
    return float(np.einsum("ij,ij->", diff, diff))


def kmeans(points, k: int, max_iter: int = 100, rng=None) -> KMeansResult:
    """Lloyd iterations from a K-means++ seeding.

    Stops when the labels stop changing or after ``max_iter`` mean updates.
    ``objective_history`` holds the within-cluster sum of squares after each
    mean update.
    """
    X = as_points(points)
    k = check_subset_size(k, len(X))
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    rng = make_rng(rng)
    C = X[kmeanspp_init(X, k, rng)].copy()
    labels, dist = nearest_assignment(X, C)
    for e, x in _repair_empty(labels, dist, k):
        C[e] = X[x]
    history = []
    n_iter = 0
    for _ in range(max_iter):
        state = _centroids(X, labels, k)
        history.append(_sse(X, labels, state.centroids))
        n_iter += 1
        new_labels, dist = nearest_assignment(X, state.centroids)
        _repair_empty(new_labels, dist, k)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    state = _centroids(X, labels, k)
    return KMeansResult(state, labels, n_iter, history)


# ---------------------------------------------------------------------------
# K-medoids (alternating assignment / medoid update)
# ---------------------------------------------------------------------------


class MedoidResult(NamedTuple):
    medoids: np.ndarray
    labels: np.ndarray
    n_iter: int
    objective_history: list


def _pairwise_block(metric: str):
    return igd_plus_block if metric == "igd_plus" else distance_block


def medoid_of(X: np.ndarray, members: np.ndarray, metric: str = "euclidean") -> int:
    """Member minimizing the summed dissimilarity from all members to it.

    ``members`` must be sorted so that ties resolve to the lowest index.
    """
    block = _pairwise_block(metric)
    M = X[members]
    totals = np.empty(len(members))
    step = _block_rows(len(members), X.shape[1])
    for s in range(0, len(members), step):
        # rows: members as "x", columns: candidate medoids
        totals[s : s + step] = block(M, M[s : s + step]).sum(axis=0)
    return int(members[np.argmin(totals)])


def _assign_to_medoids(X: np.ndarray, med: np.ndarray, metric: str):
    labels, dist = nearest_assignment(X, X[med], metric)
    # a medoid always stays in its own cluster; under IGD+ another medoid that
    # dominates it ties at zero, and with duplicates Euclidean ties too
    labels[med] = np.arange(len(med))
    dist[med] = 0.0
    k = len(med)
    for e, x in _repair_empty(labels, dist, k, protected=med):
        med[e] = x
    return labels, dist


def _alternating_medoids(X: np.ndarray, k: int, max_iter: int, rng: RngStream, metric: str) -> MedoidResult:
    med = kmeanspp_init(X, k, rng)
    history = []
    n_iter = 0
    converged = False
    for _ in range(max_iter):
        labels, dist = _assign_to_medoids(X, med, metric)
        history.append(float(dist.sum()))
        n_iter += 1
        new_med = np.array(
            [medoid_of(X, np.flatnonzero(labels == i), metric) for i in range(k)], dtype=np.intp
        )
        if np.array_equal(np.sort(new_med), np.sort(med)):
            converged = True
            break
        med = np.sort(new_med)
    if not converged:
        labels, dist = _assign_to_medoids(X, med, metric)
        history.append(float(dist.sum()))
    order = np.argsort(med, kind="stable")
    relabel = np.empty(k, dtype=np.intp)
    relabel[order] = np.arange(k)
    return MedoidResult(med[order], relabel[labels], n_iter, history)


def kmedoids(points, k: int, max_iter: int = 100, rng=None) -> MedoidResult:
    """Alternating K-medoids with K-means++ seeding.

    Each iteration assigns points to the nearest medoid, then moves every
    medoid to the member with the smallest total distance to its cluster.
    Stops when the medoid set is unchanged or after ``max_iter`` iterations.
    ``labels[i]`` indexes into the returned (sorted) ``medoids``.
    """
    X = as_points(points)
    k = check_subset_size(k, len(X))
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    return _alternating_medoids(X, k, max_iter, make_rng(rng), "euclidean")


# ---------------------------------------------------------------------------
# agglomerative hierarchical clustering
# ---------------------------------------------------------------------------


class LinkageKind(str, enum.Enum):
    SINGLE = "single"
    COMPLETE = "complete"
    WEIGHTED_AVERAGE = "weighted_average"
    WARD = "ward"

    @classmethod
    def parse(cls, value) -> "LinkageKind":
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("-", "_")
        if key == "weighted":
            key = "weighted_average"
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown linkage {value!r}; expected one of {[k.value for k in cls]}") from None


@dataclass(frozen=True)
class ClusterSummary:
    """What a linkage rule may need to know about one cluster.

    ``members`` holds member coordinates (single/complete), ``centroid`` and
    ``size`` serve Ward's rule.
    """

    members: Optional[np.ndarray] = None
    centroid: Optional[np.ndarray] = None
    size: Optional[int] = None

    def _centroid_and_size(self):
        if self.centroid is not None and self.size is not None:
            return np.asarray(self.centroid, dtype=np.float64), int(self.size)
        if self.members is not None:
            M = np.atleast_2d(np.asarray(self.members, dtype=np.float64))
            return M.mean(axis=0), len(M)
        raise ValueError("ward linkage needs a centroid and size (or the members)")


def merge_distance(kind, left: ClusterSummary, right: ClusterSummary, cached=None) -> float:
    """Distance between two clusters under the given linkage rule.

    For ``weighted_average``, ``left`` is taken to be the merge of two
    clusters p and q and ``cached`` must be ``(d(p, right), d(q, right))``;
    two singleton summaries fall back to the point distance.
    """
    kind = LinkageKind.parse(kind)
    if kind is LinkageKind.WARD:
        mu_r, n_r = left._centroid_and_size()
        mu_s, n_s = right._centroid_and_size()
        coef = np.sqrt(2.0 * n_r * n_s / (n_r + n_s))
        d = mu_r - mu_s
        return float(coef * np.sqrt(np.dot(d, d)))
    if kind is LinkageKind.WEIGHTED_AVERAGE:
        if cached is not None:
            d_ps, d_qs = cached
            return (float(d_ps) + float(d_qs)) / 2.0
        if left.members is not None and right.members is not None:
            A = np.atleast_2d(np.asarray(left.members, dtype=np.float64))
            B = np.atleast_2d(np.asarray(right.members, dtype=np.float64))
            if len(A) == 1 and len(B) == 1:
                return float(distance_block(A, B)[0, 0])
        raise ValueError("weighted_average linkage needs the cached distances d(p, s) and d(q, s)")
    if left.members is None or right.members is None:
        raise ValueError(f"{kind.value} linkage needs the member coordinates of both clusters")
    A = np.atleast_2d(np.asarray(left.members, dtype=np.float64))
    B = np.atleast_2d(np.asarray(right.members, dtype=np.float64))
    D = distance_block(A, B)
    return float(D.min() if kind is LinkageKind.SINGLE else D.max())


def _single_linkage_merges(X: np.ndarray) -> list[tuple[int, int, float]]:
    # Prim's minimum spanning tree; its edges, sorted, are the single-linkage merges
    n = len(X)
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best = distances_to(X, X[0])
    best[0] = np.inf
    parent = np.zeros(n, dtype=np.intp)
    edges = []
    for _ in range(n - 1):
        j = int(np.argmin(best))
        edges.append((int(parent[j]), j, float(best[j])))
        in_tree[j] = True
        best[j] = np.inf
        d = distances_to(X, X[j])
        closer = (d < best) & ~in_tree
        best[closer] = d[closer]
        parent[closer] = j
    return edges


def _nn_chain(n: int, nearest, merge) -> list[tuple[int, int, float]]:
    """Nearest-neighbor chain over cluster slots ``0..n-1``.

    ``nearest(a)`` returns the distance row from slot ``a`` to every slot
    (``inf`` for itself and retired slots); ``merge(a, b)`` merges ``b`` into
    ``a``. Returns merges as ``(slot_a, slot_b, height)`` in execution order.
    """
    active = np.ones(n, dtype=bool)
    merges = []
    chain: list[int] = []
    remaining = n
    while remaining > 1:
        if not chain:
            chain.append(int(np.flatnonzero(active)[0]))
        a = chain[-1]
        row = nearest(a)
        b = int(np.argmin(row))
        if len(chain) >= 2 and row[chain[-2]] == row[b]:
            b = chain[-2]
        if len(chain) >= 2 and b == chain[-2]:
            chain.pop()
            chain.pop()
            lo, hi = (a, b) if a < b else (b, a)
            merges.append((lo, hi, float(row[b])))
            merge(lo, hi)
            active[hi] = False
            remaining -= 1
        else:
            chain.append(b)
    return merges


def _ward_merges(X: np.ndarray) -> list[tuple[int, int, float]]:
    n = len(X)
    centroids = X.copy()
    sizes = np.ones(n)
    alive = np.ones(n, dtype=bool)

    def nearest(a):
        d = distances_to(centroids, centroids[a])
        row = np.sqrt(2.0 * sizes[a] * sizes / (sizes[a] + sizes)) * d
        row[~alive] = np.inf
        row[a] = np.inf
        return row

    def merge(a, b):
        total = sizes[a] + sizes[b]
        centroids[a] = (sizes[a] * centroids[a] + sizes[b] * centroids[b]) / total
        sizes[a] = total
        alive[b] = False

    return _nn_chain(n, nearest, merge)


def _matrix_merges(X: np.ndarray, kind: LinkageKind) -> list[tuple[int, int, float]]:
    n = len(X)
    D = np.empty((n, n))
    step = _block_rows(n, X.shape[1])
    for s in range(0, n, step):
        D[s : s + step] = distance_block(X[s : s + step], X)
    np.fill_diagonal(D, np.inf)
    combine = {
        LinkageKind.SINGLE: np.minimum,
        LinkageKind.COMPLETE: np.maximum,
        LinkageKind.WEIGHTED_AVERAGE: lambda u, v: (u + v) / 2.0,
    }[kind]

    def nearest(a):
        return D[a]

    def merge(a, b):
        new = combine(D[a], D[b])
        D[a, :] = new
        D[:, a] = new
        D[a, a] = np.inf
        D[b, :] = np.inf
        D[:, b] = np.inf

    return _nn_chain(n, nearest, merge)


def linkage_merges(points, kind) -> list[tuple[int, int, float]]:
    """Full merge list for ``points`` as ``(point_a, point_b, height)`` triples.

    ``point_a``/``point_b`` are the lowest-index representatives of the two
    merged clusters; merges come in nondecreasing height order.
    """
    X = as_points(points)
    kind = LinkageKind.parse(kind)
    if len(X) < 2:
        return []
    if kind is LinkageKind.SINGLE:
        merges = _single_linkage_merges(X)
    elif kind is LinkageKind.WARD:
        merges = _ward_merges(X)
    else:
        merges = _matrix_merges(X, kind)
    order = sorted(range(len(merges)), key=lambda i: merges[i][2])
    return [merges[i] for i in order]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            lo, hi = (ra, rb) if ra < rb else (rb, ra)
            self.parent[hi] = lo


def cut_merges(n: int, merges, k: int) -> np.ndarray:
    """Apply the first ``n - k`` merges and label clusters by first appearance."""
    uf = _UnionFind(n)
    for a, b, _ in merges[: n - k]:
        uf.union(a, b)
    # each root is its cluster's smallest member, so sorted roots = first appearance
    roots = np.array([uf.find(i) for i in range(n)])
    return np.unique(roots, return_inverse=True)[1].reshape(-1).astype(np.intp)


def hierarchical(points, k: int, kind="ward") -> np.ndarray:
    """Agglomerative clustering cut at exactly ``k`` clusters.

    Single linkage goes through a minimum spanning tree; Ward works from
    centroids and sizes; complete and weighted-average linkage update a dense
    distance matrix. The latter two need ``8 n^2`` bytes.
    """
    X = as_points(points)
    k = check_subset_size(k, len(X))
    return cut_merges(len(X), linkage_merges(X, kind), k)
