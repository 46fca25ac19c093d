"""Turning clusterings into subsets, greedy IGD selection and knee-preferring K-medoids."""

from __future__ import annotations

import enum
import heapq
import warnings
from typing import NamedTuple, Optional

import numpy as np

from .clustering import LinkageKind, MedoidResult, _alternating_medoids, hierarchical, kmeans, kmedoids, medoid_of
from .core import as_points, check_labels, check_subset_size, make_rng
from .metrics import _block_rows, distance_block, distances_to


# ---------------------------------------------------------------------------
# representative points
# ---------------------------------------------------------------------------


def _members(member_indices) -> np.ndarray:
    idx = np.asarray(member_indices)
    if idx.size == 0:
        raise ValueError("cannot pick a representative of an empty cluster")
    return np.sort(idx.astype(np.intp).ravel())


def representative_strategy1(points, member_indices) -> int:
    """Member closest to the cluster centroid (ties: lowest index)."""
    X = np.asarray(points, dtype=np.float64)
    members = _members(member_indices)
    M = X[members]
    return int(members[np.argmin(distances_to(M, M.mean(axis=0)))])


def representative_strategy2(points, member_indices) -> int:
    """Member with the smallest summed distance to all members (ties: lowest index)."""
    X = np.asarray(points, dtype=np.float64)
    return medoid_of(X, _members(member_indices))


_STRATEGIES = {1: representative_strategy1, 2: representative_strategy2}


def _check_strategy(strategy) -> int:
    if strategy not in _STRATEGIES:
        raise ValueError(f"strategy must be 1 or 2, got {strategy!r}")
    return int(strategy)


def subset_from_clusters(points, labels, strategy: int = 2) -> np.ndarray:
    """One representative per cluster; returns the sorted subset."""
    X = as_points(points)
    lab, k = check_labels(labels, len(X))
    pick = _STRATEGIES[_check_strategy(strategy)]
    order = np.argsort(lab, kind="stable")
    bounds = np.searchsorted(lab[order], np.arange(k + 1))
    reps = []
    for i in range(k):
        members = order[bounds[i] : bounds[i + 1]]
        if members.size == 0:
            raise ValueError(f"cluster {i} is empty")
        reps.append(pick(X, members))
    return np.sort(np.asarray(reps, dtype=np.intp))


# ---------------------------------------------------------------------------
# greedy IGD selection (the whole point set is the reference set)
# ---------------------------------------------------------------------------


class GreedyTrace(NamedTuple):
    """Greedy selection outcome: sorted subset, pick order, gain evaluations."""

    indices: np.ndarray
    order: list
    n_evaluations: int


def _total_distances(X: np.ndarray, cand: np.ndarray) -> np.ndarray:
    out = np.empty(len(cand))
    step = _block_rows(len(X), X.shape[1])
    for s in range(0, len(cand), step):
        out[s : s + step] = distance_block(X[cand[s : s + step]], X).sum(axis=1)
    return out


def _gains(X: np.ndarray, cand: np.ndarray, cur: np.ndarray) -> np.ndarray:
    """n * (IGD drop) from adding each candidate, given current nearest distances ``cur``."""
    out = np.empty(len(cand))
    step = _block_rows(len(X), X.shape[1])
    for s in range(0, len(cand), step):
        D = distance_block(X[cand[s : s + step]], X)
        out[s : s + step] = np.maximum(cur[None, :] - D, 0.0).sum(axis=1)
    return out


def _first_pick(X: np.ndarray) -> int:
    # 1-medoid: the point with the smallest mean distance to all points
    return int(np.argmin(_total_distances(X, np.arange(len(X)))))


def _greedy_naive(X: np.ndarray, k: int) -> GreedyTrace:
    n = len(X)
    first = _first_pick(X)
    order = [first]
    evaluations = n
    selected = np.zeros(n, dtype=bool)
    selected[first] = True
    cur = distances_to(X, X[first])
    while len(order) < k:
        cand = np.flatnonzero(~selected)
        g = _gains(X, cand, cur)
        evaluations += len(cand)
        c = int(cand[np.argmax(g)])
        order.append(c)
        selected[c] = True
        cur = np.minimum(cur, distances_to(X, X[c]))
    return GreedyTrace(np.sort(np.asarray(order, dtype=np.intp)), order, evaluations)


def _greedy_lazy(X: np.ndarray, k: int) -> GreedyTrace:
    n = len(X)
    first = _first_pick(X)
    order = [first]
    evaluations = n
    cur = distances_to(X, X[first])
    if k == 1:
        return GreedyTrace(np.array([first], dtype=np.intp), order, evaluations)
    cand = np.delete(np.arange(n), first)
    g = _gains(X, cand, cur)
    evaluations += len(cand)
    step = 2  # gains above are exact for the 2nd pick
    # heap entries: (-gain bound, index, step at which the bound was computed)
    heap = [(-float(v), int(c), step) for v, c in zip(g, cand)]
    heapq.heapify(heap)
    while len(order) < k:
        _, c, stamp = heapq.heappop(heap)
        if stamp == step:
            order.append(c)
            cur = np.minimum(cur, distances_to(X, X[c]))
            step += 1
            continue
        fresh = float(_gains(X, np.array([c]), cur)[0])
        evaluations += 1
        heapq.heappush(heap, (-fresh, c, step))
    return GreedyTrace(np.sort(np.asarray(order, dtype=np.intp)), order, evaluations)


def greedy_trace(points, k: int, lazy: bool = True) -> GreedyTrace:
    """Greedy IGD inclusion with its pick order and evaluation counter."""
    X = as_points(points)
    k = check_subset_size(k, len(X))
    return _greedy_lazy(X, k) if lazy else _greedy_naive(X, k)


def greedy_igd_inclusion(points, k: int) -> np.ndarray:
    """Naive greedy inclusion: every step scans all unselected points.

    The first pick is the point with the smallest mean distance to the whole
    set; each later pick maximizes the IGD reduction w.r.t. the full set.
    Ties go to the lowest index.
    """
    return greedy_trace(points, k, lazy=False).indices


def lazy_greedy_igd_inclusion(points, k: int) -> np.ndarray:
    """Lazy greedy inclusion; returns exactly what :func:`greedy_igd_inclusion` returns.

    Marginal IGD reductions only shrink as the subset grows, so a stale gain is
    an upper bound and only the heap top needs re-evaluation.
    """
    return greedy_trace(points, k, lazy=True).indices


def greedy_igd_removal(points, k: int) -> np.ndarray:
    """Start from all points and repeatedly drop the smallest IGD contributor.

    Keeps an ``n x n`` distance matrix, so it is meant for modest ``n``.
    """
    X = as_points(points)
    n = len(X)
    k = check_subset_size(k, n)
    if k == n:
        return np.arange(n, dtype=np.intp)
    D = np.empty((n, n))
    step = _block_rows(n, X.shape[1])
    for s in range(0, n, step):
        D[s : s + step] = distance_block(X[s : s + step], X)
    alive = np.ones(n, dtype=bool)
    nn1 = np.empty(n, dtype=np.intp)
    nn2 = np.empty(n, dtype=np.intp)

    def refresh(rows):
        S = np.flatnonzero(alive)
        sub = D[np.ix_(rows, S)]
        first = np.argmin(sub, axis=1)
        nn1[rows] = S[first]
        sub[np.arange(len(rows)), first] = np.inf
        nn2[rows] = S[np.argmin(sub, axis=1)]

    everyone = np.arange(n)
    refresh(everyone)
    for _ in range(n - k):
        gap = D[everyone, nn2] - D[everyone, nn1]
        contrib = np.bincount(nn1, weights=gap, minlength=n)
        S = np.flatnonzero(alive)
        p = int(S[np.argmin(contrib[S])])
        alive[p] = False
        stale = np.flatnonzero((nn1 == p) | (nn2 == p))
        if np.count_nonzero(alive) >= 2 and stale.size:
            refresh(stale)
    return np.flatnonzero(alive).astype(np.intp)


# ---------------------------------------------------------------------------
# knee-preferring K-medoids
# ---------------------------------------------------------------------------


def knee_kmedoids(points, k: int, max_iter: int = 100, rng=None) -> MedoidResult:
    """K-medoids with the IGD+ dissimilarity in both the assignment and the update.

    A point ``x`` joins the medoid ``mu`` minimizing ``s(x, mu)``, and each
    cluster's medoid minimizes the summed ``s(x, mu)`` over its members, which
    pulls medoids toward knee regions. Seeding is the usual Euclidean
    K-means++.
    """
    X = as_points(points)
    k = check_subset_size(k, len(X))
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    return _alternating_medoids(X, k, max_iter, make_rng(rng), "igd_plus")


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


class AlgoKind(str, enum.Enum):
    KMEANSPP = "kmeans++"
    KMEDOIDS = "kmedoids"
    GREEDY_IGD = "greedy-igd"
    HC_WARD = "hc-ward"
    HC_WEIGHTED = "hc-weighted"
    HC_SINGLE = "hc-single"
    HC_COMPLETE = "hc-complete"
    KNEE_KMEDOIDS = "knee-kmedoids"

    @classmethod
    def parse(cls, value) -> "AlgoKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown algorithm {value!r}; expected one of {[a.value for a in cls]}") from None

    @property
    def uses_strategy(self) -> bool:
        return self in _CLUSTER_ALGOS


_CLUSTER_ALGOS = {
    AlgoKind.KMEANSPP: None,
    AlgoKind.HC_WARD: LinkageKind.WARD,
    AlgoKind.HC_WEIGHTED: LinkageKind.WEIGHTED_AVERAGE,
    AlgoKind.HC_SINGLE: LinkageKind.SINGLE,
    AlgoKind.HC_COMPLETE: LinkageKind.COMPLETE,
}

# the six algorithms of the benchmark tables, in table order
BENCHMARK_ALGOS = (
    AlgoKind.KMEANSPP,
    AlgoKind.KMEDOIDS,
    AlgoKind.GREEDY_IGD,
    AlgoKind.HC_WARD,
    AlgoKind.HC_WEIGHTED,
    AlgoKind.HC_SINGLE,
)


class Clustering(NamedTuple):
    """Output of the clustering phase of a selector.

    ``indices`` is set when the algorithm yields its own centers (medoids,
    greedy picks); cluster-based algorithms leave it ``None`` and need a
    representative strategy.
    """

    labels: Optional[np.ndarray]
    indices: Optional[np.ndarray]
    n_iter: int


def run_clustering(points, algo, k: int, rng=None, max_iter: int = 100) -> Clustering:
    X = as_points(points)
    algo = AlgoKind.parse(algo)
    k = check_subset_size(k, len(X))
    if algo is AlgoKind.KMEANSPP:
        res = kmeans(X, k, max_iter, make_rng(rng))
        return Clustering(res.labels, None, res.n_iter)
    if algo in _CLUSTER_ALGOS:
        return Clustering(hierarchical(X, k, _CLUSTER_ALGOS[algo]), None, len(X) - k)
    if algo is AlgoKind.KMEDOIDS:
        res = kmedoids(X, k, max_iter, make_rng(rng))
        return Clustering(res.labels, res.medoids, res.n_iter)
    if algo is AlgoKind.KNEE_KMEDOIDS:
        res = knee_kmedoids(X, k, max_iter, make_rng(rng))
        return Clustering(res.labels, res.medoids, res.n_iter)
    trace = greedy_trace(X, k, lazy=True)
    return Clustering(None, trace.indices, k)


def select(points, algo, k: int, strategy: Optional[int] = None, rng=None) -> np.ndarray:
    """Select ``k`` row indices from ``points`` with one of the supported algorithms.

    ``strategy`` (1 or 2, default 2) picks representatives for K-means++ and
    the hierarchical variants; the medoid- and greedy-based algorithms return
    their own centers and ignore it.
    """
    algo = AlgoKind.parse(algo)
    if algo.uses_strategy:
        strategy = _check_strategy(2 if strategy is None else strategy)
    elif strategy is not None:
        warnings.warn(f"{algo.value} returns its own centers; strategy={strategy} is ignored", stacklevel=2)
    X = as_points(points)
    result = run_clustering(X, algo, k, rng)
    if result.indices is not None:
        return result.indices
    return subset_from_clusters(X, result.labels, strategy)
