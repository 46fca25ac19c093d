"""scikit-learn style wrappers around the subset selectors.

Every estimator selects ``n_clusters`` rows of the training data. After
``fit`` it exposes:

* ``indices_``: sorted row indices of the selected points,
* ``cluster_centers_``: the selected points themselves (``X[indices_]``),
* ``labels_``: for each training row, the position in ``indices_`` of the
  representative of its cluster,
* ``n_iter_`` and ``n_features_in_``.

``predict`` maps new points to their nearest representative and ``transform``
returns the distances to all representatives.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .core import check_subset_size, make_rng
from .metrics import distance_block, igd_plus_block, nearest_assignment
from .selection import (
    AlgoKind,
    greedy_igd_removal,
    greedy_trace,
    run_clustering,
    subset_from_clusters,
)

_GREEDY_METHODS = ("lazy", "naive", "removal")
_LINKAGES = {
    "ward": AlgoKind.HC_WARD,
    "single": AlgoKind.HC_SINGLE,
    "complete": AlgoKind.HC_COMPLETE,
    "weighted": AlgoKind.HC_WEIGHTED,
    "weighted_average": AlgoKind.HC_WEIGHTED,
}


class _SelectorBase(ClusterMixin, TransformerMixin, BaseEstimator):
    _metric = "euclidean"

    def _select(self, X):  # -> (indices, labels or None, n_iter)
        raise NotImplementedError

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=np.float64, ensure_min_samples=1)
        k = check_subset_size(self.n_clusters, len(X))
        indices, labels, n_iter = self._select(X)
        indices = np.asarray(indices, dtype=np.intp)
        if len(indices) != k:  # pragma: no cover - guards the selectors
            raise RuntimeError(f"selector returned {len(indices)} points instead of {k}")
        self.indices_ = indices
        self.cluster_centers_ = X[indices].copy()
        if labels is None:
            labels = nearest_assignment(X, self.cluster_centers_, self._metric)[0]
        else:
            # representatives belong to their clusters: relabel by position in indices_
            labels = np.asarray(labels)
            position = np.empty(labels.max() + 1, dtype=np.intp)
            position[labels[indices]] = np.arange(k)
            labels = position[labels]
        self.labels_ = labels
        self.n_iter_ = int(n_iter)
        return self

    def fit_select(self, X, y=None) -> np.ndarray:
        """Fit and return ``indices_``."""
        return self.fit(X).indices_

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "cluster_centers_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        return nearest_assignment(X, self.cluster_centers_, self._metric)[0]

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "cluster_centers_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        block = igd_plus_block if self._metric == "igd_plus" else distance_block
        return block(X, self.cluster_centers_)

    def _run(self, X, algo, strategy=None):
        res = run_clustering(X, algo, self.n_clusters, make_rng(self.random_state), self.max_iter)
        if res.indices is not None:
            return res.indices, res.labels, res.n_iter
        return subset_from_clusters(X, res.labels, strategy), res.labels, res.n_iter


class KMeansPlusPlusSelector(_SelectorBase):
    """K-means with K-means++ seeding, then one representative per cluster.

    ``strategy=1`` takes the member closest to the centroid, ``strategy=2``
    the cluster medoid.
    """

    def __init__(self, n_clusters=100, strategy=2, max_iter=100, random_state=0):
        self.n_clusters = n_clusters
        self.strategy = strategy
        self.max_iter = max_iter
        self.random_state = random_state

    def _select(self, X):
        return self._run(X, AlgoKind.KMEANSPP, self.strategy)


class KMedoidsSelector(_SelectorBase):
    """Alternating K-medoids (Euclidean); the medoids are the subset."""

    def __init__(self, n_clusters=100, max_iter=100, random_state=0):
        self.n_clusters = n_clusters
        self.max_iter = max_iter
        self.random_state = random_state

    def _select(self, X):
        return self._run(X, AlgoKind.KMEDOIDS)


class KneeKMedoidsSelector(KMedoidsSelector):
    """K-medoids under the IGD+ dissimilarity, which favors knee regions.

    ``predict`` and ``transform`` also use the IGD+ dissimilarity.
    """

    _metric = "igd_plus"

    def _select(self, X):
        return self._run(X, AlgoKind.KNEE_KMEDOIDS)


class HierarchicalSelector(_SelectorBase):
    """Agglomerative clustering cut at ``n_clusters`` clusters, then representatives."""

    def __init__(self, n_clusters=100, linkage="ward", strategy=2):
        self.n_clusters = n_clusters
        self.linkage = linkage
        self.strategy = strategy

    def _select(self, X):
        try:
            algo = _LINKAGES[str(self.linkage).lower()]
        except KeyError:
            raise ValueError(f"unknown linkage {self.linkage!r}; expected one of {sorted(_LINKAGES)}") from None
        res = run_clustering(X, algo, self.n_clusters)
        return subset_from_clusters(X, res.labels, self.strategy), res.labels, res.n_iter


class GreedyIGDSelector(_SelectorBase):
    """Greedy IGD subset selection with the whole data set as reference.

    ``method``: ``"lazy"`` (default) or ``"naive"`` inclusion, which give
    identical subsets, or ``"removal"`` (backward elimination, O(n^2) memory).
    ``pick_order_`` records the inclusion order (``None`` for removal).
    """

    def __init__(self, n_clusters=100, method="lazy"):
        self.n_clusters = n_clusters
        self.method = method

    def _select(self, X):
        if self.method not in _GREEDY_METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {_GREEDY_METHODS}")
        if self.method == "removal":
            self.pick_order_ = None
            return greedy_igd_removal(X, self.n_clusters), None, len(X) - self.n_clusters
        trace = greedy_trace(X, self.n_clusters, lazy=self.method == "lazy")
        self.pick_order_ = np.asarray(trace.order, dtype=np.intp)
        return trace.indices, None, len(trace.order)


class SubsetSelector(_SelectorBase):
    """Dispatch on an algorithm name (``kmeans++``, ``hc-ward``, ``greedy-igd``, ...).

    ``strategy`` defaults to 2 for the cluster-based algorithms and must be
    left ``None`` for the ones that return their own centers.
    """

    def __init__(self, algorithm="kmeans++", n_clusters=100, strategy=None, max_iter=100, random_state=0):
        self.algorithm = algorithm
        self.n_clusters = n_clusters
        self.strategy = strategy
        self.max_iter = max_iter
        self.random_state = random_state

    def _select(self, X):
        algo = AlgoKind.parse(self.algorithm)
        self._metric = "igd_plus" if algo is AlgoKind.KNEE_KMEDOIDS else "euclidean"
        if not algo.uses_strategy and self.strategy is not None:
            raise ValueError(f"{algo.value} returns its own centers; strategy must be None")
        return self._run(X, algo, 2 if self.strategy is None else self.strategy)
