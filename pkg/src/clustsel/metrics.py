"""Distances and quality indicators (IGD, IGD contribution, IGD+ similarity).

Everything works on raw, unnormalized objective values.
"""

from __future__ import annotations

import numpy as np

from .core import as_points, check_labels, check_subset

# rows * cols * dims processed per block when building distance blocks
_BLOCK_BUDGET = 2_000_000


def _block_rows(n_cols: int, m: int) -> int:
    return max(1, _BLOCK_BUDGET // max(1, n_cols * m))


def distance_block(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Euclidean distances between every row of ``A`` and every row of ``B``.

    Uses explicit differences rather than the dot-product expansion so that a
    row of the result does not depend on which other rows share the block.
    """
    diff = A[:, None, :] - B[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def distances_to(X: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Euclidean distance from every row of ``X`` to the single point ``c``."""
    return distance_block(c[None, :], X)[0]


def _scaled_norm(d: np.ndarray) -> float:
    # scale first so tiny or huge components neither underflow nor overflow
    top = float(np.max(np.abs(d))) if d.size else 0.0
    if top == 0.0 or not np.isfinite(top):
        return top
    u = d / top
    return top * float(np.sqrt(np.dot(u, u)))


def euclidean(x, y) -> float:
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    return _scaled_norm(x - y)


def igd_plus_similarity(x, y) -> float:
    """IGD+ dissimilarity of ``y`` with respect to ``x``.

    Only the objectives in which ``y`` is worse than ``x`` count, so the value
    is zero whenever ``y`` weakly dominates ``x``. Not symmetric.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    return _scaled_norm(np.maximum(y - x, 0.0))


def igd_plus_block(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``out[i, j] = igd_plus_similarity(A[i], B[j])``."""
    diff = np.maximum(B[None, :, :] - A[:, None, :], 0.0)
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def nearest_assignment(points, centers, metric: str = "euclidean") -> tuple[np.ndarray, np.ndarray]:
    """Label each point with the position of its closest center.

    Ties go to the lowest center position. ``metric="igd_plus"`` measures
    ``igd_plus_similarity(point, center)``. Returns ``(labels, distances)``.
    """
    X = np.asarray(points, dtype=np.float64)
    C = np.asarray(centers, dtype=np.float64)
    block = igd_plus_block if metric == "igd_plus" else distance_block
    n = len(X)
    labels = np.empty(n, dtype=np.intp)
    dist = np.empty(n)
    step = _block_rows(len(C), X.shape[1])
    for s in range(0, n, step):
        D = block(X[s : s + step], C)
        lab = np.argmin(D, axis=1)
        labels[s : s + step] = lab
        dist[s : s + step] = D[np.arange(len(lab)), lab]
    return labels, dist


def min_distances(reference: np.ndarray, solution: np.ndarray) -> np.ndarray:
    """Distance from each reference point to its nearest solution point."""
    return nearest_assignment(reference, solution)[1]


def igd(solution, reference) -> float:
    """Mean distance from each reference point to its nearest solution point."""
    S = as_points(solution, name="solution")
    R = as_points(reference, name="reference")
    if S.shape[1] != R.shape[1]:
        raise ValueError(f"dimension mismatch: solution m={S.shape[1]}, reference m={R.shape[1]}")
    return float(np.mean(min_distances(R, S)))


def igd_contribution(p_index: int, solution, reference, points=None) -> float:
    """Increase in IGD caused by dropping ``points[p_index]`` from the solution.

    ``solution`` holds row indices into ``points``, which defaults to the
    reference set itself (the subset-selection setting).
    """
    R = as_points(reference, name="reference")
    P = R if points is None else as_points(points, name="points")
    sol = check_subset(solution, len(P))
    if p_index not in set(sol.tolist()):
        raise ValueError(f"index {p_index} is not a member of the solution")
    if sol.size < 2:
        raise ValueError("removing the only solution point leaves an empty set")
    rest = sol[sol != p_index]
    with_p = min_distances(R, P[sol])
    without_p = min_distances(R, P[rest])
    # pointwise difference is >= 0 exactly; summing differences keeps the sign
    return float(np.sum(without_p - with_p) / len(R))


def clustering_objective(points, medoids, labels) -> float:
    """Sum over clusters of member distances to the cluster's medoid."""
    X = as_points(points)
    med = np.asarray(medoids)
    if med.ndim != 1 or not np.issubdtype(med.dtype, np.integer):
        raise ValueError("medoids must be a 1-D integer index array")
    lab, k = check_labels(labels, len(X))
    if med.size != k:
        raise ValueError(f"{med.size} medoids do not match an assignment with k={k}")
    centers = X[med]
    diff = X - centers[lab]
    return float(np.sum(np.sqrt(np.einsum("ij,ij->i", diff, diff))))
