"""Point-set validation, seeded randomness, dominance filtering and CSV I/O.

Point sets are plain ``(n, m)`` float64 arrays; a point's identity is its row
index. Subsets are sorted ``intp`` index arrays and cluster assignments are
``intp`` label arrays with values in ``[0, k)``.
"""

from __future__ import annotations

import bisect
import csv
import os
from typing import Optional

import numpy as np
from sklearn.utils import check_array


def as_points(X, *, min_samples: int = 1, min_dim: int = 1, name: str = "X") -> np.ndarray:
    """Validate ``X`` as a finite 2-D float64 point set (C-contiguous copy if needed)."""
    X = check_array(
        X,
        dtype=np.float64,
        order="C",
        ensure_all_finite=True,
        ensure_min_samples=min_samples,
        ensure_min_features=min_dim,
        input_name=name,
    )
    return X


def check_subset_size(k, n: int) -> int:
    """Return ``k`` as an int after checking ``1 <= k <= n``."""
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
        raise TypeError(f"k must be an integer, got {type(k).__name__}")
    k = int(k)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of points n={n}")
    return k


def check_subset(indices, n: int) -> np.ndarray:
    """Validate a subset of row indices and return it sorted ascending."""
    idx = np.asarray(indices)
    if idx.ndim != 1 or idx.size == 0:
        raise ValueError("a subset must be a non-empty 1-D index list")
    if not np.issubdtype(idx.dtype, np.integer):
        raise TypeError("subset indices must be integers")
    if idx.min() < 0 or idx.max() >= n:
        raise ValueError(f"subset indices must lie in [0, {n})")
    out = np.unique(idx).astype(np.intp)
    if out.size != idx.size:
        raise ValueError("subset indices must be distinct")
    return out


def check_labels(labels, n: int, k: Optional[int] = None) -> tuple[np.ndarray, int]:
    """Validate a cluster assignment; returns ``(labels, k)``."""
    lab = np.asarray(labels)
    if lab.shape != (n,):
        raise ValueError(f"labels must have shape ({n},), got {lab.shape}")
    if not np.issubdtype(lab.dtype, np.integer):
        raise TypeError("labels must be integers")
    lab = lab.astype(np.intp)
    if k is None:
        k = int(lab.max()) + 1 if n else 0
    if n and (lab.min() < 0 or lab.max() >= k):
        raise ValueError(f"labels must lie in [0, {k})")
    return lab, k


class RngStream:
    """Seeded random stream backed by numpy's PCG64 bit generator.

    PCG64 has 128-bit state and its output for a given seed is fixed across
    platforms, so two streams built from the same seed produce bit-identical
    draws.
    """

    def __init__(self, seed: int = 0):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.seed = seed
        self.generator = np.random.Generator(np.random.PCG64(seed))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed})"

    def uniform(self, lo: float = 0.0, hi: float = 1.0, size=None):
        if not lo < hi:
            raise ValueError(f"invalid range: lo={lo} must be < hi={hi}")
        return self.generator.uniform(lo, hi, size)

    def integers(self, lo: int, hi: int, size=None):
        return self.generator.integers(lo, hi, size)

    def standard_normal(self, size=None):
        return self.generator.standard_normal(size)

    def standard_exponential(self, size=None):
        return self.generator.standard_exponential(size)

    def choice(self, n: int, size: int, replace: bool = False, p=None) -> np.ndarray:
        return self.generator.choice(n, size=size, replace=replace, p=p)


def make_rng(seed_or_rng) -> RngStream:
    """Coerce ``None``, an int seed or an existing stream into an :class:`RngStream`."""
    if isinstance(seed_or_rng, RngStream):
        return seed_or_rng
    if seed_or_rng is None:
        return RngStream(0)
    return RngStream(int(seed_or_rng))


def rng_uniform(stream: RngStream, lo: float, hi: float) -> float:
    """Draw one value from ``[lo, hi)``, advancing ``stream``."""
    return float(stream.uniform(lo, hi))


# ---------------------------------------------------------------------------
# dominance
# ---------------------------------------------------------------------------


def _nd_mask_2d(U: np.ndarray) -> np.ndarray:
    # U: unique rows in lexicographic order
    prev_min = np.minimum.accumulate(U[:, 1])
    dominated = np.zeros(len(U), dtype=bool)
    dominated[1:] = prev_min[:-1] <= U[1:, 1]
    return ~dominated


def _nd_mask_3d(U: np.ndarray) -> np.ndarray:
    # sweep in lexicographic order keeping a (f2, f3) staircase of earlier points
    keep = np.ones(len(U), dtype=bool)
    f2s: list = []
    f3s: list = []
    for i, (_, b, c) in enumerate(U.tolist()):
        j = bisect.bisect_right(f2s, b) - 1
        if j >= 0 and f3s[j] <= c:
            keep[i] = False
            continue
        pos = bisect.bisect_left(f2s, b)
        end = pos
        while end < len(f2s) and f3s[end] >= c:
            end += 1
        f2s[pos:end] = [b]
        f3s[pos:end] = [c]
    return keep


def _nd_mask_general(U: np.ndarray, budget: int = 4_000_000) -> np.ndarray:
    # Any dominator of a point precedes it in (sum, lexicographic) order, so a
    # block only needs checking against itself and the earlier survivors.
    n, m = U.shape
    order = np.lexsort(tuple(U[:, j] for j in range(m - 1, -1, -1)) + (U.sum(axis=1),))
    V = U[order]
    keep_sorted = np.zeros(n, dtype=bool)
    archive = np.empty((0, m))
    start = 0
    while start < n:
        block_size = max(1, min(512, budget // max(1, (len(archive) + 512) * m)))
        B = V[start : start + block_size]
        dom = np.zeros(len(B), dtype=bool)
        if len(archive):
            le = (archive[None, :, :] <= B[:, None, :]).all(axis=2)
            lt = (archive[None, :, :] < B[:, None, :]).any(axis=2)
            dom |= (le & lt).any(axis=1)
        le = (B[None, :, :] <= B[:, None, :]).all(axis=2)
        lt = (B[None, :, :] < B[:, None, :]).any(axis=2)
        dom |= (le & lt).any(axis=1)
        keep_sorted[start : start + len(B)] = ~dom
        archive = np.vstack([archive, B[~dom]])
        start += len(B)
    keep = np.empty(n, dtype=bool)
    keep[order] = keep_sorted
    return keep


def nondominated_mask(points) -> np.ndarray:
    """Boolean mask of points not strictly dominated by any other point (minimization).

    Duplicate points do not dominate each other, so every copy of a
    nondominated point is kept.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("points must be a 2-D array")
    n, m = X.shape
    if n == 0:
        return np.zeros(0, dtype=bool)
    if m < 2:
        raise ValueError("dominance filtering needs at least 2 objectives")
    U, inverse = np.unique(X, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    if m == 2:
        keep = _nd_mask_2d(U)
    elif m == 3:
        keep = _nd_mask_3d(U)
    else:
        keep = _nd_mask_general(U)
    return keep[inverse]


def nondominated_filter(points) -> np.ndarray:
    """Return the nondominated rows of ``points`` in their original order."""
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 2 and X.shape[0] == 0:
        return X.copy()
    return X[nondominated_mask(X)]


# ---------------------------------------------------------------------------
# CSV point-set files
# ---------------------------------------------------------------------------


def write_points_csv(points, path) -> None:
    """Write a point set as CSV with header ``f1,...,fm`` (LF line endings)."""
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("points must be a 2-D array")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"f{j + 1}" for j in range(X.shape[1])])
        for row in X.tolist():
            writer.writerow([repr(v) for v in row])


def read_points_csv(path) -> np.ndarray:
    """Read a point-set CSV written by :func:`write_points_csv` (or compatible)."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{os.fspath(path)}: empty file, expected a header row") from None
        header = [h.strip() for h in header]
        expected = [f"f{j + 1}" for j in range(len(header))]
        if header != expected:
            raise ValueError(f"{os.fspath(path)}: header must be {','.join(expected)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{os.fspath(path)}:{lineno}: expected {len(header)} columns")
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise ValueError(f"{os.fspath(path)}:{lineno}: {exc}") from None
    X = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(header))
    if not np.isfinite(X).all():
        raise ValueError(f"{os.fspath(path)}: non-finite coordinate")
    return X
