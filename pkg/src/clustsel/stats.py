"""Two-sided Wilcoxon rank-sum test with an exact small-sample branch."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.stats import norm, rankdata

# exact null distribution whenever the smaller sample has at most this many values
EXACT_MAX = 12


class RankSumResult(NamedTuple):
    statistic: float  # rank sum of ``xs``
    p_value: float
    verdict: str  # "+": ys significantly lower, "-": significantly higher, "=": no difference
    exact: bool


def _subset_sum_counts(values: np.ndarray, size: int) -> np.ndarray:
    """``counts[s]`` = number of ``size``-subsets of the integer ``values`` summing to ``s``."""
    total = int(values.sum())
    dtype = object if math.comb(len(values), size) >= 2**62 else np.int64
    dp = np.zeros((size + 1, total + 1), dtype=dtype)
    dp[0, 0] = 1
    for i, v in enumerate(values.tolist()):
        for j in range(min(i + 1, size), 0, -1):
            dp[j, v:] += dp[j - 1, : total + 1 - v]
    return dp[size]


def exact_rank_sum_pvalue(xs, ys) -> float:
    """Exact two-sided permutation p-value of the rank sum of ``xs`` (midranks for ties)."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    n1, n2 = len(x), len(y)
    ranks = rankdata(np.concatenate([x, y]))
    doubled = np.rint(2 * ranks).astype(np.int64)  # midranks are multiples of 1/2
    # the distribution of the smaller group's rank sum determines the p-value
    size = min(n1, n2)
    observed = int(doubled[:n1].sum()) if n1 == size else int(doubled[n1:].sum())
    counts = _subset_sum_counts(doubled, size)
    center = size * (n1 + n2 + 1)  # doubled expectation
    dev = np.abs(np.arange(len(counts)) - center)
    extreme = counts[dev >= abs(observed - center)].sum()
    return min(1.0, int(extreme) / math.comb(n1 + n2, size))


def normal_rank_sum_pvalue(xs, ys) -> float:
    """Two-sided normal approximation with tie-corrected variance and continuity correction."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    n1, n2 = len(x), len(y)
    N = n1 + n2
    ranks = rankdata(np.concatenate([x, y]))
    w = ranks[:n1].sum()
    mean = n1 * (N + 1) / 2.0
    _, ties = np.unique(ranks, return_counts=True)
    tie_term = float(np.sum(ties.astype(np.float64) ** 3 - ties)) / (N * (N - 1)) if N > 1 else 0.0
    var = n1 * n2 / 12.0 * ((N + 1) - tie_term)
    if var <= 0:
        return 1.0
    z = max(abs(w - mean) - 0.5, 0.0) / math.sqrt(var)
    return min(1.0, 2.0 * float(norm.sf(z)))


def wilcoxon_rank_sum(xs, ys, alpha: float = 0.1) -> RankSumResult:
    """Compare two samples of a lower-is-better quantity.

    The verdict is ``"+"`` when ``ys`` is significantly lower than ``xs`` at
    level ``alpha``, ``"-"`` when significantly higher and ``"="`` otherwise.
    """
    x = np.asarray(xs, dtype=np.float64).ravel()
    y = np.asarray(ys, dtype=np.float64).ravel()
    if x.size == 0 or y.size == 0:
        raise ValueError("both samples must be non-empty")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    exact = min(x.size, y.size) <= EXACT_MAX
    p = exact_rank_sum_pvalue(x, y) if exact else normal_rank_sum_pvalue(x, y)
    ranks = rankdata(np.concatenate([x, y]))
    w = float(ranks[: x.size].sum())
    verdict = "="
    if p < alpha:
        # xs holding the high ranks means ys is lower, i.e. better
        verdict = "+" if w > x.size * (x.size + y.size + 1) / 2.0 else "-"
    return RankSumResult(w, p, verdict, exact)
