"""Slow, obviously-correct reference implementations used as test oracles."""

from __future__ import annotations

import itertools
import math

import numpy as np


def dist(a, b) -> float:
    return math.sqrt(sum((float(x) - float(y)) ** 2 for x, y in zip(a, b)))


def dominates(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def nondominated(X) -> np.ndarray:
    X = np.asarray(X)
    keep = [not any(dominates(X[j], X[i]) for j in range(len(X)) if j != i) for i in range(len(X))]
    return np.array(keep, dtype=bool)


def igd(S, R) -> float:
    return sum(min(dist(r, s) for s in S) for r in R) / len(R)


def partition(labels) -> frozenset:
    """Label-free view of a clustering."""
    groups = {}
    for i, lab in enumerate(np.asarray(labels).tolist()):
        groups.setdefault(lab, []).append(i)
    return frozenset(frozenset(g) for g in groups.values())


def agglomerate(X, k, kind):
    """Naive O(n^3) agglomeration; returns (partition, merge heights).

    Single/complete recompute min/max member distances, ward uses the
    centroid formula, weighted keeps the recursive averaged table.
    Ties go to the lexicographically smallest pair of cluster minima.
    """
    X = np.asarray(X, dtype=np.float64)
    clusters = [[i] for i in range(len(X))]
    # weighted-average needs the recursive table keyed by cluster minima
    table = {(i, j): dist(X[i], X[j]) for i in range(len(X)) for j in range(len(X)) if i != j}
    heights = []

    def d(a, b):
        A, B = clusters[a], clusters[b]
        if kind == "single":
            return min(dist(X[i], X[j]) for i in A for j in B)
        if kind == "complete":
            return max(dist(X[i], X[j]) for i in A for j in B)
        if kind == "ward":
            ca, cb = X[A].mean(axis=0), X[B].mean(axis=0)
            return math.sqrt(2.0 * len(A) * len(B) / (len(A) + len(B))) * dist(ca, cb)
        return table[min(A), min(B)]

    snapshot = None
    while True:
        if len(clusters) == k:
            snapshot = [list(c) for c in clusters]
        if len(clusters) == 1:
            break
        best = None
        for a, b in itertools.combinations(range(len(clusters)), 2):
            h = d(a, b)
            key = (h, min(clusters[a]), min(clusters[b]))
            if best is None or key < best[0]:
                best = (key, a, b)
        (h, _, _), a, b = best
        heights.append(h)
        if kind == "weighted":
            ra, rb = min(clusters[a]), min(clusters[b])
            for c in range(len(clusters)):
                if c in (a, b):
                    continue
                rc = min(clusters[c])
                v = (table[ra, rc] + table[rb, rc]) / 2.0
                table[min(ra, rb), rc] = table[rc, min(ra, rb)] = v
        merged = sorted(clusters[a] + clusters[b])
        clusters = [c for i, c in enumerate(clusters) if i not in (a, b)] + [merged]
    return frozenset(frozenset(c) for c in snapshot), heights


def ward_lance_williams_heights(X):
    """Ward merge heights from the Lance-Williams recurrence (no centroids)."""
    X = np.asarray(X, dtype=np.float64)
    n = len(X)
    size = {i: 1 for i in range(n)}
    D = {(i, j): dist(X[i], X[j]) for i in range(n) for j in range(n) if i != j}
    alive = set(range(n))
    heights = []
    nxt = n
    while len(alive) > 1:
        i, j = min(itertools.combinations(sorted(alive), 2), key=lambda p: D[p])
        h = D[i, j]
        heights.append(h)
        for s in alive - {i, j}:
            ni, nj, ns = size[i], size[j], size[s]
            v = math.sqrt(((ni + ns) * D[i, s] ** 2 + (nj + ns) * D[j, s] ** 2 - ns * h**2) / (ni + nj + ns))
            D[nxt, s] = D[s, nxt] = v
        size[nxt] = size[i] + size[j]
        alive = (alive - {i, j}) | {nxt}
        nxt += 1
    return heights


def medoid_objective(X, medoids) -> float:
    """Summed distance to the nearest medoid."""
    return sum(min(dist(x, X[m]) for m in medoids) for x in X)


def best_medoid_objective(X, k) -> float:
    return min(medoid_objective(X, c) for c in itertools.combinations(range(len(X)), k))


def greedy_inclusion_steps(X, k):
    """Exhaustive per-step argmax of IGD drop; first step minimizes IGD of a singleton."""
    X = np.asarray(X)
    chosen = []
    for _ in range(k):
        best, best_val = None, None
        for c in range(len(X)):
            if c in chosen:
                continue
            val = igd(X[chosen + [c]], X)
            if best_val is None or val < best_val - 1e-15:
                best, best_val = c, val
        chosen.append(best)
    return chosen


def greedy_removal_steps(X, k):
    """Exhaustive per-step argmin of IGD contribution; returns the removal order."""
    X = np.asarray(X)
    alive = list(range(len(X)))
    removed = []
    while len(alive) > k:
        base = igd(X[alive], X)
        best, best_val = None, None
        for p in alive:
            rest = [q for q in alive if q != p]
            val = igd(X[rest], X) - base
            if best_val is None or val < best_val - 1e-15:
                best, best_val = p, val
        alive.remove(best)
        removed.append(best)
    return removed


def permutation_pvalue(xs, ys) -> float:
    """Two-sided rank-sum p-value by enumerating every split of the pooled ranks."""
    from scipy.stats import rankdata

    pooled = list(xs) + list(ys)
    ranks = rankdata(pooled)
    n1, N = len(xs), len(pooled)
    center = n1 * (N + 1) / 2.0
    obs = abs(sum(ranks[:n1]) - center)
    hits = total = 0
    for combo in itertools.combinations(range(N), n1):
        total += 1
        if abs(sum(ranks[i] for i in combo) - center) >= obs - 1e-9:
            hits += 1
    return hits / total
