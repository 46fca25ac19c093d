"""Uniform samples on benchmark Pareto fronts in objective space.

Regular fronts (linear, concave, convex, inverted) are sampled directly.
DTLZ7 and WFG2 are disconnected: their raw parameterizations contain
dominated pieces. In both, dominance is decided by a single scalar parameter
(each coordinate of DTLZ7, the first position parameter of WFG2), so a raw draw
is kept only when that parameter lies in the Pareto-optimal intervals. The
knee fronts are oversampled and dominance-filtered.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .core import RngStream, make_rng, nondominated_filter

KINDS = ("linear", "concave", "convex", "inverted", "dtlz7", "wfg2", "deb2dk", "deb3dk", "wave")
KNEE_KINDS = ("deb2dk", "deb3dk", "wave")
# the six fronts of the benchmark tables, in table order
BENCHMARK_KINDS = ("linear", "concave", "convex", "inverted", "dtlz7", "wfg2")
DEFAULT_KNEES = {"deb2dk": 3, "wave": 3, "deb3dk": 1}
DEFAULT_POOL = 200_000

WAVE_DEPTH = 0.3  # bulge amplitude is WAVE_DEPTH / K, which keeps the curve monotone


@dataclass(frozen=True)
class FrontSpec:
    """Which front to sample: ``kind``, objective count ``m``, knee count, size."""

    kind: str
    m: int = 3
    knees: Optional[int] = None
    size: int = 100

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown front kind {self.kind!r}; expected one of {KINDS}")
        if self.m < 2:
            raise ValueError("a front needs at least 2 objectives")
        if self.kind in ("deb2dk", "wave") and self.m != 2:
            raise ValueError(f"{self.kind} is a 2-objective front, got m={self.m}")
        if self.kind == "deb3dk" and self.m != 3:
            raise ValueError(f"deb3dk is a 3-objective front, got m={self.m}")
        if self.kind in KNEE_KINDS:
            if self.knees is None:
                object.__setattr__(self, "knees", DEFAULT_KNEES[self.kind])
            elif self.knees < 1:
                raise ValueError("knees must be >= 1")
        elif self.knees is not None:
            raise ValueError(f"knees only applies to {KNEE_KINDS}")
        if self.size < 1:
            raise ValueError("size must be >= 1")


# ---------------------------------------------------------------------------
# sampling primitives
# ---------------------------------------------------------------------------


def _simplex(rng: RngStream, n: int, m: int) -> np.ndarray:
    E = rng.standard_exponential((n, m))
    return E / E.sum(axis=1, keepdims=True)


def _sphere(rng: RngStream, n: int, m: int) -> np.ndarray:
    G = np.abs(rng.standard_normal((n, m)))
    return G / np.linalg.norm(G, axis=1, keepdims=True)


# ---------------------------------------------------------------------------
# Pareto-optimal parameter intervals for the disconnected fronts
# ---------------------------------------------------------------------------


def _dtlz7_gain(x):
    return x * (1.0 + np.sin(3.0 * np.pi * x))


def _dtlz7_gain_slope(x):
    return 1.0 + np.sin(3.0 * np.pi * x) + 3.0 * np.pi * x * np.cos(3.0 * np.pi * x)


def _wfg2_gain(x):
    # negated WFG2 disconnected shape: 1 - x cos^2(5 pi x)
    return x * np.cos(5.0 * np.pi * x) ** 2 - 1.0


def _wfg2_gain_slope(x):
    return np.cos(5.0 * np.pi * x) ** 2 - 5.0 * np.pi * x * np.sin(10.0 * np.pi * x)


@functools.lru_cache(maxsize=None)
def _local_maxima(name: str) -> tuple[np.ndarray, np.ndarray]:
    fn, slope = {
        "dtlz7": (_dtlz7_gain, _dtlz7_gain_slope),
        "wfg2": (_wfg2_gain, _wfg2_gain_slope),
    }[name]
    grid = np.linspace(0.0, 1.0, 100_001)
    s = slope(grid)
    locs = [brentq(slope, grid[i], grid[i + 1], xtol=1e-15) for i in np.flatnonzero((s[:-1] > 0) & (s[1:] <= 0))]
    locs = np.asarray(locs)
    return locs, np.maximum.accumulate(fn(locs))


def _pareto_parameter_mask(name: str, x: np.ndarray) -> np.ndarray:
    """True where no smaller parameter value has a larger gain (so ``x`` is Pareto-optimal)."""
    fn = _dtlz7_gain if name == "dtlz7" else _wfg2_gain
    locs, best = _local_maxima(name)
    pos = np.searchsorted(locs, x, side="left")
    prior = np.where(pos > 0, best[np.maximum(pos - 1, 0)], -np.inf)
    return fn(x) >= prior


def _accepted(rng: RngStream, n: int, draw, accept) -> np.ndarray:
    out = []
    count = 0
    while count < n:
        batch = max(2 * (n - count), 1024)
        raw = draw(batch)
        kept = raw[accept(raw)]
        out.append(kept)
        count += len(kept)
    return np.concatenate(out)[:n]


def _dtlz7(rng: RngStream, n: int, m: int) -> np.ndarray:
    # acceptance is coordinatewise and draws are i.i.d., so rejecting each
    # coordinate separately gives the same law as rejecting whole rows
    def draw(b):
        return rng.uniform(0.0, 1.0, b)

    def accept(x):
        return _pareto_parameter_mask("dtlz7", x)

    cols = [_accepted(rng, n, draw, accept) for _ in range(m - 1)]
    return dtlz7_objectives(np.column_stack(cols))


def dtlz7_objectives(params: np.ndarray) -> np.ndarray:
    """DTLZ7 points at minimal ``g = 1`` for leading objectives ``params`` (shape ``(n, m-1)``)."""
    P = np.atleast_2d(np.asarray(params, dtype=np.float64))
    m = P.shape[1] + 1
    return np.column_stack([P, 2.0 * m - _dtlz7_gain(P).sum(axis=1)])


def wfg2_objectives(params: np.ndarray) -> np.ndarray:
    """WFG2 front points for position parameters ``params`` (shape ``(n, m-1)``)."""
    P = np.atleast_2d(np.asarray(params, dtype=np.float64))
    n, k = P.shape
    m = k + 1
    one_minus_cos = 1.0 - np.cos(P * np.pi / 2.0)
    one_minus_sin = 1.0 - np.sin(P * np.pi / 2.0)
    h = np.empty((n, m))
    h[:, 0] = np.prod(one_minus_cos, axis=1)
    for j in range(2, m):  # objectives 2..m-1
        h[:, j - 1] = np.prod(one_minus_cos[:, : m - j], axis=1) * one_minus_sin[:, m - j]
    x1 = P[:, 0]
    h[:, m - 1] = 1.0 - x1 * np.cos(5.0 * np.pi * x1) ** 2
    return h * (2.0 * np.arange(1, m + 1))


def _wfg2(rng: RngStream, n: int, m: int) -> np.ndarray:
    def draw(b):
        return rng.uniform(0.0, 1.0, (b, m - 1))

    def accept(P):
        return _pareto_parameter_mask("wfg2", P[:, 0])

    return wfg2_objectives(_accepted(rng, n, draw, accept))


# ---------------------------------------------------------------------------
# knee fronts
# ---------------------------------------------------------------------------


def knee_radius(t, knees: int):
    """Radial profile ``5 + 10 (t - 0.5)^2 + cos(2 K pi t) / K``; its minima are the knees."""
    t = np.asarray(t, dtype=np.float64)
    return 5.0 + 10.0 * (t - 0.5) ** 2 + np.cos(2.0 * knees * np.pi * t) / knees


def deb2dk_objectives(t, knees: int = 3) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    r = knee_radius(t, knees)
    return np.column_stack([r * np.sin(t * np.pi / 2.0), r * np.cos(t * np.pi / 2.0)])


def deb3dk_objectives(u, v, knees: int = 1) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    r = (knee_radius(u, knees) + knee_radius(v, knees)) / 2.0
    su, cu = np.sin(u * np.pi / 2.0), np.cos(u * np.pi / 2.0)
    sv, cv = np.sin(v * np.pi / 2.0), np.cos(v * np.pi / 2.0)
    return np.column_stack([r * su * sv, r * su * cv, r * cu])


def wave_objectives(t, knees: int = 3) -> np.ndarray:
    """Linear trade-off ``f2 = 1 - f1`` with ``K`` bulges toward the origin."""
    t = np.asarray(t, dtype=np.float64)
    depth = WAVE_DEPTH / knees
    return np.column_stack([t, 1.0 - t - depth * np.sin(knees * np.pi * t) ** 2])


def _oversample_filter(rng: RngStream, n: int, draw, factor: int = 4, floor: int = 20_000) -> np.ndarray:
    raw = draw(max(factor * n, floor))
    front = nondominated_filter(raw)
    while len(front) < n:
        front = nondominated_filter(np.vstack([front, draw(max(factor * n, floor))]))
    return front[rng.choice(len(front), n, replace=False)]


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def sample_front(spec: FrontSpec, rng=None) -> np.ndarray:
    """Draw ``spec.size`` points from the Pareto front described by ``spec``."""
    rng = make_rng(rng)
    n, m, kind = spec.size, spec.m, spec.kind
    if kind == "linear":
        return 0.5 * _simplex(rng, n, m)
    if kind == "concave":
        return _sphere(rng, n, m)
    if kind == "convex":
        U = _sphere(rng, n, m)
        return np.column_stack([U[:, : m - 1] ** 4, U[:, m - 1] ** 2])
    if kind == "inverted":
        return 1.0 - _sphere(rng, n, m)
    if kind == "dtlz7":
        return _dtlz7(rng, n, m)
    if kind == "wfg2":
        return _wfg2(rng, n, m)
    K = spec.knees
    if kind == "deb2dk":
        return _oversample_filter(rng, n, lambda b: deb2dk_objectives(rng.uniform(0.0, 1.0, b), K))
    if kind == "deb3dk":
        return _oversample_filter(
            rng, n, lambda b: deb3dk_objectives(rng.uniform(0.0, 1.0, b), rng.uniform(0.0, 1.0, b), K)
        )
    return _oversample_filter(rng, n, lambda b: wave_objectives(rng.uniform(0.0, 1.0, b), K))


def candidate_sets(spec: FrontSpec, sizes, rng=None, pool: int = DEFAULT_POOL) -> list[np.ndarray]:
    """Draw one pool of ``pool`` front points, then subsample each requested size from it."""
    rng = make_rng(rng)
    sizes = [int(s) for s in sizes]
    for s in sizes:
        if s < 1:
            raise ValueError("candidate set sizes must be >= 1")
        if s > pool:
            raise ValueError(f"size {s} exceeds the pool of {pool} points")
    P = sample_front(replace(spec, size=pool), rng)
    return [P[rng.choice(pool, s, replace=False)] for s in sizes]


def knee_parameters(knees: int = 3, resolution: int = 1_000_001) -> np.ndarray:
    """Interior local minima of :func:`knee_radius` located on a uniform grid."""
    t = np.linspace(0.0, 1.0, resolution)
    r = knee_radius(t, knees)
    inner = np.flatnonzero((r[1:-1] < r[:-2]) & (r[1:-1] <= r[2:])) + 1
    return t[inner]
