"""Benchmark runner, rank tables, strategy comparison and CSV/SVG reporting."""

from __future__ import annotations

import csv
import json
import logging
import os
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.stats import rankdata

from .core import make_rng
from .fronts import DEFAULT_POOL, FrontSpec, candidate_sets
from .metrics import igd
from .selection import BENCHMARK_ALGOS, AlgoKind, run_clustering, subset_from_clusters
from .stats import wilcoxon_rank_sum

log = logging.getLogger(__name__)

CSV_HEADER = ["front", "m", "n", "k", "algo", "strategy", "run", "seed", "igd", "time_ms"]


@dataclass
class BenchConfig:
    fronts: list  # FrontSpec (size is ignored; ``sizes`` decides)
    sizes: list
    k: int = 100
    algorithms: list = field(default_factory=lambda: [a.value for a in BENCHMARK_ALGOS])
    strategies: list = field(default_factory=lambda: [2])
    runs: int = 11
    base_seed: int = 0
    time_limit_per_run: Optional[float] = None  # seconds
    pool: int = DEFAULT_POOL

    def __post_init__(self):
        self.fronts = [f if isinstance(f, FrontSpec) else FrontSpec(**f) for f in self.fronts]
        self.algorithms = [AlgoKind.parse(a) for a in self.algorithms]
        self.sizes = [int(s) for s in self.sizes]
        self.strategies = [int(s) for s in self.strategies]
        if not self.fronts or not self.sizes:
            raise ValueError("need at least one front and one size")
        if not self.algorithms:
            raise ValueError("algorithm list must not be empty")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not self.strategies or any(s not in (1, 2) for s in self.strategies):
            raise ValueError("strategies must be a non-empty subset of {1, 2}")
        if self.k < 1 or self.k > min(self.sizes):
            raise ValueError(f"k={self.k} must lie in [1, min(sizes)={min(self.sizes)}]")

    @classmethod
    def from_json(cls, path) -> "BenchConfig":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise ValueError("bench config must be a JSON object")
        return cls(**doc)


@dataclass
class ResultRow:
    front: str
    m: int
    n: int
    k: int
    algo: str
    strategy: Optional[int]
    run: int
    seed: int
    igd: float
    time_ms: float
    over_time: bool = False

    @property
    def label(self) -> str:
        return self.algo if self.strategy is None else f"{self.algo}/s{self.strategy}"


def _data_seed(base_seed: int, front_index: int) -> int:
    # per-front data stream derived from the config alone, never from execution order
    seq = np.random.SeedSequence(entropy=int(base_seed), spawn_key=(int(front_index),))
    return int(seq.generate_state(1, np.uint64)[0])


def run_experiment(config: BenchConfig, progress=None) -> list[ResultRow]:
    """Run every (front, size, algorithm, strategy, run) cell of ``config``.

    Selector seeds are ``base_seed + run``. K-means++ and hierarchical
    clustering run once per cell and run; the requested strategies then pick
    representatives from that same clustering, so strategy comparisons are
    paired. Timing covers clustering plus representative picking only.
    """
    rows: list[ResultRow] = []
    for fi, spec in enumerate(config.fronts):
        datasets = candidate_sets(spec, config.sizes, make_rng(_data_seed(config.base_seed, fi)), config.pool)
        for n, X in zip(config.sizes, datasets):
            for algo in config.algorithms:
                for run in range(config.runs):
                    seed = config.base_seed + run
                    t0 = time.perf_counter()
                    result = run_clustering(X, algo, config.k, seed)
                    cluster_ms = (time.perf_counter() - t0) * 1e3
                    if result.indices is not None:
                        outcomes = [(None, result.indices, cluster_ms)]
                    else:
                        outcomes = []
                        for strategy in config.strategies:
                            t1 = time.perf_counter()
                            subset = subset_from_clusters(X, result.labels, strategy)
                            outcomes.append((strategy, subset, cluster_ms + (time.perf_counter() - t1) * 1e3))
                    for strategy, subset, ms in outcomes:
                        over = config.time_limit_per_run is not None and ms > 1e3 * config.time_limit_per_run
                        if over:
                            log.warning("%s on %s n=%d run %d exceeded the time limit", algo.value, spec.kind, n, run)
                        row = ResultRow(
                            spec.kind, spec.m, n, config.k, algo.value, strategy, run, seed,
                            igd(X[subset], X), ms, over,
                        )
                        rows.append(row)
                        if progress is not None:
                            progress(row)
    return rows


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def emit_results_csv(rows, path) -> None:
    """Write result rows; an ``over_time`` column is appended only if some row is flagged."""
    flagged = any(r.over_time for r in rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER + (["over_time"] if flagged else []))
        for r in rows:
            line = [
                r.front, r.m, r.n, r.k, r.algo, "-" if r.strategy is None else r.strategy,
                r.run, r.seed, f"{r.igd:.16e}", repr(float(r.time_ms)),
            ]
            if flagged:
                line.append(int(r.over_time))
            writer.writerow(line)


def read_results_csv(path) -> list[ResultRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[: len(CSV_HEADER)] != CSV_HEADER:
            raise ValueError(f"{os.fspath(path)}: expected header {','.join(CSV_HEADER)}")
        flagged = len(header) > len(CSV_HEADER)
        rows = []
        for line in reader:
            if not line:
                continue
            front, m, n, k, algo, strategy, run, seed, value, ms = line[: len(CSV_HEADER)]
            rows.append(
                ResultRow(
                    front, int(m), int(n), int(k), algo, None if strategy == "-" else int(strategy),
                    int(run), int(seed), float(value), float(ms),
                    bool(int(line[len(CSV_HEADER)])) if flagged else False,
                )
            )
    return rows


# ---------------------------------------------------------------------------
# ranking and strategy comparison
# ---------------------------------------------------------------------------


@dataclass
class RankTable:
    fronts: list  # front labels, in first-seen order
    algorithms: list  # algorithm labels, in first-seen order
    mean_igd: dict  # (front, algo) -> mean IGD
    ranks: dict  # (front, algo) -> rank (midranks on ties)
    average_rank: dict  # algo -> mean rank over fronts

    def format(self) -> str:
        width = max(12, *(len(a) + 2 for a in self.algorithms))
        lines = ["front".ljust(14) + "".join(a.rjust(width + 6) for a in self.algorithms)]
        for f in self.fronts:
            cells = "".join(
                f"{self.mean_igd[f, a]:.4E} ({self.ranks[f, a]:g})".rjust(width + 6) for a in self.algorithms
            )
            lines.append(f.ljust(14) + cells)
        lines.append("Avg. Rank".ljust(14) + "".join(f"{self.average_rank[a]:.3g}".rjust(width + 6) for a in self.algorithms))
        return "\n".join(lines)


def _front_label(r: ResultRow) -> str:
    return f"{r.front}-m{r.m}"


def _group_rows(rows):
    """Mean IGD and time per (front label, algo label), checking for one size only."""
    if not rows:
        raise ValueError("no result rows")
    sizes = {r.n for r in rows}
    if len(sizes) != 1:
        raise ValueError(f"rows mix data-set sizes {sorted(sizes)}; rank one size at a time")
    by_algo_strats = defaultdict(set)
    for r in rows:
        by_algo_strats[r.algo].add(r.strategy)
    use_strategy = any(len(s) > 1 for s in by_algo_strats.values())
    igds, times = defaultdict(list), defaultdict(list)
    fronts, algos = [], []
    for r in rows:
        f = _front_label(r)
        a = r.label if use_strategy else r.algo
        if f not in fronts:
            fronts.append(f)
        if a not in algos:
            algos.append(a)
        igds[f, a].append(r.igd)
        times[f, a].append(r.time_ms)
    missing = [(f, a) for f in fronts for a in algos if (f, a) not in igds]
    if missing:
        raise ValueError(f"missing grid cells: {missing}")
    mean_igd = {key: float(np.mean(v)) for key, v in igds.items()}
    mean_time = {key: float(np.mean(v)) for key, v in times.items()}
    return fronts, algos, mean_igd, mean_time


def rank_table(rows) -> RankTable:
    """Per-front mean IGD and ranks (1 = lowest IGD) plus the average rank per algorithm."""
    fronts, algos, mean_igd, _ = _group_rows(rows)
    ranks = {}
    for f in fronts:
        for a, rk in zip(algos, rankdata([mean_igd[f, a] for a in algos], method="average")):
            ranks[f, a] = float(rk)
    average = {a: float(np.mean([ranks[f, a] for f in fronts])) for a in algos}
    return RankTable(fronts, algos, mean_igd, ranks, average)


def strategy_verdicts(rows, alpha: float = 0.1) -> dict:
    """Strategy 2 vs Strategy 1 per (algo, m, n, front): rank-sum verdict from Strategy 2's side."""
    groups = defaultdict(lambda: {1: [], 2: []})
    for r in rows:
        if r.strategy in (1, 2):
            groups[r.algo, r.m, r.n, r.front][r.strategy].append(r.igd)
    out = {}
    for key, samples in groups.items():
        if samples[1] and samples[2]:
            out[key] = wilcoxon_rank_sum(samples[1], samples[2], alpha)
    return out


def format_strategy_table(verdicts: dict) -> str:
    counts = defaultdict(lambda: {"+": 0, "=": 0, "-": 0})
    for (algo, m, n, _front), res in verdicts.items():
        counts[m, n, algo][res.verdict] += 1
    lines = ["m  n       algo          +/=/-"]
    for (m, n, algo) in sorted(counts):
        c = counts[m, n, algo]
        lines.append(f"{m:<2} {n:<7} {algo:<13} {c['+']}/{c['=']}/{c['-']}")
    lines.append("")
    lines.append("per front:")
    for (algo, m, n, front), res in sorted(verdicts.items()):
        lines.append(f"  {algo:<13} m={m} n={n} {front:<9} p={res.p_value:.4g} {res.verdict}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# IGD vs time scatter plot
# ---------------------------------------------------------------------------


def normalized_summary(rows) -> dict:
    """Per algorithm: (mean normalized time, mean normalized IGD).

    Each front's per-algorithm means are divided by that front's largest mean
    before averaging over fronts.
    """
    fronts, algos, mean_igd, mean_time = _group_rows(rows)
    acc = {a: [0.0, 0.0] for a in algos}
    for f in fronts:
        top_igd = max(mean_igd[f, a] for a in algos)
        top_time = max(mean_time[f, a] for a in algos)
        for a in algos:
            acc[a][0] += mean_time[f, a] / top_time if top_time > 0 else 1.0
            acc[a][1] += mean_igd[f, a] / top_igd if top_igd > 0 else 1.0
    return {a: (acc[a][0] / len(fronts), acc[a][1] / len(fronts)) for a in algos}


def emit_scatter_plot(rows, path, log_time: bool = False) -> dict:
    """Write an SVG of normalized mean IGD against normalized mean time; returns the plotted points."""
    if not rows:
        raise ValueError("cannot plot an empty result set")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    points = normalized_summary(rows)
    markers = "osD^v<>ph*"
    with matplotlib.rc_context({"svg.hashsalt": "clustsel", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(5.0, 4.0))
        for i, (algo, (x, y)) in enumerate(points.items()):
            ax.scatter([x], [y], marker=markers[i % len(markers)], s=60, label=algo)
        if log_time:
            ax.set_xscale("log")
            lo = min(x for x, _ in points.values())
            ax.set_xlim(lo / 2 if lo > 0 else 1e-4, 1.5)
        else:
            ax.set_xlim(0.0, 1.05)
        ax.set_ylim(0.0, 1.05)
        ax.set_xlabel("normalized mean time" + (" (log)" if log_time else ""))
        ax.set_ylabel("normalized mean IGD")
        ax.legend(loc="best", fontsize="small")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return points


def summarize_times(rows) -> dict:
    """Mean selector time (ms) per algorithm label."""
    acc = defaultdict(list)
    for r in rows:
        acc[r.label].append(r.time_ms)
    return {a: float(np.mean(v)) for a, v in acc.items()}
