"""Command-line entry point: ``clustsel {generate,select,bench,stats,rank,plot}``.

Exit codes: 0 success, 1 usage error, 2 runtime or I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from collections import defaultdict

from . import bench
from .core import RngStream, read_points_csv, write_points_csv
from .fronts import KINDS, FrontSpec, candidate_sets, sample_front
from .metrics import igd
from .selection import AlgoKind, run_clustering, subset_from_clusters

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="clustsel", description="Clustering-based subset selection toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="sample a Pareto front to CSV")
    p.add_argument("--front", required=True, choices=KINDS)
    p.add_argument("--objectives", required=True, type=int)
    p.add_argument("--size", required=True, type=int)
    p.add_argument("--knees", type=int)
    p.add_argument("--pool", type=int, help="draw a pool of this size and subsample from it")
    p.add_argument("--seed", required=True, type=_u64)
    p.add_argument("--out", required=True)

    p = sub.add_parser("select", help="select a subset from a point CSV")
    p.add_argument("--algo", required=True, choices=[a.value for a in AlgoKind])
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--strategy", type=int, choices=[1, 2])
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--seed", required=True, type=_u64)
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="write igd, time_ms, iterations and indices as JSON")

    p = sub.add_parser("bench", help="run a benchmark grid from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("stats", help="Strategy 2 vs Strategy 1 rank-sum verdicts")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--test", default="wilcoxon", choices=["wilcoxon"])
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--group-by", default="front", choices=["front"])
    p.add_argument("--compare", default="strategy", choices=["strategy"])

    p = sub.add_parser("rank", help="per-front ranks and average ranks")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--strategy", type=int, choices=[1, 2], default=2,
                   help="representative strategy to rank when both are present (default 2)")

    p = sub.add_parser("plot", help="normalized IGD vs time scatter plot (SVG)")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--log-time", action="store_true")
    p.add_argument("--strategy", type=int, choices=[1, 2], default=2)
    return parser


def _cmd_generate(args) -> int:
    if args.size < 1:
        raise UsageError("--size must be >= 1")
    try:
        spec = FrontSpec(args.front, args.objectives, args.knees, args.size)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rng = RngStream(args.seed)
    if args.pool is not None:
        if args.pool < args.size:
            raise UsageError("--pool must be at least --size")
        points = candidate_sets(spec, [args.size], rng, pool=args.pool)[0]
    else:
        points = sample_front(spec, rng)
    write_points_csv(points, args.out)
    return EXIT_OK


def _cmd_select(args) -> int:
    algo = AlgoKind.parse(args.algo)
    X = read_points_csv(args.inp)
    if not 1 <= args.k <= len(X):
        raise UsageError(f"--k must lie in [1, {len(X)}]")
    strategy = args.strategy
    if not algo.uses_strategy:
        if strategy is not None:
            print(f"clustsel select: warning: {algo.value} returns its own centers; --strategy is ignored", file=sys.stderr)
        strategy = None
    elif strategy is None:
        strategy = 2
    t0 = time.perf_counter()
    result = run_clustering(X, algo, args.k, args.seed)
    subset = result.indices if result.indices is not None else subset_from_clusters(X, result.labels, strategy)
    elapsed = (time.perf_counter() - t0) * 1e3
    write_points_csv(X[subset], args.out)
    if args.report:
        report = {
            "algo": algo.value,
            "k": args.k,
            "strategy": strategy,
            "seed": args.seed,
            "igd": igd(X[subset], X),
            "time_ms": elapsed,
            "iterations": int(result.n_iter),
            "indices": [int(i) for i in subset],
        }
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    return EXIT_OK


def _cmd_bench(args) -> int:
    try:
        config = bench.BenchConfig.from_json(args.config)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, json.JSONDecodeError):
            raise
        raise UsageError(f"invalid bench config: {exc}") from None

    def progress(row):
        logging.getLogger("clustsel").info(
            "%s m=%d n=%d %s run=%d igd=%.4e %.1f ms", row.front, row.m, row.n, row.label, row.run, row.igd, row.time_ms
        )

    rows = bench.run_experiment(config, progress)
    bench.emit_results_csv(rows, args.out)
    return EXIT_OK


def _pick_strategy(rows, strategy):
    return [r for r in rows if r.strategy in (None, strategy)]


def _cmd_stats(args) -> int:
    if not 0 < args.alpha < 1:
        raise UsageError("--alpha must lie in (0, 1)")
    rows = bench.read_results_csv(args.inp)
    verdicts = bench.strategy_verdicts(rows, args.alpha)
    if not verdicts:
        print("no algorithm has results for both strategies")
        return EXIT_OK
    print(bench.format_strategy_table(verdicts))
    return EXIT_OK


def _cmd_rank(args) -> int:
    rows = _pick_strategy(bench.read_results_csv(args.inp), args.strategy)
    groups = defaultdict(list)
    for r in rows:
        groups[r.m, r.n].append(r)
    for (m, n), group in sorted(groups.items()):
        print(f"# m={m} n={n}")
        print(bench.rank_table(group).format())
        print()
    return EXIT_OK


def _cmd_plot(args) -> int:
    rows = _pick_strategy(bench.read_results_csv(args.inp), args.strategy)
    bench.emit_scatter_plot(rows, args.out, log_time=args.log_time)
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "select": _cmd_select,
    "bench": _cmd_bench,
    "stats": _cmd_stats,
    "rank": _cmd_rank,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"clustsel {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"clustsel {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
