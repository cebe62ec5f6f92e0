"""Command line interface.

Exit status is 0 on success, 2 on bad arguments and 1 when the run fails.
"""
from __future__ import annotations

import argparse
import csv
import sys
import time
from typing import List, Optional

from . import __version__
from .baselines import afu_count, sv_count
from .bench import ALGORITHMS, CSV_COLUMNS, BenchmarkSpec, load_manifest, rows_to_csv, rows_to_table, run_benchmark
from .engine import METRIC_COLUMNS, RunReport
from .exact import MAX_K, MIN_K, fff_count, per_node_csv
from .generators import DEFAULT_PA_MU, DEFAULT_PA_N, pa_edges
from .graph import high_degree_bound, load_graph
from .kernel import count_graph_cliques
from .sampling import SamplingConfig, concentration_check, estimate

COUNT_COLUMNS = ("algorithm", "k", "count", "wall_ms")
ESTIMATE_COLUMNS = ("seed", "estimate", "rounded", "rel_error", "elapsed_ms")
STATS_COLUMNS = ("n", "m", "input_edges", "self_loops", "duplicates", "max_degree",
                 "max_high_degree", "high_degree_bound", "bound_holds")


class ArgumentError(Exception):
    pass


def parse_k(text: str) -> List[int]:
    """``"4"``, ``"3-7"`` or ``"3,5,6"``."""
    try:
        if "-" in text:
            lo, hi = (int(x) for x in text.split("-", 1))
            ks = list(range(lo, hi + 1))
        else:
            ks = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad k specification {text!r}")
    if not ks:
        raise argparse.ArgumentTypeError(f"empty k range {text!r}")
    bad = [k for k in ks if not MIN_K <= k <= MAX_K]
    if bad:
        raise argparse.ArgumentTypeError(f"k must lie in [{MIN_K}, {MAX_K}], got {bad[0]}")
    return ks


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _common(p: argparse.ArgumentParser, k_default: Optional[str] = "3"):
    p.add_argument("--input", "-i", help="edge list path (SNAP format, optionally gzipped)")
    p.add_argument("--k", type=parse_k, default=parse_k(k_default) if k_default else None,
                   help="clique size: K, K1-K2 or a comma list")
    p.add_argument("--workers", "-w", type=_positive_int, default=1)
    p.add_argument("--deterministic", action="store_true",
                   help="sort keys and values in every shuffle (reproducible metrics)")
    p.add_argument("--metrics-out", help="write per-round engine metrics CSV here")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "table"), default="table")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cliquemr",
        description="Count and estimate k-cliques with in-process MapReduce rounds.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=("CSV columns\n"
                f"  count:     {','.join(COUNT_COLUMNS)}\n"
                f"  estimate:  {','.join(ESTIMATE_COLUMNS)}\n"
                f"  stats:     {','.join(STATS_COLUMNS)}\n"
                f"  bench:     {','.join(CSV_COLUMNS)}\n"
                f"  metrics:   round_index,workers,{','.join(METRIC_COLUMNS)}\n"
                "exit status: 0 ok, 2 bad arguments, 1 runtime failure"))
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", help="exact k-clique count",
                       description="Exact count. CSV columns: " + ",".join(COUNT_COLUMNS))
    _common(c)
    c.add_argument("--algo", choices=("fff", "sv", "afu", "kernel"), default="fff",
                   help="fff: three rounds; sv: two-round triangles; afu: one round with "
                        "bucket replication; kernel: sequential")
    c.add_argument("--backend", choices=("blocks", "records"), default="blocks")
    c.add_argument("--delayed-paths", action="store_true",
                   help="sv only: generate length-2 paths in the round-2 mappers")
    c.add_argument("--buckets", "-b", type=_positive_int, default=2,
                   help="afu only: bucket count; a common choice makes C(b+k-1,k) "
                        "close to the available reducers")
    c.add_argument("--per-node-out", help="fff only: write node,count CSV of clique incidence")

    e = sub.add_parser("estimate", help="sampled k-clique estimate",
                       description="Sampled estimate, one row per seed. CSV columns: "
                                   + ",".join(ESTIMATE_COLUMNS))
    _common(e)
    e.add_argument("--mode", choices=("plain", "color"), default="color")
    e.add_argument("--p", type=float, default=0.1, help="plain: pair keep probability")
    e.add_argument("--colors", "-c", type=_positive_int, default=10, help="color: color count")
    e.add_argument("--repeat", type=_positive_int, default=1, help="runs with seeds seed..seed+N-1")
    e.add_argument("--reference", type=int, help="exact count, to report relative error")
    e.add_argument("--check-concentration", action="store_true",
                   help="print both sides of the concentration condition (constant 1); advisory")
    e.add_argument("--backend", choices=("blocks", "records"), default="blocks")

    g = sub.add_parser("gen-pa", help="write a preferential-attachment edge list")
    g.add_argument("--n", type=_positive_int, default=DEFAULT_PA_N)
    g.add_argument("--mu", type=_positive_int, default=DEFAULT_PA_MU)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", "-o", help="destination (default stdout)")

    b = sub.add_parser("bench", help="run datasets x algorithms x k",
                       description="Benchmark rows. CSV columns: " + ",".join(CSV_COLUMNS))
    _common(b, k_default="3")
    b.add_argument("--manifest", help="JSON object mapping dataset names to edge-list paths")
    b.add_argument("--algos", default="fff", help=f"comma list from {','.join(ALGORITHMS)}")
    b.add_argument("--buckets", "-b", type=_positive_int, default=2)
    b.add_argument("--p", type=float, default=0.1)
    b.add_argument("--colors", "-c", type=_positive_int, default=10)
    b.add_argument("--repeat", type=_positive_int, default=1, help="seeds per sampling/afu row")

    s = sub.add_parser("stats", help="ingestion and orientation statistics",
                       description="Graph statistics. CSV columns: " + ",".join(STATS_COLUMNS))
    s.add_argument("--input", "-i", required=True)
    s.add_argument("--format", choices=("csv", "table"), default="table")
    return parser


def _emit(columns, rows, fmt, out):
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)
        return
    cells = [[str(x) for x in r] for r in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    for line in [list(columns)] + cells:
        out.write("  ".join(x.ljust(w) for x, w in zip(line, widths)).rstrip() + "\n")


def _write_metrics(path: Optional[str], reports: List[RunReport]):
    if not path:
        return
    with open(path, "w", newline="") as fh:
        for i, r in enumerate(reports):
            text = r.to_csv()
            fh.write(text if i == 0 else text.split("\n", 1)[1])


def _need_input(args):
    if not args.input:
        raise ArgumentError("--input is required")


def cmd_count(args, out) -> int:
    _need_input(args)
    if args.algo == "sv" and args.k != [3]:
        raise ArgumentError("--algo sv counts triangles only (--k 3)")
    if args.per_node_out and args.algo != "fff":
        raise ArgumentError("--per-node-out needs --algo fff")
    g = load_graph(args.input)
    rows, reports, per_node = [], [], {}
    for k in args.k:
        t0 = time.perf_counter()
        if args.algo == "fff":
            r = fff_count(g, k, args.workers, per_node=bool(args.per_node_out),
                          deterministic=args.deterministic, backend=args.backend)
            q, report = r.q_k, r.run_report
            if r.per_node:
                per_node = r.per_node
        elif args.algo == "sv":
            r = sv_count(g, args.workers, args.delayed_paths, args.deterministic)
            q, report = r.q_k, r.run_report
        elif args.algo == "afu":
            r = afu_count(g, k, args.buckets, args.workers, args.seed, args.deterministic)
            q, report = r.q_k, r.run_report
        else:
            q, report = count_graph_cliques(g, k), None
        name = args.algo + ("-delayed" if args.algo == "sv" and args.delayed_paths else "")
        rows.append((name, k, q, f"{(time.perf_counter() - t0) * 1000:.1f}"))
        if report is not None:
            reports.append(report)
    _emit(COUNT_COLUMNS, rows, args.format, out)
    _write_metrics(args.metrics_out, reports)
    if args.per_node_out:
        with open(args.per_node_out, "w") as fh:
            per_node_csv(per_node, fh)
    return 0


def cmd_estimate(args, out) -> int:
    _need_input(args)
    if len(args.k) != 1:
        raise ArgumentError("estimate takes a single --k")
    if args.mode == "plain" and not 0.0 < args.p <= 1.0:
        raise ArgumentError("--p must lie in (0, 1]")
    k = args.k[0]
    g = load_graph(args.input)
    rows, reports = [], []
    for seed in range(args.seed, args.seed + args.repeat):
        config = (SamplingConfig.plain(args.p, seed) if args.mode == "plain"
                  else SamplingConfig.color(args.colors, seed))
        t0 = time.perf_counter()
        est = estimate(g, k, config, args.workers, args.deterministic, args.backend)
        elapsed = (time.perf_counter() - t0) * 1000
        rel = "" if args.reference is None else f"{est.relative_error(args.reference):.6g}"
        rows.append((seed, repr(est.value), round(est.value), rel, f"{elapsed:.1f}"))
        reports.append(est.run_report)
    _emit(ESTIMATE_COLUMNS, rows, args.format, out)
    _write_metrics(args.metrics_out, reports)
    if args.check_concentration:
        ref = args.reference if args.reference is not None else sum(float(r[1]) for r in rows) / len(rows)
        config = (SamplingConfig.plain(args.p) if args.mode == "plain"
                  else SamplingConfig.color(args.colors))
        chk = concentration_check(g.m, ref, k, config)
        sys.stderr.write(f"concentration (advisory, constant 1): lhs={chk['lhs']:.6g} "
                         f"rhs={chk['rhs']:.6g} holds={chk['holds']}\n")
    return 0


def cmd_gen_pa(args, out) -> int:
    if args.n < args.mu + 1:
        raise ArgumentError("--n must be at least --mu + 1")
    edges = pa_edges(args.n, args.mu, args.seed)
    header = f"# preferential attachment n={args.n} mu={args.mu} seed={args.seed} edges={len(edges)}\n"
    body = "\n".join(f"{a}\t{b}" for a, b in edges.tolist())
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(header + body + "\n")
    else:
        out.write(header + body + "\n")
    return 0


def cmd_bench(args, out) -> int:
    datasets = {}
    if args.manifest:
        datasets.update(load_manifest(args.manifest))
    if args.input:
        datasets[args.input] = args.input
    algos = [a for a in args.algos.split(",") if a]
    unknown = [a for a in algos if a not in ALGORITHMS]
    if unknown:
        raise ArgumentError(f"unknown algorithm {unknown[0]!r}")
    if not 0.0 < args.p <= 1.0:
        raise ArgumentError("--p must lie in (0, 1]")
    spec = BenchmarkSpec(datasets, algos, args.k, args.workers, args.deterministic,
                         args.buckets, args.p, args.colors,
                         list(range(args.seed, args.seed + args.repeat)))
    rows = run_benchmark(spec)
    (rows_to_csv if args.format == "csv" else rows_to_table)(rows, out)
    return 0 if all(r.ok for r in rows) else 1


def cmd_stats(args, out) -> int:
    g = load_graph(args.input)
    bound = high_degree_bound(g.m)
    rep = g.report
    row = (g.n, g.m, rep.input_edges, rep.self_loops, rep.duplicates,
           int(g.degree.max()) if g.n else 0, g.max_high_degree, f"{bound:.3f}",
           g.max_high_degree <= bound)
    if args.format == "csv":
        _emit(STATS_COLUMNS, [row], "csv", out)
    else:
        width = max(len(c) for c in STATS_COLUMNS)
        for c, v in zip(STATS_COLUMNS, row):
            out.write(f"{c.ljust(width)}  {v}\n")
    return 0


COMMANDS = {"count": cmd_count, "estimate": cmd_estimate, "gen-pa": cmd_gen_pa,
            "bench": cmd_bench, "stats": cmd_stats}


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except ArgumentError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"cliquemr {args.command}: error: {exc}\n")
        return 2
    except KeyboardInterrupt:
        return 130
    except Exception as exc:
        sys.stderr.write(f"cliquemr {args.command}: {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
