"""Benchmark orchestration: datasets x algorithms x k, one row per run."""
from __future__ import annotations

import csv
import io
import json
import os
import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Union

from .baselines import afu_count, sv_count
from .exact import fff_count
from .graph import Graph, load_graph
from .kernel import count_graph_cliques
from .sampling import SamplingConfig, estimate

EXACT_ALGORITHMS = ("fff", "sv", "sv-delayed", "afu", "kernel")
SAMPLING_ALGORITHMS = ("plain", "color")
ALGORITHMS = EXACT_ALGORITHMS + SAMPLING_ALGORITHMS

CSV_COLUMNS = ("dataset", "algorithm", "k", "workers", "b", "p", "c", "seed", "result",
               "rel_error", "growth", "wall_ms", "round_ms", "emitted_pairs",
               "max_group_size", "error")


@dataclass
class BenchmarkRow:
    dataset: str
    algorithm: str
    k: int
    params: Dict = field(default_factory=dict)
    result: Optional[float] = None
    rel_error: Optional[float] = None
    growth: Optional[float] = None
    wall_time: float = 0.0
    round_times: List[float] = field(default_factory=list)
    emitted_pairs: int = 0
    max_group_size: int = 0
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def csv_record(self) -> dict:
        def fmt(x):
            return "" if x is None else x
        p = self.params
        return {
            "dataset": self.dataset, "algorithm": self.algorithm, "k": self.k,
            "workers": fmt(p.get("workers")), "b": fmt(p.get("b")), "p": fmt(p.get("p")),
            "c": fmt(p.get("c")), "seed": fmt(p.get("seed")),
            "result": fmt(self.result),
            "rel_error": "" if self.rel_error is None else f"{self.rel_error:.6g}",
            "growth": "" if self.growth is None else f"{self.growth:.2f}",
            "wall_ms": f"{self.wall_time * 1000:.1f}",
            "round_ms": ";".join(f"{t * 1000:.1f}" for t in self.round_times),
            "emitted_pairs": self.emitted_pairs, "max_group_size": self.max_group_size,
            "error": fmt(self.error),
        }


@dataclass
class BenchmarkSpec:
    """What to run.  ``datasets`` maps names to paths or loaded graphs."""

    datasets: Dict[str, Union[str, os.PathLike, Graph]] = field(default_factory=dict)
    algorithms: Sequence[str] = ("fff",)
    ks: Sequence[int] = (3,)
    workers: int = 1
    deterministic: bool = True
    b: int = 2
    p: float = 0.1
    c: int = 10
    seeds: Sequence[int] = (0,)
    references: Dict[str, Dict[int, int]] = field(default_factory=dict)


def load_manifest(path) -> Dict[str, str]:
    """Read a JSON ``{name: path}`` manifest; relative paths resolve next to it."""
    with open(path) as f:
        raw = json.load(f)
    if not isinstance(raw, dict) or not all(isinstance(v, str) for v in raw.values()):
        raise ValueError("manifest must be a JSON object mapping names to paths")
    base = os.path.dirname(os.path.abspath(path))
    return {name: p if os.path.isabs(p) else os.path.join(base, p) for name, p in raw.items()}


def format_mmss(seconds: float) -> str:
    whole = int(round(seconds))
    return f"{whole // 60:02d}:{whole % 60:02d}"


def _run_one(g: Graph, algorithm: str, k: int, spec: BenchmarkSpec, seed: int):
    if algorithm == "fff":
        r = fff_count(g, k, workers=spec.workers, deterministic=spec.deterministic)
        return r.q_k, r.run_report
    if algorithm in ("sv", "sv-delayed"):
        if k != 3:
            raise ValueError("sv counts triangles only (k=3)")
        r = sv_count(g, spec.workers, delayed_paths=algorithm == "sv-delayed",
                     deterministic=spec.deterministic)
        return r.q_k, r.run_report
    if algorithm == "afu":
        r = afu_count(g, k, spec.b, spec.workers, seed, spec.deterministic)
        return r.q_k, r.run_report
    if algorithm == "kernel":
        return count_graph_cliques(g, k), None
    if algorithm in SAMPLING_ALGORITHMS:
        config = (SamplingConfig.plain(spec.p, seed) if algorithm == "plain"
                  else SamplingConfig.color(spec.c, seed))
        e = estimate(g, k, config, spec.workers, spec.deterministic)
        return e.value, e.run_report
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _params(algorithm: str, spec: BenchmarkSpec, seed: int) -> dict:
    params = {"workers": spec.workers}
    if algorithm == "afu":
        params.update(b=spec.b, seed=seed)
    elif algorithm == "plain":
        params.update(p=spec.p, seed=seed)
    elif algorithm == "color":
        params.update(c=spec.c, seed=seed)
    return params


def run_benchmark(spec: BenchmarkSpec) -> List[BenchmarkRow]:
    """Run every (dataset, algorithm, k[, seed]) in order.

    Failures are recorded on their row and the run continues.  Each exact
    row carries the growth ratio ``q_k / q_(k-1)`` when the previous k ran
    for the same dataset and algorithm.  Sampling rows get a relative error
    when a reference is known, either from ``spec.references`` or from an
    exact row for the same dataset and k.
    """
    for a in spec.algorithms:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")
    rows: List[BenchmarkRow] = []
    for name, source in spec.datasets.items():
        exact: Dict[int, int] = dict(spec.references.get(name, {}))
        try:
            g = source if isinstance(source, Graph) else load_graph(source)
            load_error = None
        except (OSError, ValueError) as exc:
            g, load_error = None, f"{type(exc).__name__}: {exc}"
        for algorithm in spec.algorithms:
            seeds = spec.seeds if algorithm in SAMPLING_ALGORITHMS or algorithm == "afu" else spec.seeds[:1]
            previous: Dict[int, float] = {}
            for k in spec.ks:
                for seed in seeds:
                    row = BenchmarkRow(name, algorithm, k, _params(algorithm, spec, seed))
                    rows.append(row)
                    if load_error:
                        row.error = load_error
                        continue
                    t0 = time.perf_counter()
                    try:
                        value, report = _run_one(g, algorithm, k, spec, seed)
                    except Exception as exc:  # recorded, run continues
                        row.error = f"{type(exc).__name__}: {exc}"
                        row.wall_time = time.perf_counter() - t0
                        continue
                    row.wall_time = time.perf_counter() - t0
                    row.result = value
                    if report is not None:
                        row.round_times = [r.wall_time for r in report.rounds]
                        row.emitted_pairs = report.emitted_pairs
                        row.max_group_size = max((r.max_group_size for r in report.rounds), default=0)
                    if algorithm in EXACT_ALGORITHMS:
                        exact.setdefault(k, value)
                        if previous.get(k - 1):
                            row.growth = value / previous[k - 1]
                        previous[k] = value
                    elif exact.get(k):
                        row.rel_error = abs(value - exact[k]) / exact[k]
    return rows


def growth_ratios(rows: Iterable[BenchmarkRow], dataset: str, algorithm: str = "fff") -> List[float]:
    return [r.growth for r in rows
            if r.dataset == dataset and r.algorithm == algorithm and r.growth is not None]


def rows_to_csv(rows: Iterable[BenchmarkRow], out=None) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r.csv_record())
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


def rows_to_table(rows: Iterable[BenchmarkRow], out=None) -> str:
    header = ("dataset", "algo", "k", "params", "result", "rel.err", "growth", "time")
    lines = []
    for r in rows:
        params = " ".join(f"{k}={v}" for k, v in r.params.items() if k != "workers")
        if r.error:
            result = f"error: {r.error}"
        elif isinstance(r.result, float):
            result = f"{r.result:,.0f}"
        else:
            result = f"{r.result:,}"
        lines.append((r.dataset, r.algorithm, str(r.k), params, result,
                      "" if r.rel_error is None else f"{100 * r.rel_error:.2f}%",
                      "" if r.growth is None else f"({r.growth:.2f}x)",
                      format_mmss(r.wall_time)))
    widths = [max(len(h), *(len(l[i]) for l in lines)) if lines else len(h)
              for i, h in enumerate(header)]
    text = "\n".join("  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip()
                     for line in [header] + lines) + "\n"
    if out is not None:
        out.write(text)
    return text
