"""A small in-process MapReduce runtime with per-round cost accounting.

Two data planes share the same round structure (map, shuffle, reduce) and
the same metrics:

* record rounds (:func:`run_round`) move Python ``(key, value)`` tuples
  through user functions called once per pair / per key group;
* block rounds (:func:`run_block_round`) move columnar :class:`KVBlock`
  arrays; the map function sees a chunk of input pairs and the reduce
  function sees a contiguous range of key groups, both as blocks.

Reduce work is split into tasks that idle workers pull from a shared queue,
so one oversized key group shows up as ``max_reduce_time``.
"""
from __future__ import annotations

import csv
import io
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Callable, Iterable, List, Optional, Sequence

import numpy as np


class RoundError(RuntimeError):
    """A map or reduce function raised; ``key`` identifies the failing input."""

    def __init__(self, round_name, phase, key, cause):
        super().__init__(f"round {round_name!r} {phase} failed at key {key!r}: {cause!r}")
        self.round_name = round_name
        self.phase = phase
        self.key = key


@dataclass
class RoundMetrics:
    name: str = ""
    map_input_pairs: int = 0
    emitted_pairs: int = 0
    distinct_keys: int = 0
    max_group_size: int = 0
    total_values: int = 0
    output_pairs: int = 0
    reduce_tasks: int = 0
    map_time: float = 0.0
    shuffle_time: float = 0.0
    reduce_time: float = 0.0
    wall_time: float = 0.0
    max_reduce_time: float = 0.0


METRIC_COLUMNS = [f.name for f in fields(RoundMetrics)]


@dataclass
class RunReport:
    rounds: List[RoundMetrics] = field(default_factory=list)
    wall_time: float = 0.0
    workers: int = 1

    def round(self, name: str) -> RoundMetrics:
        for r in self.rounds:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def emitted_pairs(self) -> int:
        return sum(r.emitted_pairs for r in self.rounds)

    def to_csv(self, out=None) -> str:
        """One row per round, columns ``round_index, workers`` + every metric."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["round_index", "workers"] + METRIC_COLUMNS)
        for i, r in enumerate(self.rounds):
            row = asdict(r)
            w.writerow([i, self.workers] + [row[c] for c in METRIC_COLUMNS])
        text = buf.getvalue()
        if out is not None:
            if hasattr(out, "write"):
                out.write(text)
            else:
                with open(out, "w", newline="") as fh:
                    fh.write(text)
        return text


@dataclass(frozen=True)
class Round:
    """One pipeline stage.  ``side_input`` is appended to the previous output."""

    map_fn: Callable
    reduce_fn: Callable
    name: str = ""
    columnar: bool = False
    side_input: Any = None


# ---------------------------------------------------------------- scheduling

def _run_tasks(tasks: Sequence, fn: Callable, workers: int):
    """Run ``fn`` on every task; workers pull the next task when idle.

    Returns results in task order and the per-task durations.
    """
    results: list = [None] * len(tasks)
    durations = [0.0] * len(tasks)
    if workers <= 1 or len(tasks) <= 1:
        for i, t in enumerate(tasks):
            t0 = time.perf_counter()
            results[i] = fn(t)
            durations[i] = time.perf_counter() - t0
        return results, durations

    lock = threading.Lock()
    cursor = [0]
    failure: list = []

    def worker():
        while True:
            with lock:
                if failure or cursor[0] >= len(tasks):
                    return
                i = cursor[0]
                cursor[0] += 1
            t0 = time.perf_counter()
            try:
                results[i] = fn(tasks[i])
            except BaseException as exc:  # propagated after the barrier
                with lock:
                    failure.append(exc)
                return
            durations[i] = time.perf_counter() - t0

    with ThreadPoolExecutor(max_workers=workers) as pool:
        for f in [pool.submit(worker) for _ in range(min(workers, len(tasks)))]:
            f.result()
    if failure:
        raise failure[0]
    return results, durations


def _chunks(n: int, parts: int):
    parts = max(1, min(parts, n))
    bounds = np.linspace(0, n, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


# ---------------------------------------------------------------- record plane

def _sorted_values(values):
    try:
        return sorted(values)
    except TypeError:
        return sorted(values, key=repr)


def run_round(pairs, map_fn, reduce_fn, workers: int = 1, deterministic: bool = True,
              name: str = ""):
    """Execute one record round.

    ``map_fn(key, value)`` and ``reduce_fn(key, values)`` return iterables of
    ``(key, value)`` pairs.  With ``deterministic`` the groups are reduced in
    ascending key order with sorted value lists.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    pairs = list(pairs)
    metrics = RoundMetrics(name=name, map_input_pairs=len(pairs))
    t_start = time.perf_counter()

    def map_chunk(bounds):
        out = []
        for key, value in pairs[bounds[0]:bounds[1]]:
            try:
                emitted = map_fn(key, value)
                if emitted:
                    out.extend(emitted)
            except Exception as exc:
                raise RoundError(name, "map", key, exc) from exc
        return out

    mapped, _ = _run_tasks(_chunks(len(pairs), workers * 4), map_chunk, workers)
    t_map = time.perf_counter()

    groups: dict = {}
    emitted = 0
    for chunk in mapped:
        emitted += len(chunk)
        for key, value in chunk:
            bucket = groups.get(key)
            if bucket is None:
                groups[key] = [value]
            else:
                bucket.append(value)
    items = list(groups.items())
    if deterministic:
        items.sort(key=lambda kv: kv[0])
        items = [(k, _sorted_values(v)) for k, v in items]
    t_shuffle = time.perf_counter()

    def reduce_group(item):
        key, values = item
        try:
            return list(reduce_fn(key, values) or ())
        except Exception as exc:
            raise RoundError(name, "reduce", key, exc) from exc

    reduced, durations = _run_tasks(items, reduce_group, workers)
    out = [kv for chunk in reduced for kv in chunk]
    t_end = time.perf_counter()

    metrics.emitted_pairs = emitted
    metrics.distinct_keys = len(items)
    metrics.max_group_size = max((len(v) for _, v in items), default=0)
    metrics.total_values = sum(len(v) for _, v in items)
    metrics.output_pairs = len(out)
    metrics.reduce_tasks = len(items)
    metrics.map_time = t_map - t_start
    metrics.shuffle_time = t_shuffle - t_map
    metrics.reduce_time = t_end - t_shuffle
    metrics.wall_time = t_end - t_start
    metrics.max_reduce_time = max(durations, default=0.0)
    return out, metrics


# ---------------------------------------------------------------- block plane

@dataclass
class KVBlock:
    """Columnar batch of pairs.

    ``keys`` has one row per pair.  Without ``offsets`` each pair has exactly
    one value row; with ``offsets`` pair ``i`` owns the value list
    ``values[offsets[i]:offsets[i + 1]]``.
    """

    keys: np.ndarray
    values: np.ndarray
    offsets: Optional[np.ndarray] = None
    tag: str = ""

    def __post_init__(self):
        self.keys = np.asarray(self.keys)
        if self.keys.ndim == 1:
            self.keys = self.keys.reshape(-1, 1)
        self.values = np.asarray(self.values)
        if self.values.ndim == 1:
            self.values = self.values.reshape(-1, 1)
        if self.offsets is None:
            if len(self.values) != len(self.keys):
                raise ValueError("flat block needs one value row per key row")
        elif len(self.offsets) != len(self.keys) + 1:
            raise ValueError("offsets must have n_pairs + 1 entries")

    @property
    def n_pairs(self) -> int:
        return len(self.keys)

    @property
    def n_rows(self) -> int:
        return len(self.values)

    @property
    def ragged(self) -> bool:
        return self.offsets is not None

    def slice_pairs(self, a: int, b: int) -> "KVBlock":
        if self.offsets is None:
            return KVBlock(self.keys[a:b], self.values[a:b], None, self.tag)
        lo, hi = int(self.offsets[a]), int(self.offsets[b])
        return KVBlock(self.keys[a:b], self.values[lo:hi], self.offsets[a:b + 1] - lo, self.tag)

    def group_sizes(self) -> np.ndarray:
        if self.offsets is None:
            return np.ones(self.n_pairs, dtype=np.int64)
        return np.diff(self.offsets)

    def to_pairs(self) -> list:
        """Materialize as record pairs (list values for ragged blocks)."""
        def key_of(row):
            return int(row[0]) if len(row) == 1 else tuple(int(x) for x in row)

        def val_of(row):
            if len(row) == 0:
                return None
            return row[0].item() if len(row) == 1 else tuple(x.item() for x in row)

        if self.offsets is None:
            return [(key_of(k), val_of(v)) for k, v in zip(self.keys, self.values)]
        return [(key_of(self.keys[i]),
                 [val_of(v) for v in self.values[self.offsets[i]:self.offsets[i + 1]]])
                for i in range(self.n_pairs)]

    @classmethod
    def empty(cls, key_width=1, value_width=1, dtype=np.int64, tag=""):
        return cls(np.empty((0, key_width), dtype=np.int64),
                   np.empty((0, value_width), dtype=dtype), None, tag)


def concat_blocks(blocks: Iterable[KVBlock], tag: str = "") -> Optional[KVBlock]:
    blocks = [b for b in blocks if b is not None]
    if not blocks:
        return None
    nonempty = [b for b in blocks if b.n_pairs] or blocks[:1]
    ragged = any(b.ragged for b in nonempty)
    keys = np.concatenate([b.keys for b in nonempty])
    values = np.concatenate([b.values for b in nonempty])
    offsets = None
    if ragged:
        parts, base = [np.zeros(1, dtype=np.int64)], 0
        for b in nonempty:
            off = b.offsets if b.ragged else np.arange(b.n_pairs + 1, dtype=np.int64)
            parts.append(off[1:] + base)
            base += int(off[-1])
        offsets = np.concatenate(parts)
    return KVBlock(keys, values, offsets, tag or nonempty[0].tag)


def _as_block_list(out) -> list:
    if out is None:
        return []
    if isinstance(out, KVBlock):
        return [out]
    return [b for b in out if b is not None]


def _sort_order(keys: np.ndarray, values: np.ndarray, deterministic: bool) -> np.ndarray:
    kw = keys.shape[1]
    if kw == 1:
        primary = keys[:, 0]
    elif kw == 2 and len(keys) and keys.min() >= 0 and keys.max() < (1 << 31):
        primary = (keys[:, 0] << 32) | keys[:, 1]
    else:
        primary = None
    if not deterministic and primary is not None:
        return np.argsort(primary, kind="quicksort")
    cols = []
    if deterministic:
        cols.extend(values[:, j] for j in range(values.shape[1] - 1, -1, -1))
    if primary is not None:
        cols.append(primary)
    else:
        cols.extend(keys[:, j] for j in range(kw - 1, -1, -1))
    return np.lexsort(cols)


def shuffle_blocks(blocks: List[KVBlock], deterministic: bool = True) -> Optional[KVBlock]:
    """Group flat blocks by key into one ragged block sorted by key."""
    merged = concat_blocks(blocks)
    if merged is None:
        return None
    if merged.n_pairs == 0:
        return KVBlock(merged.keys[:0], merged.values[:0], np.zeros(1, dtype=np.int64), merged.tag)
    if merged.ragged:
        raise ValueError("map output must be flat (one value per pair)")
    order = _sort_order(merged.keys, merged.values, deterministic)
    keys = merged.keys[order]
    values = merged.values[order]
    change = np.any(keys[1:] != keys[:-1], axis=1)
    starts = np.concatenate([[0], np.flatnonzero(change) + 1]).astype(np.int64)
    offsets = np.append(starts, len(keys)).astype(np.int64)
    return KVBlock(keys[starts], values, offsets, merged.tag)


def _reduce_tasks(grouped: KVBlock, workers: int) -> list:
    if workers <= 1:
        return [(0, grouped.n_pairs)]
    target = max(1, grouped.n_rows // (workers * 8))
    cuts = np.searchsorted(grouped.offsets, np.arange(0, grouped.n_rows, target), side="right") - 1
    cuts = np.unique(np.concatenate([[0], cuts, [grouped.n_pairs]]))
    return [(int(a), int(b)) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]


def run_block_round(blocks, map_fn, reduce_fn, workers: int = 1, deterministic: bool = True,
                    name: str = ""):
    """Execute one columnar round.

    ``map_fn(block)`` receives a slice of an input block (whole pairs) and
    returns flat blocks; ``reduce_fn(groups)`` receives a ragged block whose
    pairs are consecutive key groups and returns blocks.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    blocks = _as_block_list(blocks)
    metrics = RoundMetrics(name=name, map_input_pairs=sum(b.n_pairs for b in blocks))
    t_start = time.perf_counter()

    tasks = []
    for b in blocks:
        for lo, hi in _chunks(b.n_pairs, workers * 4):
            tasks.append(b.slice_pairs(lo, hi))

    def map_chunk(chunk):
        try:
            return _as_block_list(map_fn(chunk))
        except RoundError:
            raise
        except Exception as exc:
            first = chunk.keys[0].tolist() if chunk.n_pairs else None
            raise RoundError(name, "map", first, exc) from exc

    mapped, _ = _run_tasks(tasks, map_chunk, workers)
    t_map = time.perf_counter()
    grouped = shuffle_blocks([b for chunk in mapped for b in chunk], deterministic)
    t_shuffle = time.perf_counter()

    if grouped is None or grouped.n_pairs == 0:
        out, durations, sizes = [], [], np.zeros(0, dtype=np.int64)
    else:
        sizes = grouped.group_sizes()

        def reduce_range(bounds):
            part = grouped.slice_pairs(*bounds)
            try:
                return _as_block_list(reduce_fn(part))
            except RoundError:
                raise
            except Exception as exc:
                raise RoundError(name, "reduce", part.keys[0].tolist(), exc) from exc

        ranges = _reduce_tasks(grouped, workers)
        reduced, durations = _run_tasks(ranges, reduce_range, workers)
        out = [b for chunk in reduced for b in chunk]
        metrics.reduce_tasks = len(ranges)
    t_end = time.perf_counter()

    metrics.emitted_pairs = int(sizes.sum())
    metrics.distinct_keys = int(len(sizes))
    metrics.max_group_size = int(sizes.max()) if len(sizes) else 0
    metrics.total_values = int(sizes.sum())
    metrics.output_pairs = sum(b.n_pairs for b in out)
    metrics.map_time = t_map - t_start
    metrics.shuffle_time = t_shuffle - t_map
    metrics.reduce_time = t_end - t_shuffle
    metrics.wall_time = t_end - t_start
    metrics.max_reduce_time = max(durations, default=0.0)
    return out, metrics


# ---------------------------------------------------------------- pipelines

def run_pipeline(rounds: Sequence[Round], data, workers: int = 1, deterministic: bool = True):
    """Fold rounds over ``data``; returns the final output and a :class:`RunReport`."""
    report = RunReport(workers=workers)
    t0 = time.perf_counter()
    current = data
    for i, rnd in enumerate(rounds):
        name = rnd.name or f"round{i + 1}"
        if rnd.columnar:
            inputs = _as_block_list(current) + _as_block_list(rnd.side_input)
            current, metrics = run_block_round(inputs, rnd.map_fn, rnd.reduce_fn,
                                               workers, deterministic, name)
        else:
            inputs = list(current) + list(rnd.side_input or ())
            current, metrics = run_round(inputs, rnd.map_fn, rnd.reduce_fn,
                                         workers, deterministic, name)
        report.rounds.append(metrics)
    report.wall_time = time.perf_counter() - t0
    return current, report
