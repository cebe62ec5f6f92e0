"""Baselines: the two-round Node Iterator++ triangle counter and one-round
bucket-replication clique counting.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from . import _hashing as H
from . import _kernels
from .engine import KVBlock, Round, RunReport, run_pipeline
from .exact import (MAX_K, MIN_K, _checked_total, block_map1, check_k, edge_block,
                    make_block_map2, make_block_reduce1, marker_block, wedge_block)
from .graph import Graph

DEFAULT_MAX_PAIRS = 50_000_000


class SizingError(ValueError):
    """The predicted shuffle volume exceeds the configured cap."""


@dataclass
class BaselineReport:
    algorithm: str
    k: int
    q_k: int
    run_report: RunReport = field(default_factory=RunReport)
    details: Dict = field(default_factory=dict)


# ================================================================ node iterator

def _sv_reduce2(groups: KVBlock):
    tags = groups.values[:, 0]
    starts = groups.offsets[:-1]
    has_marker = np.maximum.reduceat(tags, starts) > 0
    wedges = np.add.reduceat((tags == 0).astype(np.int64), starts)
    keep = has_marker & (wedges > 0)
    return KVBlock(groups.keys[keep], wedges[keep], tag="t")


def _sv_map2_original(chunk: KVBlock):
    if chunk.tag == "edge":
        return marker_block(chunk)
    return chunk


def sv_rounds(g: Graph, delayed_paths: bool = False):
    edges = edge_block(g)
    if delayed_paths:
        reduce1 = make_block_reduce1(2)
        map2 = make_block_map2()
    else:
        gather = make_block_reduce1(2)

        def reduce1(groups):
            return wedge_block(gather(groups))
        map2 = _sv_map2_original
    rounds = [
        Round(block_map1, reduce1, name="round1", columnar=True),
        Round(map2, _sv_reduce2, name="round2", columnar=True, side_input=edges),
    ]
    return rounds, edges


def sv_count(g: Graph, workers: int = 1, delayed_paths: bool = False,
             deterministic: bool = True) -> BaselineReport:
    """Triangles via two rounds of Node Iterator++.

    Originally the round-1 reducers emit the length-2 paths; with
    ``delayed_paths`` round 1 only emits high-neighborhoods and the paths
    are generated by the round-2 mappers.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    name = "sv_delayed" if delayed_paths else "sv"
    if g.m == 0:
        return BaselineReport(name, 3, 0, RunReport(workers=workers))
    rounds, edges = sv_rounds(g, delayed_paths)
    out, report = run_pipeline(rounds, [edges], workers, deterministic)
    q = _checked_total(int(b.values[:, 0].sum()) for b in out)
    return BaselineReport(name, 3, q, report)


# ================================================================ buckets

def bucket_of(node: int, b: int, seed: int = 0) -> int:
    """Bucket of a node label, in ``[0, b)``."""
    if b < 1:
        raise ValueError("b must be >= 1")
    return H.reduce_range(H.hash_parts(seed, H.DOMAIN_BUCKET, node), b)


def buckets_of(labels: np.ndarray, b: int, seed: int = 0) -> np.ndarray:
    if b < 1:
        raise ValueError("b must be >= 1")
    return H.reduce_range_array(H.hash_parts_array(seed, H.DOMAIN_BUCKET, labels), b)


def replication_factor(b: int, k: int) -> int:
    """Copies of each edge: tuples of ``k`` buckets containing a given pair."""
    return math.comb(b + k - 3, k - 2)


@dataclass(frozen=True)
class BucketTuples:
    """Every non-decreasing ``k``-tuple over ``b`` buckets, indexed."""

    b: int
    k: int
    tuples: Tuple[Tuple[int, ...], ...]
    counts: np.ndarray  # (T, b) multiplicity of each bucket per tuple
    pair_ptr: np.ndarray  # (b*b + 1,) CSR over bucket pairs i <= j
    pair_ids: np.ndarray

    @classmethod
    def build(cls, b: int, k: int) -> "BucketTuples":
        tuples = tuple(itertools.combinations_with_replacement(range(b), k))
        counts = np.zeros((len(tuples), b), dtype=np.int64)
        for t, tup in enumerate(tuples):
            for x in tup:
                counts[t, x] += 1
        lists = []
        for i in range(b):
            for j in range(b):
                if j < i:
                    lists.append(np.zeros(0, dtype=np.int64))
                elif i == j:
                    lists.append(np.flatnonzero(counts[:, i] >= 2))
                else:
                    lists.append(np.flatnonzero((counts[:, i] >= 1) & (counts[:, j] >= 1)))
        ptr = np.zeros(b * b + 1, dtype=np.int64)
        np.cumsum([len(x) for x in lists], out=ptr[1:])
        ids = np.concatenate(lists).astype(np.int64) if lists else np.zeros(0, dtype=np.int64)
        return cls(b, k, tuples, counts, ptr, ids)

    def containing(self, i: int, j: int) -> np.ndarray:
        i, j = min(i, j), max(i, j)
        p = i * self.b + j
        return self.pair_ids[self.pair_ptr[p]:self.pair_ptr[p + 1]]


def _make_afu_map(tuples: BucketTuples, node_bucket: np.ndarray):
    def map1(chunk: KVBlock):
        u, v = chunk.keys[:, 0], chunk.keys[:, 1]
        bu, bv = node_bucket[u], node_bucket[v]
        pid = np.minimum(bu, bv) * tuples.b + np.maximum(bu, bv)
        starts = tuples.pair_ptr[pid]
        reps = tuples.pair_ptr[pid + 1] - starts
        total = int(reps.sum())
        # ragged gather of each edge's tuple ids
        row = np.repeat(np.arange(len(pid)), reps)
        within = np.arange(total) - np.repeat(np.cumsum(reps) - reps, reps)
        keys = tuples.pair_ids[starts[row] + within]
        return KVBlock(keys, chunk.keys[row], tag="afu")
    return map1


def _make_afu_reduce(tuples: BucketTuples, node_bucket: np.ndarray, k: int):
    def reduce1(groups: KVBlock):
        ex = np.ascontiguousarray(groups.values[:, 0])
        ey = np.ascontiguousarray(groups.values[:, 1])
        tid = groups.keys[:, 0]
        targets = np.ascontiguousarray(tuples.counts[tid])
        counts = _kernels.count_bucket_groups(groups.offsets, ex, ey, k, node_bucket, targets)
        return KVBlock(tid, counts, tag="q")
    return reduce1


def afu_count(g: Graph, k: int, b: int, workers: int = 1, seed: int = 0,
              deterministic: bool = True, max_pairs: Optional[int] = DEFAULT_MAX_PAIRS) -> BaselineReport:
    """``k``-cliques in one round by replicating edges to bucket tuples.

    Nodes are hashed into ``b`` buckets; one reducer per non-decreasing
    ``k``-tuple of buckets receives every edge whose endpoint buckets occur
    in the tuple, and counts only the cliques whose bucket multiset equals
    its tuple, so each clique is counted once.
    """
    check_k(k, MIN_K, MAX_K)
    if b < 1:
        raise ValueError("b must be >= 1")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    predicted = g.m * replication_factor(b, k)
    details = {"b": b, "reducers": math.comb(b + k - 1, k), "predicted_pairs": predicted}
    if max_pairs is not None and predicted > max_pairs:
        raise SizingError(f"bucket replication would shuffle {predicted} pairs "
                          f"(cap {max_pairs}); lower b")
    if g.m == 0 or k > g.n:
        return BaselineReport("afu", k, 0, RunReport(workers=workers), details)
    tuples = BucketTuples.build(b, k)
    node_bucket = buckets_of(g.labels, b, seed).astype(np.int64)
    edges = KVBlock(g.edges, np.zeros((g.m, 0), dtype=np.int64), tag="edge")
    rounds = [Round(_make_afu_map(tuples, node_bucket), _make_afu_reduce(tuples, node_bucket, k),
                    name="round1", columnar=True)]
    out, report = run_pipeline(rounds, [edges], workers, deterministic)
    q = _checked_total(int(blk.values[:, 0].sum()) for blk in out)
    details["replication"] = report.emitted_pairs / g.m
    return BaselineReport("afu", k, q, report, details)
