"""FFF_k: exact k-clique counting in three MapReduce rounds.

Round 1 gathers each node's high-neighborhood, keeping nodes with at least
``k - 1`` high neighbors.  Round 2 emits every pair of high neighbors keyed
by the pair, together with a marker for every real edge, and keeps only
the pairs that are edges; each surviving edge carries the list of owners
whose high-neighborhood contains it.  Round 3 routes edges to their owners,
rebuilds each induced high-neighborhood graph and counts its
``(k - 1)``-cliques.  Each clique is counted by its lowest node only.

Two interchangeable backends run the same rounds:

``"records"``
    literal per-pair map/reduce functions over ``OrderKey`` node ids;
``"blocks"``
    columnar numpy rounds over node ranks with compiled reducers.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, NamedTuple, Optional

import numpy as np

from . import _kernels
from .engine import KVBlock, Round, RunReport, run_pipeline, run_round
from .graph import Graph, OrderKey
from .kernel import LocalGraph, count_cliques

MIN_K, MAX_K = 3, 16
UINT64_MAX = (1 << 64) - 1

OWNER_TAG, MARKER_TAG = 0, 1


class Round2Value(NamedTuple):
    """Tagged value of round 2: an owner node or the edge marker."""

    tag: int
    node: Any = None

    @classmethod
    def owner(cls, u):
        return cls(OWNER_TAG, u)

    @property
    def is_marker(self) -> bool:
        return self.tag == MARKER_TAG


EDGE_MARKER = Round2Value(MARKER_TAG, None)


@dataclass
class CliqueCountReport:
    k: int
    q_k: int
    per_node: Optional[Dict[int, int]] = None
    run_report: RunReport = field(default_factory=RunReport)
    algorithm: str = "fff"
    details: Dict[str, Any] = field(default_factory=dict)
    cliques: Optional[List[tuple]] = None


def check_k(k, lo=MIN_K, hi=MAX_K):
    if not isinstance(k, (int, np.integer)) or not lo <= k <= hi:
        raise ValueError(f"k must be an integer in [{lo}, {hi}], got {k!r}")


def _checked_total(parts) -> int:
    total = sum(int(x) for x in parts)
    if total > UINT64_MAX:
        raise OverflowError("clique count exceeds 64-bit range")
    return total


# ================================================================ records

def edge_pairs(g: Graph) -> list:
    """Every edge in both directions as ``((OrderKey u, OrderKey v), None)``."""
    keys = [OrderKey(int(d), int(lab)) for d, lab in zip(g.degree, g.labels)]
    out = []
    for a, b in g.edges:
        ka, kb = keys[a], keys[b]
        out.append(((ka, kb), None))
        out.append(((kb, ka), None))
    return out


def round1_functions(k: int):
    def map1(key, _value):
        u, v = key
        if u < v:
            yield u, v

    def reduce1(u, members):
        if len(members) >= k - 1:
            yield u, sorted(members)

    return map1, reduce1


def round2_functions(pair_filter: Optional[Callable] = None):
    def map2(key, value):
        if value is None:
            u, v = key
            if u < v:
                yield (u, v), EDGE_MARKER
            return
        owner = key
        for x, y in itertools.combinations(value, 2):
            if pair_filter is None or pair_filter(owner, x, y):
                yield (x, y), Round2Value.owner(owner)

    def reduce2(key, values):
        if any(v.is_marker for v in values):
            yield key, [v.node for v in values if not v.is_marker]

    return map2, reduce2


def round3_functions(k: int, per_node: bool = False, collect: bool = False):
    def map3(edge, owners):
        for u in owners:
            yield u, edge

    def reduce3(u, edges):
        local = LocalGraph.from_edges(edges, key=lambda x: x)
        if not per_node and not collect:
            yield u, ("owner", count_cliques(local, k - 1))
            return
        credit: Dict = {}
        found = []

        def visit(clique):
            for x in clique:
                credit[x] = credit.get(x, 0) + 1
            if collect:
                found.append((u, *clique))

        q = count_cliques(local, k - 1, visitor=visit)
        yield u, ("owner", q)
        if per_node:
            for x, c in credit.items():
                yield x, ("member", c)
        for clique in found:
            yield u, ("clique", clique)

    return map3, reduce3


def round1(pairs, k, workers=1, deterministic=True):
    """Map 1 / Reduce 1 over record pairs; returns ``(high_neighborhoods, metrics)``."""
    return run_round(pairs, *round1_functions(k), workers, deterministic, "round1")


def round2(high_neighborhoods, pairs, workers=1, deterministic=True, pair_filter=None):
    """Map 2 / Reduce 2 over the mixed stream of neighborhoods and edges."""
    return run_round(list(high_neighborhoods) + list(pairs), *round2_functions(pair_filter),
                     workers, deterministic, "round2")


def round3(edge_owners, k, per_node=False, workers=1, deterministic=True):
    """Map 3 / Reduce 3; returns ``(q_k, per_node_or_None, metrics)``."""
    out, metrics = run_round(edge_owners, *round3_functions(k, per_node), workers,
                             deterministic, "round3")
    q, credit, _ = _collect_records(out)
    return q, (credit if per_node else None), metrics


def _collect_records(out):
    q_parts, credit, cliques = [], {}, []
    for node, (kind, val) in out:
        if kind == "owner":
            q_parts.append(val)
            credit[node] = credit.get(node, 0) + val
        elif kind == "member":
            credit[node] = credit.get(node, 0) + val
        else:
            cliques.append(val)
    return _checked_total(q_parts), credit, cliques


def records_rounds(g: Graph, k: int, per_node=False, pair_filter=None, collect=False):
    edges = edge_pairs(g)
    rounds = [
        Round(*round1_functions(k), name="round1"),
        Round(*round2_functions(pair_filter), name="round2", side_input=edges),
        Round(*round3_functions(k, per_node, collect), name="round3"),
    ]
    return rounds, edges


def _fff_records(g, k, workers, deterministic, per_node, pair_filter, collect):
    rounds, edges = records_rounds(g, k, per_node, pair_filter, collect)
    out, report = run_pipeline(rounds, edges, workers, deterministic)
    q, credit, cliques = _collect_records(out)
    per = None
    if per_node:
        per = {key.label: c for key, c in credit.items() if c}
    found = None
    if collect:
        found = [tuple(x.label for x in c) for c in cliques]
    return q, per, report, found


# ================================================================ blocks

def edge_block(g: Graph) -> KVBlock:
    """Every edge in both directions as rank pairs with an empty value."""
    e = g.edges
    keys = np.concatenate([e, e[:, ::-1]]) if len(e) else np.empty((0, 2), dtype=np.int64)
    return KVBlock(keys, np.empty((len(keys), 0), dtype=np.int64), tag="edge")


def _sort_within_segments(offsets, values):
    seg = np.repeat(np.arange(len(offsets) - 1), np.diff(offsets))
    return values[np.lexsort((values[:, 0], seg))]


def block_map1(chunk: KVBlock):
    keep = chunk.keys[:, 0] < chunk.keys[:, 1]
    return KVBlock(chunk.keys[keep, :1], chunk.keys[keep, 1:], tag="r1")


def make_block_reduce1(min_members: int, tag: str = "hn"):
    def reduce1(groups: KVBlock):
        sizes = groups.group_sizes()
        keep = sizes >= min_members
        row_keep = np.repeat(keep, sizes)
        offsets = np.zeros(int(keep.sum()) + 1, dtype=np.int64)
        np.cumsum(sizes[keep], out=offsets[1:])
        values = _sort_within_segments(offsets, groups.values[row_keep])
        return KVBlock(groups.keys[keep], values, offsets, tag=tag)
    return reduce1


def wedge_block(chunk: KVBlock, block_filter=None) -> KVBlock:
    """All ordered pairs of high neighbors per owner, keyed by the pair.

    Values are ``(OWNER_TAG, owner)`` rows.  ``block_filter(owner, x, y)``
    returns a keep-mask over candidate pairs (rank arrays).
    """
    members = np.ascontiguousarray(chunk.values[:, 0])
    xs, ys, seg = _kernels.segment_pairs(chunk.offsets, members)
    owners = chunk.keys[seg, 0]
    if block_filter is not None and len(xs):
        keep = block_filter(owners, xs, ys)
        xs, ys, owners = xs[keep], ys[keep], owners[keep]
    vals = np.stack([np.full(len(owners), OWNER_TAG, dtype=np.int64), owners], axis=1)
    return KVBlock(np.stack([xs, ys], axis=1), vals, tag="r2")


def marker_block(chunk: KVBlock) -> KVBlock:
    keep = chunk.keys[:, 0] < chunk.keys[:, 1]
    keys = chunk.keys[keep]
    vals = np.zeros((len(keys), 2), dtype=np.int64)
    vals[:, 0] = MARKER_TAG
    return KVBlock(keys, vals, tag="r2")


def make_block_map2(block_filter=None):
    def map2(chunk: KVBlock):
        if chunk.tag == "edge":
            return marker_block(chunk)
        return wedge_block(chunk, block_filter)
    return map2


def block_reduce2(groups: KVBlock):
    sizes = groups.group_sizes()
    tags = groups.values[:, 0]
    has_marker = np.maximum.reduceat(tags, groups.offsets[:-1]) == MARKER_TAG
    row_group = np.repeat(np.arange(groups.n_pairs), sizes)
    row_keep = has_marker[row_group] & (tags == OWNER_TAG)
    counts = np.bincount(row_group[row_keep], minlength=groups.n_pairs)[has_marker]
    offsets = np.zeros(len(counts) + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return KVBlock(groups.keys[has_marker], groups.values[row_keep, 1:], offsets, tag="edge_owners")


def block_map3(chunk: KVBlock):
    sizes = chunk.group_sizes()
    edges = np.repeat(chunk.keys, sizes, axis=0)
    return KVBlock(chunk.values[:, :1], edges, tag="r3")


def make_block_reduce3(k: int, per_node: bool):
    def reduce3(groups: KVBlock):
        ex = np.ascontiguousarray(groups.values[:, 0])
        ey = np.ascontiguousarray(groups.values[:, 1])
        counts, inc_nodes, inc_vals, _ = _kernels.count_groups(groups.offsets, ex, ey, k - 1, per_node)
        owners = groups.keys[:, 0]
        out = [KVBlock(owners, np.stack([np.zeros_like(counts), counts], axis=1), tag="q")]
        if per_node and len(inc_nodes):
            out.append(KVBlock(inc_nodes, np.stack([np.ones_like(inc_vals), inc_vals], axis=1), tag="q"))
        return out
    return reduce3


def block_rounds(g: Graph, k: int, per_node=False, block_filter=None):
    edges = edge_block(g)
    rounds = [
        Round(block_map1, make_block_reduce1(k - 1), name="round1", columnar=True),
        Round(make_block_map2(block_filter), block_reduce2, name="round2", columnar=True,
              side_input=edges),
        Round(block_map3, make_block_reduce3(k, per_node), name="round3", columnar=True),
    ]
    return rounds, edges


def _fff_blocks(g, k, workers, deterministic, per_node, block_filter):
    rounds, edges = block_rounds(g, k, per_node, block_filter)
    out, report = run_pipeline(rounds, [edges], workers, deterministic)
    q_parts = [b.values[b.values[:, 0] == 0, 1] for b in out]
    q = _checked_total(int(p.sum()) for p in q_parts)
    per = None
    if per_node:
        credit = np.zeros(g.n, dtype=np.int64)
        for b in out:
            np.add.at(credit, b.keys[:, 0], b.values[:, 1])
        nz = np.flatnonzero(credit)
        per = {int(g.labels[r]): int(credit[r]) for r in nz}
    return q, per, report


# ================================================================ driver

def fff_count(g: Graph, k: int, workers: int = 1, per_node: bool = False,
              deterministic: bool = True, backend: str = "blocks",
              collect_cliques: bool = False) -> CliqueCountReport:
    """Exact number of ``k``-cliques of ``g`` via the three-round pipeline.

    ``collect_cliques`` (records backend only) also returns every clique as
    a tuple of labels, owner first.
    """
    check_k(k)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if backend not in ("blocks", "records"):
        raise ValueError(f"unknown backend {backend!r}")
    if g.m == 0 or k > g.n:
        return CliqueCountReport(k, 0, {} if per_node else None, RunReport(workers=workers),
                                 cliques=[] if collect_cliques else None)
    if collect_cliques or backend == "records":
        q, per, report, found = _fff_records(g, k, workers, deterministic, per_node,
                                             None, collect_cliques)
        return CliqueCountReport(k, q, per, report, cliques=found)
    q, per, report = _fff_blocks(g, k, workers, deterministic, per_node, None)
    return CliqueCountReport(k, q, per, report)


def per_node_csv(per_node: Dict[int, int], out) -> None:
    out.write("node,count\n")
    for node in sorted(per_node):
        out.write(f"{node},{per_node[node]}\n")


def round2_pair_bound(g: Graph, k: int) -> int:
    """Round-2 map emissions predicted from the graph alone."""
    hd = g.high_degree
    keep = hd[hd >= k - 1]
    return int((keep * (keep - 1) // 2).sum()) + g.m
