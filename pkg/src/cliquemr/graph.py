"""Edge-list ingestion, normalization and the degree order on nodes.

Nodes keep their external (SNAP) labels.  Internally every node is also
identified by its *rank*: its position in the total order ``x < y iff
(d(x), x) < (d(y), y)``.  Comparing ranks is therefore the same as comparing
order keys, which is what the MapReduce rounds and kernels rely on.
"""
from __future__ import annotations

import gzip
import io
import math
import os
from dataclasses import dataclass, field
from typing import IO, NamedTuple, Union

import numpy as np

LABEL_DTYPE = np.uint64


class EdgeListParseError(ValueError):
    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {line!r}")
        self.lineno = lineno
        self.line = line


class OrderKey(NamedTuple):
    degree: int
    label: int


def precedes(a: OrderKey, b: OrderKey) -> bool:
    """Strict total order on nodes: lower degree first, ties broken by label."""
    return (a[0], a[1]) < (b[0], b[1])


class Edge(NamedTuple):
    u: int
    v: int


@dataclass(frozen=True)
class HighNeighborhood:
    owner: int
    members: tuple


@dataclass(frozen=True)
class InducedSubgraph:
    owner: int
    edges: tuple


@dataclass(frozen=True)
class IngestionReport:
    input_edges: int = 0
    self_loops: int = 0
    duplicates: int = 0


def _locate_bad_line(lines, data_idx):
    for i in data_idx:
        line = lines[i]
        tokens = line.split()
        if len(tokens) != 2:
            raise EdgeListParseError(i + 1, line, f"expected 2 tokens, got {len(tokens)}")
        for t in tokens:
            try:
                v = int(t)
            except ValueError:
                raise EdgeListParseError(i + 1, line, f"non-integer token {t!r}") from None
            if v < 0 or v > np.iinfo(LABEL_DTYPE).max:
                raise EdgeListParseError(i + 1, line, f"label out of range {t!r}")
    raise AssertionError("no malformed line found")  # pragma: no cover


def parse_edge_list(text: Union[str, bytes, IO]) -> np.ndarray:
    """Parse SNAP edge-list text into an ``(E, 2)`` uint64 array.

    Comment lines start with ``#``; blank lines are skipped.  Order,
    direction, duplicates and self-loops are preserved.
    """
    if hasattr(text, "read"):
        text = text.read()
    if isinstance(text, bytes):
        text = text.decode()
    lines = text.splitlines()
    data_idx = [i for i, line in enumerate(lines)
                if line.strip() and not line.lstrip().startswith("#")]
    if not data_idx:
        return np.empty((0, 2), dtype=LABEL_DTYPE)
    tokens = " ".join([lines[i] for i in data_idx]).split()
    if len(tokens) != 2 * len(data_idx):
        _locate_bad_line(lines, data_idx)
    try:
        flat = np.array(list(map(int, tokens)), dtype=LABEL_DTYPE)
    except (ValueError, OverflowError):
        _locate_bad_line(lines, data_idx)
    return flat.reshape(-1, 2)


def read_edge_list(path: Union[str, os.PathLike]) -> np.ndarray:
    """Read a plain or gzip-compressed edge-list file (detected by magic bytes)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.GzipFile(fileobj=io.BytesIO(raw)).read()
    return parse_edge_list(raw)


@dataclass(frozen=True, eq=False)
class Graph:
    """Normalized undirected graph indexed by order rank.

    ``labels[r]`` and ``degree[r]`` describe the node of rank ``r``.
    ``edges`` holds each edge once as ``(lo, hi)`` ranks, sorted.
    ``indptr``/``indices`` is the symmetric adjacency, each row sorted by
    rank (hence by order key); the high-neighborhood of ``r`` is the last
    ``high_degree[r]`` entries of its row.
    """

    labels: np.ndarray
    degree: np.ndarray
    edges: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    high_degree: np.ndarray
    report: IngestionReport = field(default_factory=IngestionReport)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def out_indptr(self) -> np.ndarray:
        """CSR offsets of the oriented adjacency (``edges[:, 1]`` is its index array)."""
        out = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(self.high_degree, out=out[1:])
        return out

    @property
    def max_high_degree(self) -> int:
        return int(self.high_degree.max()) if self.n else 0

    def _label_index(self):
        idx = self.__dict__.get("_label_sorter")
        if idx is None:
            idx = np.argsort(self.labels, kind="stable")
            object.__setattr__(self, "_label_sorter", idx)
        return idx

    def rank_of(self, label: int) -> int:
        sorter = self._label_index()
        key = np.asarray(label, dtype=LABEL_DTYPE)
        pos = int(np.searchsorted(self.labels, key, sorter=sorter))
        if pos >= self.n or int(self.labels[sorter[pos]]) != int(label):
            raise KeyError(f"unknown node {label}")
        return int(sorter[pos])

    def ranks_of(self, labels) -> np.ndarray:
        sorter = self._label_index()
        keys = np.asarray(labels, dtype=LABEL_DTYPE)
        pos = np.searchsorted(self.labels, keys, sorter=sorter)
        pos = np.minimum(pos, max(self.n - 1, 0))
        ranks = sorter[pos] if self.n else pos
        if self.n == 0 or np.any(self.labels[ranks] != keys):
            raise KeyError("unknown node label(s)")
        return ranks.astype(np.int64)

    def __contains__(self, label) -> bool:
        try:
            self.rank_of(label)
        except (KeyError, OverflowError):
            return False
        return True

    def order_key(self, label: int) -> OrderKey:
        r = self.rank_of(label)
        return OrderKey(int(self.degree[r]), int(self.labels[r]))

    def neighbors(self, label: int) -> list:
        """Neighbors of ``label`` as ``(label, degree)`` pairs, ascending by order key."""
        r = self.rank_of(label)
        row = self.indices[self.indptr[r]:self.indptr[r + 1]]
        return [(int(self.labels[x]), int(self.degree[x])) for x in row]

    def high_ranks(self, r: int) -> np.ndarray:
        end = self.indptr[r + 1]
        return self.indices[end - self.high_degree[r]:end]

    def high_neighborhood(self, label: int) -> HighNeighborhood:
        r = self.rank_of(label)
        return HighNeighborhood(int(label), tuple(int(x) for x in self.labels[self.high_ranks(r)]))

    def induced_high_subgraph(self, label: int) -> InducedSubgraph:
        r = self.rank_of(label)
        members = self.high_ranks(r)
        member_set = set(members.tolist())
        out = []
        for x in members:
            for y in self.high_ranks(int(x)):
                if int(y) in member_set:
                    out.append(Edge(int(self.labels[x]), int(self.labels[y])))
        return InducedSubgraph(int(label), tuple(out))

    def edge_labels(self) -> np.ndarray:
        """Edges as ``(E, 2)`` external labels, lower-ranked endpoint first."""
        return self.labels[self.edges] if self.m else np.empty((0, 2), dtype=LABEL_DTYPE)

    def degree_sum_ok(self) -> bool:
        return int(self.degree.sum()) == 2 * self.m


def normalize(edges) -> Graph:
    """Drop self-loops and duplicate/reversed edges, compute degrees, rank nodes."""
    e = np.asarray(edges, dtype=LABEL_DTYPE).reshape(-1, 2)
    n_input = len(e)
    loops = e[:, 0] == e[:, 1]
    e = e[~loops]
    lo = np.minimum(e[:, 0], e[:, 1])
    hi = np.maximum(e[:, 0], e[:, 1])
    nodes, inv = np.unique(np.concatenate([lo, hi]), return_inverse=True)
    n = len(nodes)
    a = inv[:len(lo)].astype(np.int64)
    b = inv[len(lo):].astype(np.int64)
    packed = np.unique(a * n + b)
    duplicates = len(a) - len(packed)
    if n:
        a, b = packed // n, packed % n

    degree = np.bincount(np.concatenate([a, b]), minlength=n).astype(np.int64)
    order = np.lexsort((nodes, degree))
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n, dtype=np.int64)
    ra, rb = rank[a], rank[b]
    u = np.minimum(ra, rb)
    v = np.maximum(ra, rb)
    srt = np.lexsort((v, u))
    oriented = np.stack([u[srt], v[srt]], axis=1) if len(u) else np.empty((0, 2), dtype=np.int64)

    src = np.concatenate([oriented[:, 0], oriented[:, 1]])
    dst = np.concatenate([oriented[:, 1], oriented[:, 0]])
    srt = np.lexsort((dst, src))
    indices = dst[srt]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    high_degree = np.bincount(oriented[:, 0], minlength=n).astype(np.int64)

    report = IngestionReport(int(n_input), int(loops.sum()), int(duplicates))
    return Graph(nodes[order], degree[order], oriented, indptr, indices, high_degree, report)


def load_graph(path) -> Graph:
    return normalize(read_edge_list(path))


def from_edges(pairs) -> Graph:
    """Convenience: normalize an iterable of ``(u, v)`` integer pairs."""
    pairs = list(pairs)
    return normalize(np.array(pairs, dtype=LABEL_DTYPE).reshape(-1, 2))


def high_degree_bound(m: int) -> float:
    """Upper bound ``2 * sqrt(m)`` on any high-neighborhood size."""
    return 2.0 * math.sqrt(m)
