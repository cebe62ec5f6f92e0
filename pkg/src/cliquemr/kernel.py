"""Sequential clique counting on small graphs, plus a brute-force oracle."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence

import numpy as np

from . import _kernels
from .graph import Graph, OrderKey

MAX_K = 32
BRUTE_FORCE_MAX_VERTICES = 24
UINT64_MAX = (1 << 64) - 1


@dataclass(frozen=True)
class LocalGraph:
    """A small graph whose vertex list and adjacency lists follow one order."""

    vertices: tuple
    adjacency: Dict[Hashable, tuple]

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValueError("duplicate vertices")
        for v, nbrs in self.adjacency.items():
            if v not in vs:
                raise ValueError(f"adjacency for unknown vertex {v!r}")
            for w in nbrs:
                if w not in vs:
                    raise ValueError(f"dangling endpoint {w!r}")
                if w == v:
                    raise ValueError("self-loop")
                if v not in self.adjacency.get(w, ()):
                    raise ValueError(f"asymmetric edge {v!r}-{w!r}")

    @classmethod
    def from_edges(cls, edges: Iterable, vertices: Iterable = (),
                   key: Optional[Callable] = None) -> "LocalGraph":
        """Build from an edge iterable; ``key`` orders vertices.

        The default order is ``(local degree, label)``.
        """
        adj: Dict = {v: set() for v in vertices}
        for u, v in edges:
            if u == v:
                continue
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        if key is None:
            def key(x):
                return OrderKey(len(adj[x]), x)
        ordered = tuple(sorted(adj, key=key))
        rank = {v: i for i, v in enumerate(ordered)}
        adjacency = {v: tuple(sorted(adj[v], key=rank.__getitem__)) for v in ordered}
        return cls(ordered, adjacency)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adjacency.values()) // 2

    def oriented_csr(self):
        """Oriented CSR over vertex positions: each vertex lists later vertices."""
        pos = {v: i for i, v in enumerate(self.vertices)}
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        rows = []
        for i, v in enumerate(self.vertices):
            out = sorted(pos[w] for w in self.adjacency.get(v, ()) if pos[w] > i)
            rows.append(out)
            indptr[i + 1] = indptr[i] + len(out)
        indices = np.fromiter(itertools.chain.from_iterable(rows), dtype=np.int64,
                              count=int(indptr[-1]))
        return indptr, indices


def _check_k(k: int):
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= MAX_K:
        raise ValueError(f"k must be an integer in [1, {MAX_K}], got {k!r}")


def count_dag(indptr: np.ndarray, indices: np.ndarray, k: int, inc: Optional[np.ndarray] = None) -> int:
    """Count ``k``-cliques of an oriented CSR graph (k >= 1)."""
    _check_k(k)
    n = len(indptr) - 1
    if k == 1:
        if inc is not None:
            inc += 1
        return n
    if k == 2:
        if inc is not None:
            inc += np.diff(indptr)
            inc += np.bincount(indices, minlength=n)
        return len(indices)
    if k > n:
        return 0
    empty = np.zeros(0, dtype=np.int64)
    return int(_kernels.count_dag(indptr, indices, k, empty if inc is None else inc, empty, empty))


def _list_dag(indptr, indices, k, trace=None):
    """Yield every ``k``-clique (k >= 1) as a tuple of positions, ascending."""
    n = len(indptr) - 1

    def extend(prefix, cand, need):
        if trace is not None:
            trace.append((len(prefix), len(cand)))
        if need == 0:
            yield tuple(prefix)
            return
        for i in range(len(cand) - need + 1):
            w = int(cand[i])
            nxt = np.intersect1d(indices[indptr[w]:indptr[w + 1]], cand[i + 1:], assume_unique=True)
            if len(nxt) >= need - 1:
                yield from extend(prefix + [w], nxt, need - 1)

    yield from extend([], np.arange(n, dtype=np.int64), k)


def count_cliques(g: LocalGraph, k: int, visitor: Optional[Callable[[list], None]] = None,
                  trace: Optional[list] = None) -> int:
    """Exact number of ``k``-cliques of ``g``.

    With ``visitor``, it is called once per clique with the clique's vertices
    in the graph's order.  ``trace`` (listing mode only) collects
    ``(depth, candidate_count)`` for every recursion step.
    """
    _check_k(k)
    if k > g.n:
        return 0
    indptr, indices = g.oriented_csr()
    if visitor is None and trace is None:
        return count_dag(indptr, indices, k)
    count = 0
    for clique in _list_dag(indptr, indices, k, trace):
        count += 1
        if visitor is not None:
            visitor([g.vertices[i] for i in clique])
    return count


def brute_force_count(g: LocalGraph, k: int) -> int:
    """Count ``k``-subsets of pairwise adjacent vertices by full enumeration."""
    _check_k(k)
    if g.n > BRUTE_FORCE_MAX_VERTICES:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_MAX_VERTICES} vertices")
    adj = {v: set(a) for v, a in g.adjacency.items()}
    count = 0
    for subset in itertools.combinations(g.vertices, k):
        if all(b in adj.get(a, ()) for a, b in itertools.combinations(subset, 2)):
            count += 1
    return count


def brute_force_list(g: LocalGraph, k: int) -> List[frozenset]:
    if g.n > BRUTE_FORCE_MAX_VERTICES:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_MAX_VERTICES} vertices")
    adj = {v: set(a) for v, a in g.adjacency.items()}
    return [frozenset(s) for s in itertools.combinations(g.vertices, k)
            if all(b in adj.get(a, ()) for a, b in itertools.combinations(s, 2))]


def local_graph(g: Graph) -> LocalGraph:
    """View a normalized :class:`Graph` as a :class:`LocalGraph` in global order."""
    labels = [int(x) for x in g.labels]
    adjacency = {}
    for r, lab in enumerate(labels):
        row = g.indices[g.indptr[r]:g.indptr[r + 1]]
        adjacency[lab] = tuple(labels[x] for x in row)
    return LocalGraph(tuple(labels), adjacency)


def count_graph_cliques(g: Graph, k: int, per_node: bool = False):
    """Sequential count over a whole normalized graph using its rank orientation.

    Returns ``count`` or ``(count, incidence_by_rank)`` when ``per_node``.
    """
    inc = np.zeros(g.n, dtype=np.int64) if per_node else None
    c = count_dag(g.out_indptr, np.ascontiguousarray(g.edges[:, 1]), k, inc)
    if c > UINT64_MAX:
        raise OverflowError("clique count exceeds 64-bit range")
    return (c, inc) if per_node else c
