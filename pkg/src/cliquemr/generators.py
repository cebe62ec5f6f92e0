"""Synthetic graphs: preferential attachment and G(n, p)."""
from __future__ import annotations

import random
from typing import Optional

import numpy as np

from .graph import Graph, normalize

# arbitrary defaults for synthetic experiments
DEFAULT_PA_N = 100_000
DEFAULT_PA_MU = 5


def pa_edges(n: int, mu: int, seed: Optional[int] = 0) -> np.ndarray:
    """Edge array of a preferential-attachment graph on nodes ``0..n-1``.

    Starts from a clique on ``mu + 1`` nodes.  Each later node attaches to
    ``mu`` distinct existing nodes, each drawn with probability proportional
    to its degree by picking a uniform endpoint of a uniform existing edge.
    """
    if isinstance(n, bool) or isinstance(mu, bool) or int(n) != n or int(mu) != mu:
        raise ValueError("n and mu must be integers")
    n, mu = int(n), int(mu)
    if mu < 1:
        raise ValueError(f"mu must be >= 1, got {mu}")
    if n < mu + 1:
        raise ValueError(f"n must be >= mu + 1, got n={n}, mu={mu}")
    rng = random.Random(seed)
    m = mu * (mu + 1) // 2 + mu * (n - mu - 1)
    # endpoints[2i], endpoints[2i+1] are the ends of edge i
    endpoints = np.empty(2 * m, dtype=np.int64)
    pos = 0
    for a in range(mu + 1):
        for b in range(a + 1, mu + 1):
            endpoints[pos], endpoints[pos + 1] = a, b
            pos += 2
    for v in range(mu + 1, n):
        chosen = set()
        while len(chosen) < mu:
            chosen.add(int(endpoints[rng.randrange(pos)]))
        for t in chosen:
            endpoints[pos], endpoints[pos + 1] = t, v
            pos += 2
    return endpoints.reshape(-1, 2)


def generate_pa(n: int = DEFAULT_PA_N, mu: int = DEFAULT_PA_MU, seed: Optional[int] = 0) -> Graph:
    return normalize(pa_edges(n, mu, seed))


def gnp_edges(n: int, p: float, seed: Optional[int] = 0) -> np.ndarray:
    if n < 0 or not 0.0 <= p <= 1.0:
        raise ValueError("need n >= 0 and 0 <= p <= 1")
    rng = np.random.default_rng(seed)
    if n <= 4096:
        iu, ju = np.triu_indices(n, 1)
        keep = rng.random(len(iu)) < p
        return np.stack([iu[keep], ju[keep]], axis=1).astype(np.int64)
    # sparse regime: draw the edge count, then distinct uniform pairs
    target = int(rng.binomial(n * (n - 1) // 2, p))
    packed = np.zeros(0, dtype=np.int64)
    while len(packed) < target:
        a = rng.integers(0, n, 2 * (target - len(packed)) + 16)
        b = rng.integers(0, n, len(a))
        ok = a != b
        lo, hi = np.minimum(a, b)[ok], np.maximum(a, b)[ok]
        packed = np.unique(np.concatenate([packed, lo * n + hi]))
    packed = rng.permutation(packed)[:target]
    return np.stack([packed // n, packed % n], axis=1)


def gnp(n: int, p: float, seed: Optional[int] = 0) -> Graph:
    """Erdos-Renyi G(n, p); isolated nodes do not appear in the result."""
    return normalize(gnp_edges(n, p, seed))
