"""Sampling estimators built on the exact pipeline.

Both estimators only change which high-neighbor pairs Map 2 emits, and
rescale the round-3 count:

* plain pair sampling keeps each ``(owner, x, y)`` pair with probability
  ``p`` and scales by ``p ** -((k-1)(k-2)/2)``;
* color sampling colors every high-neighborhood independently with ``c``
  colors, keeps monochromatic pairs and scales by ``c ** (k-2)``.

All randomness is a hash of ``(seed, owner, endpoints)`` on external labels,
so both backends and any worker count see identical samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import _hashing as H
from .engine import RunReport
from .exact import _fff_blocks, _fff_records, check_k
from .graph import Graph

PLAIN, COLOR = "plain", "color"


@dataclass(frozen=True)
class SamplingConfig:
    mode: str
    p: float = 1.0
    c: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.mode == PLAIN:
            if not 0.0 < self.p <= 1.0:
                raise ValueError(f"plain sampling needs 0 < p <= 1, got {self.p}")
        elif self.mode == COLOR:
            if int(self.c) != self.c or self.c < 1:
                raise ValueError(f"color sampling needs an integer c >= 1, got {self.c}")
        else:
            raise ValueError(f"unknown sampling mode {self.mode!r}")

    @classmethod
    def plain(cls, p: float, seed: int = 0) -> "SamplingConfig":
        return cls(PLAIN, p=p, seed=seed)

    @classmethod
    def color(cls, c: int, seed: int = 0) -> "SamplingConfig":
        return cls(COLOR, c=c, seed=seed)

    def scale(self, k: int) -> float:
        if self.mode == PLAIN:
            return self.p ** -((k - 1) * (k - 2) // 2)
        return float(self.c) ** (k - 2)

    @property
    def edge_rate(self) -> float:
        return self.p if self.mode == PLAIN else 1.0 / self.c


@dataclass
class Estimate:
    k: int
    value: float
    config: SamplingConfig
    run_report: RunReport = field(default_factory=RunReport)
    sampled_cliques: int = 0
    cliques: Optional[List[tuple]] = None

    def relative_error(self, reference: int) -> float:
        return abs(self.value - reference) / reference if reference else float("nan")


def sample_decision_plain(seed: int, owner: int, x: int, y: int, p: float) -> bool:
    """Whether the owner's Map 2 emits the pair ``(x, y)``."""
    return H.to_unit(H.hash_parts(seed, H.DOMAIN_PAIR, owner, x, y)) < p


def color_of(seed: int, owner: int, x: int, c: int) -> int:
    """Color of ``x`` inside ``owner``'s high-neighborhood, in ``[0, c)``."""
    if c < 1:
        raise ValueError("c must be >= 1")
    return H.reduce_range(H.hash_parts(seed, H.DOMAIN_COLOR, owner, x), c)


def plain_mask(seed, owners, xs, ys, p) -> np.ndarray:
    return H.to_unit_array(H.hash_parts_array(seed, H.DOMAIN_PAIR, owners, xs, ys)) < p


def colors(seed, owners, xs, c) -> np.ndarray:
    return H.reduce_range_array(H.hash_parts_array(seed, H.DOMAIN_COLOR, owners, xs), c)


def _record_filter(config: SamplingConfig):
    if config.mode == PLAIN:
        if config.p >= 1.0:
            return None
        return lambda u, x, y: sample_decision_plain(config.seed, u.label, x.label, y.label, config.p)
    if config.c == 1:
        return None
    return lambda u, x, y: (color_of(config.seed, u.label, x.label, config.c)
                            == color_of(config.seed, u.label, y.label, config.c))


def _block_filter(g: Graph, config: SamplingConfig):
    labels = g.labels
    if config.mode == PLAIN:
        if config.p >= 1.0:
            return None

        def keep(owners, xs, ys):
            return plain_mask(config.seed, labels[owners], labels[xs], labels[ys], config.p)
        return keep
    if config.c == 1:
        return None

    def keep(owners, xs, ys):
        lo = labels[owners]
        return colors(config.seed, lo, labels[xs], config.c) == colors(config.seed, lo, labels[ys], config.c)
    return keep


def estimate(g: Graph, k: int, config: SamplingConfig, workers: int = 1,
             deterministic: bool = True, backend: str = "blocks",
             collect_cliques: bool = False) -> Estimate:
    """Sampled estimate of the number of ``k``-cliques.

    ``p = 1`` or ``c = 1`` samples everything and reproduces the exact count.
    With ``collect_cliques`` (records backend) the sampled cliques are listed.
    """
    check_k(k)
    if g.m == 0 or k > g.n:
        return Estimate(k, 0.0, config, RunReport(workers=workers), 0,
                        [] if collect_cliques else None)
    found = None
    if collect_cliques or backend == "records":
        raw, _, report, found = _fff_records(g, k, workers, deterministic, False,
                                             _record_filter(config), collect_cliques)
    elif backend == "blocks":
        raw, _, report = _fff_blocks(g, k, workers, deterministic, False, _block_filter(g, config))
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return Estimate(k, raw * config.scale(k), config, report, raw, found)


def concentration_check(m: int, q_k: float, k: int, config: SamplingConfig,
                        eps: float = 0.1, h: float = 1.0) -> dict:
    """Both sides of the sufficient condition for concentration, constant ``h``.

    Advisory only: the constant is unspecified, so nothing is enforced.
    """
    if m < 2 or q_k <= 0:
        return {"lhs": float("nan"), "rhs": float("nan"), "holds": False}
    if config.mode == PLAIN:
        lhs = config.p ** ((k - 1) * (k - 2) / 2)
        rhs = h * m ** ((k - 3) / 2) * math.log(m) / (eps ** 2 * q_k)
    else:
        lhs = 1.0 / config.c ** (k - 2)
        rhs = h * m ** (k - 2) * math.log(m) / (eps ** 2 * q_k)
    return {"lhs": lhs, "rhs": rhs, "holds": lhs > rhs}
