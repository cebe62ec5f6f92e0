"""Stateless 64-bit mixing used for every random decision.

Each decision is a pure function of ``(seed, domain, *parts)`` so that map
tasks stay side-effect free and reruns are reproducible.  The scalar
functions use Python integers; the ``*_array`` variants are the vectorized
equivalents over uint64 arrays and must agree bit-for-bit.
"""
import numpy as np

MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

DOMAIN_BUCKET = 0x42554B54
DOMAIN_PAIR = 0x50414952
DOMAIN_COLOR = 0x434F4C52


def mix64(z: int) -> int:
    z = (z + _GOLDEN) & MASK
    z = ((z ^ (z >> 30)) * _M1) & MASK
    z = ((z ^ (z >> 27)) * _M2) & MASK
    return z ^ (z >> 31)


def hash_parts(seed: int, domain: int, *parts: int) -> int:
    h = mix64((seed & MASK) ^ domain)
    for p in parts:
        h = mix64(h ^ (int(p) & MASK))
    return h


def to_unit(h: int) -> float:
    """Top 53 bits as a float in [0, 1)."""
    return (h >> 11) * (1.0 / (1 << 53))


def reduce_range(h: int, n: int) -> int:
    """Map a 64-bit hash to ``[0, n)`` by multiply-high on its top 32 bits."""
    return ((h >> 32) * n) >> 32


_U = np.uint64


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = z + _U(_GOLDEN)
        z = (z ^ (z >> _U(30))) * _U(_M1)
        z = (z ^ (z >> _U(27))) * _U(_M2)
    return z ^ (z >> _U(31))


def hash_parts_array(seed: int, domain: int, *parts) -> np.ndarray:
    h = _U(mix64((seed & MASK) ^ domain))
    out = None
    for p in parts:
        p = np.asarray(p).astype(np.uint64)
        out = mix64_array((h if out is None else out) ^ p)
    if out is None:
        return np.asarray(h, dtype=np.uint64)
    return out


def to_unit_array(h: np.ndarray) -> np.ndarray:
    return (h >> _U(11)).astype(np.float64) * (1.0 / (1 << 53))


def reduce_range_array(h: np.ndarray, n: int) -> np.ndarray:
    if n >= 1 << 32:
        raise ValueError("range too large")
    return (((h >> _U(32)) * _U(n)) >> _U(32)).astype(np.int64)
