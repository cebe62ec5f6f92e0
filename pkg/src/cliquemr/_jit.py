"""Numba switch.

Set ``CLIQUEMR_DISABLE_NUMBA=1`` before import to route every hot kernel
through its pure-numpy implementation instead of the compiled one.
"""
import os

USE_NUMBA = os.environ.get("CLIQUEMR_DISABLE_NUMBA", "").lower() not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from numba import njit as _njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

if USE_NUMBA:
    def njit(f=None, **options):
        options.setdefault("cache", True)
        options.setdefault("nogil", True)
        if f is None:
            return lambda g: _njit(**options)(g)
        return _njit(**options)(f)
else:
    def njit(f=None, **options):
        if f is None:
            return lambda g: g
        return f


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
