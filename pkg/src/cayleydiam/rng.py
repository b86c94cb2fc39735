"""Counter-based random streams built on the splitmix64 finalizer.

A stream is addressed by a 64-bit key; its ``i``-th word is
``mix64(key + (i + 1) * GAMMA)``.  Keys for sub-streams are derived by
mixing, so the value drawn for (trial, element) never depends on how the
work is split between processes.
"""

from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MASK = (1 << 64) - 1
_INV_2_53 = 1.0 / (1 << 53)


def mix64_int(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def mix64(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def derive(seed: int, *keys: int) -> int:
    """Key of the sub-stream ``seed / keys[0] / keys[1] / ...``."""
    key = seed & MASK
    for k in keys:
        key = mix64_int(key + ((k & MASK) + 1) * GAMMA)
    return key


def words(key: int, count: int, offset: int = 0) -> np.ndarray:
    """Words ``offset .. offset+count-1`` of the stream ``key`` as uint64."""
    idx = np.arange(offset, offset + count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(key & MASK) + (idx + np.uint64(1)) * np.uint64(GAMMA)
    return mix64(z)


def uniforms(key: int, count: int, offset: int = 0) -> np.ndarray:
    """Doubles in [0, 1) with 53 random bits each."""
    return (words(key, count, offset) >> np.uint64(11)).astype(np.float64) * _INV_2_53


def integers(key: int, count: int, n: int, offset: int = 0) -> np.ndarray:
    """Integers in ``[0, n)`` (modulo reduction; bias below ``n / 2^64``)."""
    return (words(key, count, offset) % np.uint64(n)).astype(np.int64)
