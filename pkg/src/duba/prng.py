"""Stateless, counter-based pseudorandom primitives.

Every random decision in the pipeline is a pure function of a 64-bit key
and a counter, so values can be regenerated in any order, from any thread,
and the same inputs always reproduce the same outputs. Keys are derived by
hashing the caller's seed material with blake2b; per-counter values come
from the splitmix64 output function, vectorized over numpy uint64.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def derive_key(*parts: int | str) -> int:
    """Collapse integers and strings into a single 64-bit stream key."""
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        if isinstance(part, str):
            h.update(b"s")
            h.update(part.encode("utf-8"))
        else:
            h.update(b"i")
            h.update((int(part) & _MASK64).to_bytes(8, "little"))
        h.update(b"\x00")
    return int.from_bytes(h.digest(), "little")


def hash_u64(key: int, counters: np.ndarray) -> np.ndarray:
    """splitmix64 outputs for the given counters under one key."""
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(key & _MASK64) + (c + np.uint64(1)) * _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


def rank_order(key: int, n: int) -> np.ndarray:
    """Deterministic pseudorandom permutation of range(n).

    Items are ordered by their hash value; ties (vanishingly rare over
    64 bits) break by index, so the order is stable everywhere.
    """
    return np.argsort(hash_u64(key, np.arange(n, dtype=np.uint64)), kind="stable")


def path_key(relpath: str) -> int:
    """Stable 64-bit key for a dataset-relative path (separators normalized)."""
    normalized = relpath.replace("\\", "/")
    h = hashlib.blake2b(normalized.encode("utf-8"), digest_size=8)
    return int.from_bytes(h.digest(), "little")
