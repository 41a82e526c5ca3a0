"""Deterministic seeding and random streams.

Every random decision in the engine flows through one of two primitives,
both keyed by a 64-bit value obtained from :func:`derive_key`:

* :class:`SplitMix64` -- a splitmix64 stream for scalar draws (trim
  offsets, clip/recipe selection).
* :func:`generator` -- a numpy PCG64 generator for array draws (noise).

Keys are derived by hashing the string rendering of the parts with
SHA-256 and taking the first 8 bytes little-endian, so adding sweep cells
never perturbs the seeds of existing ones.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_key(*parts: int | float | str) -> int:
    """Derive a 64-bit key from an ordered tuple of seed components."""
    text = ":".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


class SplitMix64:
    """splitmix64 sequence generator (Steele, Lea & Flood 2014)."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randbelow(self, n: int) -> int:
        """Unbiased integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n

    def uniform(self) -> float:
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


def generator(key: int) -> np.random.Generator:
    """numpy Generator (PCG64) seeded with a derived 64-bit key."""
    return np.random.Generator(np.random.PCG64(key & _MASK64))


def sample_without_replacement(n: int, k: int, key: int) -> list[int]:
    """k distinct indices from range(n) via seeded partial Fisher-Yates."""
    if k > n:
        raise ValueError(f"cannot sample {k} from {n}")
    sm = SplitMix64(key)
    pool = list(range(n))
    for i in range(k):
        j = i + sm.randbelow(n - i)
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k]
