"""Deterministic seed derivation and the splitmix64 stream.

Every stochastic component in the package draws from streams derived with
`derive`, so a whole experiment is a pure function of its master seed and
trial seeds can be computed independently of execution order. The numba
kernels in `agent.rollouts` reimplement the same arithmetic; a test pins the
two implementations to each other.
"""

from __future__ import annotations

import hashlib

_MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """splitmix64 finalizer; bijective on 64-bit ints."""
    x = (x + GOLDEN) & _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    x ^= x >> 31
    return x


def derive(seed: int, *keys: int) -> int:
    """Fold integer keys into a seed, producing an independent substream seed."""
    h = mix64(seed & _MASK64)
    for k in keys:
        h = mix64(h ^ mix64(k & _MASK64))
    return h


def map_key(map_id: str) -> int:
    """Stable 64-bit key for a map id, for use as a `derive` key."""
    digest = hashlib.sha256(map_id.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class SplitMix64:
    """Minimal splitmix64 generator (reference implementation for tests)."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & _MASK64
        z = self.state
        z ^= z >> 30
        z = (z * 0xBF58476D1CE4E5B9) & _MASK64
        z ^= z >> 27
        z = (z * 0x94D049BB133111EB) & _MASK64
        z ^= z >> 31
        return z

    def uniform(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * 2.0**-53
