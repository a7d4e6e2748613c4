"""Portable deterministic randomness.

All randomized behavior in the lab (test generation, search tie-breaking)
draws from SplitMix64, a 64-bit mix generator with a fixed, documented
algorithm, so identical seeds give identical streams on every platform
and Python version:

    state := (state + 0x9E3779B97F4A7C15) mod 2^64
    z := state
    z := (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9   (mod 2^64)
    z := (z XOR (z >> 27)) * 0x94D049BB133111EB   (mod 2^64)
    output := z XOR (z >> 31)

Bounded draws use rejection sampling to stay unbiased.
"""

from __future__ import annotations

from typing import Sequence

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        bound = _MASK + 1 - ((_MASK + 1) % n)
        while True:
            z = self.next_u64()
            if z < bound:
                return z % n

    def int_in(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] inclusive."""
        return lo + self.below(hi - lo + 1)

    def choice(self, seq: Sequence):
        return seq[self.below(len(seq))]


def fnv1a64(text: str) -> int:
    """FNV-1a, used to derive stable per-name stream seeds."""
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & _MASK
    return h


def derive_seed(seed: int, name: str) -> int:
    """Stable sub-stream seed for (seed, name)."""
    return SplitMix64((seed & _MASK) ^ fnv1a64(name)).next_u64()


def tiebreak_key(seed: int, ordinal: int) -> int:
    """Deterministic pseudo-random key for breaking ties in search order."""
    return SplitMix64(((seed & _MASK) * 0x9E3779B97F4A7C15 + ordinal) & _MASK).next_u64()
