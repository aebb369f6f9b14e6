"""Seedable pseudo-random number generator.

xoshiro256** with splitmix64 state expansion and Box-Muller normal
sampling.  The algorithm is pinned (rather than delegating to numpy's
Generator) so that seeded runs reproduce bit-for-bit anywhere, and so
the compiled training loop can drive an identical stream.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step; returns (next_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


def seed_state(seed: int) -> np.ndarray:
    """xoshiro256** state words for a seed, as a uint64 array.

    This is the same expansion ``Xoshiro256StarStar`` uses, exposed so
    compiled code can continue an identical stream.
    """
    sm = seed & _MASK64
    state = np.empty(4, dtype=np.uint64)
    for i in range(4):
        sm, word = _splitmix64(sm)
        state[i] = word
    return state


class Xoshiro256StarStar:
    """xoshiro256** stream seeded from a single integer via splitmix64."""

    def __init__(self, seed: int):
        self._s = [int(w) for w in seed_state(seed)]
        self._spare_normal: float | None = None

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def uniform(self) -> float:
        """Uniform double in (0, 1] from the top 53 bits."""
        return ((self.next_u64() >> 11) + 1) * 2.0**-53

    def normal(self) -> float:
        """Standard normal draw, Box-Muller (trigonometric form).

        Draws come in pairs; the second of each pair is cached so the
        sequence is a deterministic function of the u64 stream.
        """
        if self._spare_normal is not None:
            z = self._spare_normal
            self._spare_normal = None
            return z
        u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        self._spare_normal = r * math.sin(theta)
        return r * math.cos(theta)

    def shuffle(self, items) -> None:
        """In-place Fisher-Yates shuffle; index drawn as next_u64() % (i+1)."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_u64() % (i + 1)
            items[i], items[j] = items[j], items[i]
