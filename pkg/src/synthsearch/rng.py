"""Deterministic random numbers via splitmix64.

Everything that must be reproducible across runs and platforms (fixture
generation, answer sampling, the seeded regression queries) draws from this
generator rather than :mod:`random`, so byte-identical output is a function
of the seed alone. splitmix64 is the reference algorithm: 64-bit state,
golden-gamma increment, two xor-shift-multiply finalizer rounds.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """splitmix64 stream; fully determined by the 64-bit seed."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform-ish integer in [0, n). Plain modulo; the tiny bias is
        irrelevant for fixture data and keeps the derivation portable."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def choice(self, items):
        return items[self.below(len(items))]

    def sample_indices(self, n: int, k: int) -> list[int]:
        """First k positions of a Fisher-Yates shuffle of range(n), sorted.

        Uniform sample without replacement; deterministic given the stream
        state.
        """
        if k >= n:
            return list(range(n))
        idx = list(range(n))
        for i in range(k):
            j = i + self.below(n - i)
            idx[i], idx[j] = idx[j], idx[i]
        return sorted(idx[:k])
