"""Deterministic 64-bit generator for the finite model generator.

SplitMix64 is used rather than ``random.Random`` so that generated model
bytes are identical across Python versions and platforms.  The state is a
single counter-like word; instances are cheap values that can be passed
around and forked without shared mutable state.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], rejection-sampled for exactness."""
        span = hi - lo + 1
        limit = (1 << 64) - ((1 << 64) % span)
        while True:
            x = self.next_u64()
            if x < limit:
                return lo + (x % span)

    def choice(self, seq):
        return seq[self.randint(0, len(seq) - 1)]

    def fork(self, tag: int) -> "SplitMix64":
        """Independent child stream keyed by (state, tag)."""
        child = SplitMix64(self.next_u64() ^ (tag * 0x9E3779B97F4A7C15))
        return child
