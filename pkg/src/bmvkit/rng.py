"""Seedable, splittable random streams.

Every random operation in the toolkit draws from a Philox counter-based
generator keyed by a ``(seed, stream)`` pair, so any result can be replayed
from the two integers recorded next to it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1
# splitmix64 multiplier; spreads child ids over the key space
_SPLIT_MULT = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class Stream:
    """A named position in the Philox key space."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed & _MASK64, self.stream & _MASK64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, k: int) -> "Stream":
        """Derive an independent substream; same (self, k) always maps to the same child."""
        mixed = ((self.stream * _SPLIT_MULT) + k + 1) & _MASK64
        return Stream(self.seed, mixed)

    def as_tuple(self) -> tuple[int, int]:
        return (self.seed, self.stream)
