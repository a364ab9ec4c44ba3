"""Seeded random source shared by every stochastic operation."""
from __future__ import annotations

import numpy as np

_SEED_MASK = (1 << 64) - 1


class RandomSource:
    """Deterministic numpy PCG64 stream.

    The same seed yields the same draw sequence on every platform; numpy
    guarantees stream stability for the bit generator and the methods used here.
    """

    algorithm = "PCG64"

    def __init__(self, seed: int):
        self._seed = int(seed) & _SEED_MASK
        self._rng = np.random.Generator(np.random.PCG64(self._seed))

    @property
    def seed(self) -> int:
        return self._seed

    def derive(self, offset: int) -> RandomSource:
        """Child source with seed ``seed + offset`` (mod 2**64) for sub-tasks."""
        return RandomSource((self._seed + int(offset)) & _SEED_MASK)

    def uniform(self, low, high, size=None) -> np.ndarray:
        return self._rng.uniform(low, high, size)

    def normal(self, sigma: float, size) -> np.ndarray:
        return self._rng.normal(0.0, sigma, size)

    def choice(self, n: int, size: int) -> np.ndarray:
        """``size`` distinct indices drawn uniformly from range(n)."""
        return self._rng.choice(n, size=size, replace=False)

    def __repr__(self) -> str:
        return f"RandomSource(seed={self._seed}, algorithm={self.algorithm!r})"
