"""
Seeded, platform-independent random stream.

Every Rng wraps a numpy Generator over the counter-based Philox bit
generator, keyed by a SeedSequence built from the seed and the chain of
stream ids passed to `derive`. Philox output depends only on the key and the
counter, so a sequence is the same on every platform and does not depend on
how draws are batched.
"""

from typing import Tuple

import numpy as np

from utils.errors import ArgumentError


class Rng:
    """
    Seeded stream with derivable child streams.

    Not thread-safe: each thread should own its Rng (see `derive`).
    """

    def __init__(self, seed: int, streams: Tuple[int, ...] = ()) -> None:
        if seed < 0:
            raise ArgumentError(f"seed must be non-negative, got {seed}")
        self.seed = int(seed)
        self.streams = tuple(int(s) for s in streams)
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.streams)
        self.generator = np.random.Generator(np.random.Philox(sequence))

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, streams={self.streams})"

    def derive(self, stream: int) -> "Rng":
        """An independent child stream, fixed by (seed, stream path)."""
        if stream < 0:
            raise ArgumentError(f"stream id must be non-negative, got {stream}")
        return Rng(self.seed, self.streams + (int(stream),))

    def uniform(self, n: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
        return rng_uniform(self, n, lo, hi)

    def normal(self, n: int, mean: float = 0.0, std: float = 1.0) -> np.ndarray:
        return mean + std * self.generator.standard_normal(_count(n))

    def permutation(self, n: int) -> np.ndarray:
        """A uniformly shuffled arange(n)."""
        return self.generator.permutation(_count(n))


def _count(n: int) -> int:
    if n < 0:
        raise ArgumentError(f"draw count must be non-negative, got {n}")
    return int(n)


def rng_uniform(rng: Rng, n: int, lo: float, hi: float) -> np.ndarray:
    """
    n i.i.d. draws in [lo, hi).

    Raises:
        ArgumentError: if lo >= hi
    """
    if not lo < hi:
        raise ArgumentError(f"uniform range needs lo < hi, got [{lo}, {hi})")
    unit = rng.generator.random(_count(n))
    if lo == 0.0 and hi == 1.0:
        return unit
    values = lo + (hi - lo) * unit
    # rounding can land exactly on hi
    return np.minimum(values, np.nextafter(hi, lo))
