"""Deterministic, stream-addressable random number generation.

Every stochastic routine in this package draws from an :class:`RngStream`,
a (seed, stream id) pair backed by the counter-based Philox bit generator.
The same (seed, stream id, call sequence) always reproduces the same
draws, and distinct stream ids give statistically independent streams,
so reproducibility does not depend on execution order across chains or
replicates.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np


def _mix(seed: int, parts: tuple) -> int:
    """Stable 64-bit hash of (seed, *parts), identical across runs."""
    h = hashlib.blake2b(digest_size=8)
    h.update(repr((int(seed),) + tuple(parts)).encode())
    return int.from_bytes(h.digest(), "little")


@dataclass
class RngStream:
    """A seedable, forkable random stream.

    A single stream must not be shared by two workers at once; fork
    child streams with :meth:`child` and hand those out instead.
    """

    seed: int
    stream_id: int = 0
    _gen: np.random.Generator | None = field(default=None, repr=False, compare=False)

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            key = (int(self.seed) % 2**64) * 2**64 + (int(self.stream_id) % 2**64)
            self._gen = np.random.Generator(np.random.Philox(key=key))
        return self._gen

    def child(self, *parts) -> "RngStream":
        """Derive an independent stream keyed by (this stream, parts)."""
        return RngStream(self.seed, _mix(self.stream_id, parts))

    def standard_normal(self, size=None) -> np.ndarray:
        return self.generator.standard_normal(size)

    def gamma(self, shape, scale=1.0, size=None) -> np.ndarray:
        return self.generator.gamma(shape, scale, size)
