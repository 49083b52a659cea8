"""Seeded, splittable random state built on numpy's Philox counter generator.

Every source of randomness in the library (init, shuffling, dropout, sampling,
synthetic data) derives from an RngState so that a run is a pure function of
its seed. Streams are spawn-key paths, so independent components can split
their own substreams without coordinating draw counts.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RngState:
    """A (seed, stream-path) pair; equal states yield identical draw sequences."""

    seed: int
    stream: tuple[int, ...] = field(default=())

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at draw index 0 of this stream."""
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.stream)
        return np.random.Generator(np.random.Philox(ss))

    def spawn(self, index: int) -> "RngState":
        """Child state; children with distinct indices are independent."""
        return RngState(self.seed, self.stream + (index,))
