"""Seeded, splittable random streams.

Every stochastic call in the simulator goes through an object with the
``choice(probs) -> int`` method.  :class:`RngStream` samples; the branch
enumerator in :mod:`qpv.branching` walks every outcome instead.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np


class RngStream:
    """A numpy ``Generator`` keyed by ``(seed, *key)``.

    Child streams from :meth:`split` are statistically independent of the
    parent and of each other, and depend only on the key path, so trial
    ``i`` of a run sees the same randomness no matter how trials are
    scheduled.
    """

    def __init__(self, seed: int, key: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        self._gen = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=self.key))

    def split(self, *key: int) -> "RngStream":
        return RngStream(self.seed, self.key + tuple(key))

    def choice(self, probs: Sequence[float]) -> int:
        total = float(sum(probs))
        u = self._gen.random() * total
        acc = 0.0
        last = 0
        for i, p in enumerate(probs):
            if p <= 0.0:
                continue
            acc += p
            last = i
            if u < acc:
                return i
        return last

    def bit(self) -> int:
        return self.choice((0.5, 0.5))

    def integer(self, k: int) -> int:
        """Uniform draw from ``range(k)``."""
        return self.choice([1.0 / k] * k)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, key={self.key})"
