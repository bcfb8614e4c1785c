"""Deterministic, splittable random streams.

A stream is identified by ``(seed, key)`` where ``key`` is a tuple of
non-negative integers. Children extend the key, so the stream used by a given
Monte Carlo block depends only on its position in the work decomposition and
never on how many workers ran or in which order.
"""

from __future__ import annotations

import numpy as np


class RandomStream:
    """Counter-based generator (Philox) addressed by ``seed`` and a key path."""

    def __init__(self, seed: int, key: tuple[int, ...] = ()):
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.key)
        self._gen = np.random.Generator(np.random.Philox(ss))

    def child(self, *index: int) -> "RandomStream":
        return RandomStream(self.seed, self.key + tuple(index))

    def split(self, n: int) -> list["RandomStream"]:
        return [self.child(i) for i in range(n)]

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def uniform(self, n: int) -> np.ndarray:
        """Uniforms on the half-open interval (0, 1]."""
        return 1.0 - self._gen.random(n)

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, key={self.key})"
