from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from cimcall.taskgen.exceptions import TaskConfigurationError

_log = logging.getLogger(__name__)

DEFAULT_K = 3


@dataclass(frozen=True)
class KmerTable:
    """Mean pore current of every k-mer, a fixed random map onto [-1, 1].

    The k-mer of position ``i`` is the ``k`` bases ending at ``i``, left-padded
    with ``A``; the most recent base is the least significant base-4 digit.
    """

    k: int
    levels: np.ndarray

    @classmethod
    def from_seed(cls, seed: int, k: int = DEFAULT_K) -> KmerTable:
        if k < 1:
            raise TaskConfigurationError(issue=f"k={k} must be positive")
        gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
        return cls(k=k, levels=gen.uniform(-1.0, 1.0, size=4**k))

    def index(self, context: list[int] | np.ndarray) -> int:
        """Index of the k-mer ending with the last element of ``context``."""
        window = [0] * max(self.k - len(context), 0) + list(context[-self.k :])
        value = 0
        for base in window:
            value = value * 4 + int(base)
        return value

    def indices(self, bases: np.ndarray) -> np.ndarray:
        padded = np.concatenate([np.zeros(self.k - 1, dtype=np.int64), bases])
        value = np.zeros(len(bases), dtype=np.int64)
        for offset in range(self.k):
            value = value * 4 + padded[offset : offset + len(bases)]
        return value

    def level(self, context: list[int] | np.ndarray) -> float:
        return float(self.levels[self.index(context)])
