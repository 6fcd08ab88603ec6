from __future__ import annotations

import logging
from enum import IntEnum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

_log = logging.getLogger(__name__)


class StreamKind(IntEnum):
    """Top-level namespaces of derived random streams."""

    PROGRAM = 1
    RUN = 2
    TRAIN = 3
    DATASET = 4
    LIBRARY = 5
    INFERENCE = 6
    MASK = 7
    MITIGATION = 8


class RngStream(BaseModel):
    """Counter-based random stream keyed by a seed and a stream path.

    Draws depend only on ``(seed, stream_id)``, never on call order or thread
    schedule: each call to ``generator`` starts a fresh Philox counter.
    """

    model_config = ConfigDict(frozen=True)

    seed: int = Field(ge=0, lt=2**64, description="64-bit master seed")
    stream_id: tuple[int, ...] = Field(
        default=(0, 0),
        description="Stream path, e.g. (tile index, invocation counter)",
    )

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.stream_id)
        return np.random.Generator(np.random.Philox(sequence))

    def child(self, *keys: int) -> RngStream:
        """Derive an independent sub-stream by extending the stream path."""
        return RngStream(seed=self.seed, stream_id=(*self.stream_id, *map(int, keys)))

    def normal(self, scale: float, size: int | tuple[int, ...]) -> np.ndarray:
        return self.generator().normal(0.0, scale, size=size)

    def derive_seed(self) -> int:
        """Collapse this stream into a plain 64-bit seed."""
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.stream_id)
        return int(sequence.generate_state(1, dtype=np.uint64)[0])
