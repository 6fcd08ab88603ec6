from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from cimcall.nn import BLANK, CLASSES, Batch, pad_batch

_log = logging.getLogger(__name__)

BASES = "".join(CLASSES)
BLANK_SYMBOL = "-"
GAP = "-"


def base_index(base: str) -> int:
    return BASES.index(base)


def labels_to_text(labels: np.ndarray) -> str:
    return "".join(BLANK_SYMBOL if int(c) == BLANK else BASES[int(c)] for c in labels)


def text_to_labels(text: str) -> np.ndarray:
    return np.array(
        [BLANK if c == BLANK_SYMBOL else base_index(c) for c in text], dtype=np.int64
    )


def collapse(labels: np.ndarray) -> str:
    """Merge adjacent identical labels, then drop blanks."""
    out: list[str] = []
    previous = -1
    for label in map(int, labels):
        if label != previous and label != BLANK:
            out.append(BASES[label])
        previous = label
    return "".join(out)


@dataclass(frozen=True)
class SyntheticRead:
    reference: str
    signal: np.ndarray
    frame_labels: np.ndarray

    @property
    def frames(self) -> int:
        return len(self.signal)


@dataclass(frozen=True)
class SyntheticDataset:
    reads: tuple[SyntheticRead, ...]
    meta: dict[str, object] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.reads)

    def __iter__(self):
        return iter(self.reads)

    def to_batch(self, min_frames: int = 1) -> Batch:
        return pad_batch(
            [r.signal for r in self.reads],
            [r.frame_labels for r in self.reads],
            min_frames=min_frames,
        )

    @property
    def mean_frames_per_base(self) -> float:
        frames = sum(r.frames for r in self.reads)
        bases = sum(len(r.reference) for r in self.reads)
        return frames / bases if bases else 0.0


@dataclass(frozen=True)
class Alignment:
    """Global alignment of two base strings; gaps are ``-``."""

    aligned_a: str
    aligned_b: str
    matches: int
    score: int

    @property
    def alignment_length(self) -> int:
        return len(self.aligned_a)
