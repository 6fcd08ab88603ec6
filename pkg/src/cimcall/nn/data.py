from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from cimcall.nn.exceptions import ShapeMismatchError
from cimcall.nn.network import IGNORE_LABEL


@dataclass(frozen=True)
class Batch:
    """Zero-padded signals with ``-1`` labels past each read's end."""

    signals: np.ndarray
    labels: np.ndarray
    lengths: np.ndarray

    def __len__(self) -> int:
        return len(self.lengths)

    def take(self, index: np.ndarray) -> Batch:
        index = np.asarray(index)
        width = int(self.lengths[index].max(initial=1))
        return Batch(
            signals=self.signals[index, :width],
            labels=self.labels[index, :width],
            lengths=self.lengths[index],
        )


def pad_batch(
    signals: Sequence[np.ndarray],
    labels: Sequence[np.ndarray],
    min_frames: int = 1,
) -> Batch:
    if len(signals) != len(labels):
        raise ShapeMismatchError(
            expected=len(signals),
            actual=len(labels),
            operation="pad_batch",
        )
    lengths = np.array([len(s) for s in signals], dtype=np.int64)
    for signal, label in zip(signals, labels, strict=True):
        if len(signal) != len(label):
            raise ShapeMismatchError(
                expected=len(signal),
                actual=len(label),
                operation="pad_batch",
            )
    width = max(int(lengths.max(initial=0)), min_frames)

    padded = np.zeros((len(signals), width), dtype=np.float64)
    padded_labels = np.full((len(signals), width), IGNORE_LABEL, dtype=np.int64)
    for row, (signal, label) in enumerate(zip(signals, labels, strict=True)):
        padded[row, : len(signal)] = signal
        padded_labels[row, : len(label)] = label
    return Batch(signals=padded, labels=padded_labels, lengths=lengths)
