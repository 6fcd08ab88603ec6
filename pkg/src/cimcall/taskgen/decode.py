from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from cimcall.nn import BLANK
from cimcall.nn.exceptions import ShapeMismatchError
from cimcall.taskgen.models import collapse

if TYPE_CHECKING:
    from cimcall.taskgen.kmer import KmerTable

_log = logging.getLogger(__name__)


def greedy_decode(distributions: np.ndarray) -> str:
    """Per-frame argmax followed by label collapse.

    Raises:
        ShapeMismatchError: If the last axis is not the 5 output classes.
    """
    distributions = np.asarray(distributions)
    if distributions.ndim != 2 or distributions.shape[-1] != BLANK + 1:
        raise ShapeMismatchError(
            expected=f"(frames, {BLANK + 1})",
            actual=distributions.shape,
            operation="greedy_decode",
        )
    return collapse(distributions.argmax(axis=-1))


def decode_batch(distributions: np.ndarray, lengths: np.ndarray) -> list[str]:
    return [greedy_decode(d[:n]) for d, n in zip(distributions, lengths, strict=True)]


def lookup_oracle(signal: np.ndarray, table: KmerTable) -> np.ndarray:
    """One-hot frame distributions for a noiseless signal.

    A frame repeating the value of a base-start frame is that base's second
    dwell frame and reads as blank. Every other frame starts a new base, found
    as the base whose k-mer with the bases decoded so far has the nearest level.
    """
    signal = np.asarray(signal, dtype=np.float64)
    out = np.zeros((len(signal), BLANK + 1))
    context: list[int] = []
    previous_was_start = False
    for t, value in enumerate(signal):
        if t > 0 and previous_was_start and value == signal[t - 1]:
            out[t, BLANK] = 1.0
            previous_was_start = False
            continue
        candidates = [abs(table.level([*context, base]) - value) for base in range(4)]
        base = int(np.argmin(candidates))
        context.append(base)
        out[t, base] = 1.0
        previous_was_start = True
    return out
