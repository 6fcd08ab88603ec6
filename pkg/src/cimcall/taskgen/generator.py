from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from cimcall.nn import BLANK
from cimcall.taskgen.exceptions import TaskConfigurationError
from cimcall.taskgen.kmer import KmerTable
from cimcall.taskgen.models import BASES, SyntheticDataset, SyntheticRead

if TYPE_CHECKING:
    from cimcall.device import RngStream

_log = logging.getLogger(__name__)


def dwell_times(
    bases: np.ndarray, dwell_range: tuple[int, int], gen: np.random.Generator
) -> np.ndarray:
    """Frames per base; a base followed by the same base dwells two or more."""
    low, high = dwell_range
    dwell = gen.integers(low, high + 1, size=len(bases))
    repeats = np.zeros(len(bases), dtype=bool)
    repeats[:-1] = bases[:-1] == bases[1:]
    return np.where(repeats, np.maximum(dwell, 2), dwell)


def generate_read(
    read_length: int,
    noise_sigma: float,
    dwell_range: tuple[int, int],
    table: KmerTable,
    rng: RngStream,
) -> SyntheticRead:
    gen = rng.generator()
    bases = gen.integers(0, 4, size=read_length)
    dwell = dwell_times(bases, dwell_range, gen)
    levels = table.levels[table.indices(bases)]

    signal = np.repeat(levels, dwell)
    if noise_sigma > 0.0:
        signal = signal + gen.normal(0.0, noise_sigma, size=signal.shape)

    labels = np.full(signal.shape, BLANK, dtype=np.int64)
    starts = np.concatenate([[0], np.cumsum(dwell)[:-1]])
    labels[starts] = bases
    return SyntheticRead(
        reference="".join(BASES[b] for b in bases),
        signal=signal,
        frame_labels=labels,
    )


def generate_dataset(
    n_reads: int,
    read_length: int,
    noise_sigma: float,
    dwell_range: tuple[int, int],
    rng: RngStream,
    *,
    table: KmerTable,
) -> SyntheticDataset:
    """Generate reads whose signal follows the k-mer table plus Gaussian noise.

    Read ``r`` draws from ``rng.child(r)``, so any subset of a dataset can be
    regenerated independently.

    Args:
        n_reads: Number of reads.
        read_length: Bases per read, at least the table's k.
        noise_sigma: Std-dev of the additive signal noise.
        dwell_range: Inclusive frame range per base.
        rng: Dataset stream.
        table: Shared k-mer table.

    Raises:
        TaskConfigurationError: If the sizes or ranges are invalid.
    """
    low, high = dwell_range
    if read_length < table.k:
        raise TaskConfigurationError(
            issue=f"read_length={read_length} shorter than k={table.k}"
        )
    if n_reads < 1:
        raise TaskConfigurationError(issue=f"n_reads={n_reads} must be positive")
    if not 1 <= low <= high:
        raise TaskConfigurationError(issue=f"invalid dwell range {dwell_range}")
    if noise_sigma < 0.0:
        raise TaskConfigurationError(issue=f"noise_sigma={noise_sigma} is negative")

    reads = tuple(
        generate_read(read_length, noise_sigma, dwell_range, table, rng.child(r))
        for r in range(n_reads)
    )
    _log.info(
        "Generated %d reads of %d bases (sigma=%.3f, dwell=%s)",
        n_reads,
        read_length,
        noise_sigma,
        dwell_range,
    )
    return SyntheticDataset(
        reads=reads,
        meta={
            "read_length": read_length,
            "noise_sigma": noise_sigma,
            "dwell_range": list(dwell_range),
            "k": table.k,
        },
    )
