from __future__ import annotations

import numpy as np
import pytest

from cimcall.device import RngStream
from cimcall.taskgen import (
    BASES,
    KmerTable,
    TaskConfigurationError,
    collapse,
    dwell_times,
    generate_dataset,
    generate_read,
    greedy_decode,
    lookup_oracle,
)


@pytest.fixture
def table() -> KmerTable:
    return KmerTable.from_seed(0)


def test_table_is_seeded_and_bounded(table):
    again = KmerTable.from_seed(0)
    np.testing.assert_array_equal(table.levels, again.levels)
    assert table.levels.shape == (64,)
    assert np.all(np.abs(table.levels) <= 1.0)


def test_table_index_matches_vectorised_indices(table):
    bases = np.array([2, 0, 3, 1, 1])
    expected = [table.index(list(bases[: i + 1])) for i in range(len(bases))]
    np.testing.assert_array_equal(table.indices(bases), expected)


def test_repeated_bases_dwell_at_least_two():
    bases = np.array([0, 0, 1, 2, 2, 2, 3])
    dwell = dwell_times(bases, (1, 1), np.random.default_rng(0))
    np.testing.assert_array_equal(dwell, [2, 1, 1, 2, 2, 1, 1])


def test_noiseless_single_dwell_signal_is_table_levels(table):
    read = generate_read(12, 0.0, (1, 1), table, RngStream(seed=4))
    bases = np.array([BASES.index(b) for b in read.reference])
    levels = table.levels[table.indices(bases)]
    np.testing.assert_array_equal(np.unique(read.signal), np.unique(levels))


def test_labels_collapse_to_reference(table):
    dataset = generate_dataset(50, 30, 0.2, (1, 3), RngStream(seed=2), table=table)
    for read in dataset:
        assert collapse(read.frame_labels) == read.reference
        assert read.frames == len(read.frame_labels)


def test_reads_regenerate_independently(table):
    stream = RngStream(seed=8)
    dataset = generate_dataset(5, 20, 0.1, (2, 4), stream, table=table)
    alone = generate_read(20, 0.1, (2, 4), table, stream.child(3))
    assert dataset.reads[3].reference == alone.reference
    np.testing.assert_array_equal(dataset.reads[3].signal, alone.signal)


def test_lookup_oracle_recovers_noiseless_reads(table):
    dataset = generate_dataset(100, 25, 0.0, (1, 1), RngStream(seed=6), table=table)
    for read in dataset:
        assert greedy_decode(lookup_oracle(read.signal, table)) == read.reference


def test_base_composition_is_uniform(table):
    dataset = generate_dataset(2000, 50, 0.0, (1, 1), RngStream(seed=1), table=table)
    text = "".join(read.reference for read in dataset)
    for base in BASES:
        assert text.count(base) / len(text) == pytest.approx(0.25, abs=0.01)


def test_greedy_decode_collapses_runs():
    frames = np.eye(5)[[0, 0, 4, 0, 1]]
    assert greedy_decode(frames) == "AAC"
    assert greedy_decode(np.eye(5)[[4, 4, 4]]) == ""


@pytest.mark.parametrize(
    ("kwargs", "match"),
    [
        ({"read_length": 2}, "shorter"),
        ({"n_reads": 0}, "positive"),
        ({"dwell_range": (3, 2)}, "dwell"),
        ({"noise_sigma": -1.0}, "negative"),
    ],
)
def test_invalid_task_rejected(table, kwargs, match):
    args = {
        "n_reads": 2,
        "read_length": 10,
        "noise_sigma": 0.1,
        "dwell_range": (1, 2),
        "rng": RngStream(seed=0),
        "table": table,
    }
    with pytest.raises(TaskConfigurationError, match=match):
        generate_dataset(**(args | kwargs))
