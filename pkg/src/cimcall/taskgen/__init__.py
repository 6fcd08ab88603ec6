from __future__ import annotations

from cimcall.taskgen.align import global_align
from cimcall.taskgen.decode import decode_batch, greedy_decode, lookup_oracle
from cimcall.taskgen.exceptions import (
    DatasetFormatError,
    EmptySequenceError,
    TaskConfigurationError,
    TaskError,
)
from cimcall.taskgen.generator import dwell_times, generate_dataset, generate_read
from cimcall.taskgen.io import dump_dataset, load_dataset, parse_dataset, save_dataset
from cimcall.taskgen.kmer import DEFAULT_K, KmerTable
from cimcall.taskgen.models import (
    BASES,
    Alignment,
    SyntheticDataset,
    SyntheticRead,
    collapse,
    labels_to_text,
    text_to_labels,
)

__all__ = [
    "BASES",
    "DEFAULT_K",
    "Alignment",
    "DatasetFormatError",
    "EmptySequenceError",
    "KmerTable",
    "SyntheticDataset",
    "SyntheticRead",
    "TaskConfigurationError",
    "TaskError",
    "collapse",
    "decode_batch",
    "dump_dataset",
    "dwell_times",
    "generate_dataset",
    "generate_read",
    "global_align",
    "greedy_decode",
    "labels_to_text",
    "load_dataset",
    "lookup_oracle",
    "parse_dataset",
    "save_dataset",
    "text_to_labels",
]
