from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from cimcall.taskgen.exceptions import DatasetFormatError
from cimcall.taskgen.models import (
    BASES,
    SyntheticDataset,
    SyntheticRead,
    labels_to_text,
    text_to_labels,
)

_log = logging.getLogger(__name__)

HEADER = "# cimcall-dataset v1"


def dump_dataset(dataset: SyntheticDataset) -> str:
    """Plain-text form: a header, then reference, signal and label lines per read.

    Signals are comma-separated ``repr`` floats so they reload exactly; labels
    use ``-`` for blank frames.
    """
    lines = [f"{HEADER} reads={len(dataset)}"]
    for read in dataset:
        lines.append(read.reference)
        lines.append(",".join(repr(float(v)) for v in read.signal))
        lines.append(labels_to_text(read.frame_labels))
    return "\n".join(lines) + "\n"


def parse_dataset(text: str) -> SyntheticDataset:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(HEADER):
        raise DatasetFormatError(issue="missing header", line=1)

    body = [line for line in lines[1:] if line.strip()]
    if len(body) % 3:
        raise DatasetFormatError(issue="record is not three lines", line=len(lines))

    reads: list[SyntheticRead] = []
    for index in range(0, len(body), 3):
        reference, signal_line, label_line = body[index : index + 3]
        line_no = index + 2
        if not reference or any(c not in BASES for c in reference):
            raise DatasetFormatError(issue="invalid reference", line=line_no)
        try:
            signal = np.array([float(v) for v in signal_line.split(",")])
            labels = text_to_labels(label_line)
        except ValueError as exc:
            raise DatasetFormatError(issue=str(exc), line=line_no + 1) from exc
        if len(signal) != len(labels):
            raise DatasetFormatError(
                issue="signal and label lengths differ", line=line_no + 2
            )
        reads.append(
            SyntheticRead(reference=reference, signal=signal, frame_labels=labels)
        )

    return SyntheticDataset(reads=tuple(reads))


def save_dataset(dataset: SyntheticDataset, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_dataset(dataset))
    _log.info("Wrote %d reads to %s", len(dataset), path)
    return path


def load_dataset(path: Path) -> SyntheticDataset:
    return parse_dataset(Path(path).read_text())
