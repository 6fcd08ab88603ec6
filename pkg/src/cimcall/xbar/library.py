from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from cimcall.device import apply_write_variation
from cimcall.xbar.exceptions import (
    LibraryFormatError,
    LibraryMissError,
    XbarConfigurationError,
)
from cimcall.xbar.models import VmmResult
from cimcall.xbar.vmm import analytical_vmm, ideal_quantized_vmm

if TYPE_CHECKING:
    from cimcall.device import RngStream
    from cimcall.xbar.models import TileState

_log = logging.getLogger(__name__)

MAGIC = b"CIMLIB\x00\x01"
VERSION = 1
DEFAULT_MIN_SAMPLES = 10_000

_HEADER = struct.Struct("<8sHIII")
_ENTRY = struct.Struct("<32sI")


@dataclass
class MeasurementLibrary:
    """Stored output deviations of programmed tiles of one array size.

    Each entry maps a tile fingerprint to a ``(count, cols)`` array of
    ``measured - ideal`` column values in amps.
    """

    rows: int
    cols: int
    entries: dict[str, np.ndarray] = field(default_factory=dict)
    min_samples: int = DEFAULT_MIN_SAMPLES

    def add(self, fingerprint: str, deviations: np.ndarray) -> None:
        deviations = np.asarray(deviations, dtype=np.float64)
        if deviations.ndim != 2 or deviations.shape[1] != self.cols:
            raise XbarConfigurationError(
                issue=f"deviation block {deviations.shape} does not match "
                f"{self.cols} columns",
                stage="library_add",
            )
        if deviations.shape[0] < self.min_samples:
            raise XbarConfigurationError(
                issue=f"{deviations.shape[0]} samples below minimum {self.min_samples}",
                stage="library_add",
            )
        self.entries[fingerprint] = deviations

    def deviations(self, fingerprint: str) -> np.ndarray:
        try:
            return self.entries[fingerprint]
        except KeyError:
            raise LibraryMissError(fingerprint) from None

    def __contains__(self, fingerprint: object) -> bool:
        return fingerprint in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def column_variance(self, fingerprint: str) -> np.ndarray:
        return self.deviations(fingerprint).var(axis=0)

    def merge(self, other: MeasurementLibrary) -> None:
        if (other.rows, other.cols) != (self.rows, self.cols):
            raise XbarConfigurationError(
                issue="cannot merge libraries of different array sizes",
                stage="library_merge",
            )
        self.entries.update(other.entries)

    def save(self, path: Path) -> None:
        """Write the documented little-endian binary layout."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as fh:
            fh.write(_HEADER.pack(MAGIC, VERSION, self.rows, self.cols, len(self)))
            for fingerprint in sorted(self.entries):
                block = self.entries[fingerprint]
                fh.write(_ENTRY.pack(bytes.fromhex(fingerprint), block.shape[0]))
                fh.write(np.ascontiguousarray(block, dtype="<f8").tobytes())
        _log.info("Saved measurement library with %d entries to %s", len(self), path)

    @classmethod
    def load(
        cls, path: Path, min_samples: int = DEFAULT_MIN_SAMPLES
    ) -> MeasurementLibrary:
        path = Path(path)
        data = path.read_bytes()
        if len(data) < _HEADER.size:
            raise LibraryFormatError(issue="truncated header", path=str(path))

        magic, version, rows, cols, count = _HEADER.unpack_from(data, 0)
        if magic != MAGIC:
            raise LibraryFormatError(issue=f"bad magic {magic!r}", path=str(path))
        if version != VERSION:
            raise LibraryFormatError(
                issue=f"unsupported version {version}", path=str(path)
            )

        library = cls(rows=rows, cols=cols, min_samples=min_samples)
        offset = _HEADER.size
        for _ in range(count):
            if offset + _ENTRY.size > len(data):
                raise LibraryFormatError(issue="truncated entry header", path=str(path))
            digest, n_vectors = _ENTRY.unpack_from(data, offset)
            offset += _ENTRY.size
            n_bytes = n_vectors * cols * 8
            if offset + n_bytes > len(data):
                raise LibraryFormatError(issue="truncated entry body", path=str(path))
            block = np.frombuffer(
                data, dtype="<f8", count=n_vectors * cols, offset=offset
            )
            entry = block.reshape(n_vectors, cols).astype(np.float64)
            library.entries[digest.hex()] = entry
            offset += n_bytes

        _log.info("Loaded measurement library with %d entries from %s", count, path)
        return library


def probe_input(tile: TileState) -> np.ndarray:
    """Full-scale voltage on every active row."""
    return np.full(tile.active_rows, tile.profile.dac_full_scale)


def build_measurement_library(
    tile: TileState,
    samples: int,
    rng: RngStream,
    *,
    library: MeasurementLibrary | None = None,
    min_samples: int = DEFAULT_MIN_SAMPLES,
) -> MeasurementLibrary:
    """Characterise a tile by re-programming and measuring it ``samples`` times.

    Each sample draws fresh write variation, runs the analytical pipeline on
    the full-scale probe input and stores the deviation from the noise-free
    quantised result.

    Raises:
        XbarConfigurationError: If ``samples`` is below ``min_samples``.
    """
    if samples < min_samples:
        raise XbarConfigurationError(
            issue=f"samples={samples} below minimum {min_samples}",
            stage="library_build",
        )
    if library is None:
        library = MeasurementLibrary(
            rows=tile.rows, cols=tile.cols, min_samples=min_samples
        )

    x = probe_input(tile)
    reference = ideal_quantized_vmm(x, tile).values
    rate = tile.profile.write_variation_rate

    deviations = np.empty((samples, tile.active_cols), dtype=np.float64)
    for index in range(samples):
        stream = rng.child(index)
        conductance = apply_write_variation(
            tile.targets, rate, stream.child(0), tile.device
        )
        measured = analytical_vmm(
            x, tile.with_conductance(conductance), stream.child(1)
        )
        deviations[index] = measured.values - reference

    full = np.zeros((samples, tile.cols), dtype=np.float64)
    full[:, : tile.active_cols] = deviations
    library.add(tile.fingerprint, full)
    _log.info(
        "Characterised tile %s with %d samples (mean |dev|=%.3e A)",
        tile.fingerprint[:12],
        samples,
        float(np.abs(deviations).mean()) if deviations.size else 0.0,
    )
    return library


def library_vmm(
    x: np.ndarray,
    lib: MeasurementLibrary,
    tile: TileState,
    rng: RngStream,
) -> VmmResult:
    """Noise-free quantised VMM plus one uniformly drawn stored deviation per input.

    Raises:
        LibraryMissError: If the tile's fingerprint is not in the library.
    """
    deviations = lib.deviations(tile.fingerprint)[:, : tile.active_cols]
    ideal = ideal_quantized_vmm(x, tile)

    batch = ideal.values.shape[:-1]
    picks = rng.generator().integers(0, deviations.shape[0], size=batch)
    values = ideal.values + deviations[picks]

    profile = tile.profile.ideal()
    full_scale = tile.full_scale_current
    levels = (1 << profile.adc_bits) - 1
    codes = np.clip(np.rint(values / full_scale * levels), 0, levels).astype(np.int64)
    return VmmResult(
        codes=codes,
        values=values,
        currents=ideal.currents,
        saturated=int(np.count_nonzero(codes == levels)),
    )
