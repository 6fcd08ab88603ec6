from __future__ import annotations

import copy
import dataclasses
import logging
from typing import TYPE_CHECKING

import numpy as np

from cimcall.device import StreamKind
from cimcall.evaluator.exceptions import EvaluatorConfigurationError
from cimcall.evaluator.models import AccuracyStats
from cimcall.mapper import TileBackend
from cimcall.mitigate import deploy_recipe
from cimcall.nn import forward
from cimcall.taskgen import EmptySequenceError, decode_batch, global_align
from cimcall.xbar import build_measurement_library

if TYPE_CHECKING:
    from cimcall.device import RngStream
    from cimcall.mapper import ProgrammedChip
    from cimcall.mitigate import MitigationContext, MitigationRecipe
    from cimcall.nn import NetworkModel, VmmBackend
    from cimcall.taskgen import SyntheticDataset
    from cimcall.xbar import MeasurementLibrary, VmmEngine

_log = logging.getLogger(__name__)

CHUNK_READS = 64


def read_accuracy(decoded: str, reference: str) -> float:
    """Percentage of aligned positions where both reads carry the same base.

    Raises:
        EmptySequenceError: If either read is empty.
    """
    if not decoded or not reference:
        raise EmptySequenceError(operation="read_accuracy")
    alignment = global_align(decoded, reference)
    return 100.0 * alignment.matches / alignment.alignment_length


def dataset_accuracy(
    model: NetworkModel,
    dataset: SyntheticDataset,
    backend: VmmBackend | None = None,
) -> float:
    """Mean read accuracy of ``model`` over ``dataset``.

    Reads are run in fixed chunks of ``CHUNK_READS`` so a stateful backend
    sees the same call sequence on every run. A read decoded to nothing
    scores zero.
    """
    batch = dataset.to_batch(min_frames=model.receptive_field)
    scores: list[float] = []
    for start in range(0, len(batch), CHUNK_READS):
        chunk = batch.take(np.arange(start, min(start + CHUNK_READS, len(batch))))
        decoded = decode_batch(forward(model, chunk.signals, backend), chunk.lengths)
        for text, read in zip(decoded, dataset.reads[start:], strict=False):
            scores.append(read_accuracy(text, read.reference) if text else 0.0)
    return float(np.mean(scores)) if scores else 0.0


def library_stream(rng: RngStream, fingerprint: str) -> RngStream:
    """Characterisation stream of a tile, fixed by its programmed pattern."""
    return rng.child(StreamKind.LIBRARY, int(fingerprint[:15], 16))


def characterise_chip(
    chip: ProgrammedChip,
    library: MeasurementLibrary,
    samples: int,
    rng: RngStream,
) -> int:
    """Add library entries for every tile of ``chip`` not yet characterised.

    Returns:
        The number of tiles characterised.
    """
    added = 0
    for group in chip.groups.values():
        for tile in group.tiles:
            if tile.fingerprint in library:
                continue
            build_measurement_library(
                tile,
                samples,
                library_stream(rng, tile.fingerprint),
                library=library,
                min_samples=library.min_samples,
            )
            added += 1
    if added:
        _log.info(
            "Characterised %d new tiles (library now %d entries)",
            added,
            len(library),
        )
    return added


def evaluate_accuracy(
    context: MitigationContext,
    recipe: MitigationRecipe,
    dataset: SyntheticDataset,
    runs: int,
    rng: RngStream,
    *,
    engine: VmmEngine,
    library_samples: int | None = None,
) -> tuple[AccuracyStats, MitigationContext]:
    """Read accuracy over repeated programming of a prepared model.

    Run ``r`` derives every stream from ``rng.child(RUN, r)``: it programs a
    fresh chip (or reuses the fixed device draw when the profile's variation
    mode is ``device``), applies the recipe's programming and online
    techniques and infers through the tiles. Floating-point models run on
    the exact backend.

    Args:
        context: Context whose offline techniques have already run.
        recipe: Recipe whose deploy phase runs per programming.
        dataset: Evaluation reads.
        runs: Number of programming runs, at least one.
        rng: Evaluation root stream.
        engine: Tile VMM engine.
        library_samples: Characterise missing tiles into the engine's
            library with this many samples before inference.

    Returns:
        Accuracy statistics and the deployed context of the first run.

    Raises:
        EvaluatorConfigurationError: If ``runs`` is below one.
    """
    if runs < 1:
        raise EvaluatorConfigurationError(
            issue=f"runs={runs} must be >= 1", stage="evaluate_accuracy"
        )

    if context.spec.is_float:
        score = dataset_accuracy(context.model, dataset)
        return AccuracyStats.from_runs([score] * runs), context

    fixed_device = context.profile.variation_mode == "device"
    scores: list[float] = []
    first: MitigationContext | None = None
    for r in range(runs):
        run = rng.child(StreamKind.RUN, r)
        program_rng = (rng if fixed_device else run).child(StreamKind.PROGRAM)
        deployed = deploy_recipe(
            recipe,
            dataclasses.replace(
                context,
                rng=run.child(StreamKind.MITIGATION),
                program_rng=program_rng,
                ledger=copy.deepcopy(context.ledger),
                plan=None,
                chip=None,
                mask=None,
            ),
        )
        chip = deployed.chip
        library = getattr(engine, "library", None)
        if library is not None and library_samples is not None:
            characterise_chip(chip, library, library_samples, rng)

        backend = TileBackend(chip, engine, run.child(StreamKind.INFERENCE))
        score = dataset_accuracy(deployed.model, dataset, backend)
        scores.append(score)
        _log.debug("Run %d/%d accuracy %.3f%%", r + 1, runs, score)
        if first is None:
            first = deployed

    stats = AccuracyStats.from_runs(scores)
    _log.info(
        "Accuracy over %d runs: mean %.3f%%, std %.3f",
        runs,
        stats.mean,
        stats.std,
    )
    return stats, first
