from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Literal

import numpy as np

from cimcall.device import apply_write_variation
from cimcall.mapper.exceptions import MappingError
from cimcall.mapper.models import ProgrammedChip, ProgrammingStats

if TYPE_CHECKING:
    from cimcall.device import RngStream
    from cimcall.mapper.models import TilePlan
    from cimcall.nn import NetworkModel
    from cimcall.xbar import TileBlock, TileGroup, TileState

_log = logging.getLogger(__name__)

ProgrammingMode = Literal["one_shot", "verified"]


def cell_mask(mask: np.ndarray, group: TileGroup) -> np.ndarray:
    """Expand a per-weight mask to every slice and polarity column."""
    flags = np.asarray(mask, dtype=bool)
    return np.repeat(flags, group.layout.columns_per_output, axis=1)


class _TileWriter:
    """Programs one tile per call and accumulates statistics."""

    def __init__(
        self,
        rng: RngStream,
        mode: ProgrammingMode,
        tolerance: float,
        max_pulses: int,
    ) -> None:
        self.rng = rng
        self.mode = mode
        self.tolerance = tolerance
        self.max_pulses = max_pulses
        self.stats = ProgrammingStats(mode=mode)
        self.residuals: list[np.ndarray] = []

    def __call__(self, block: TileBlock) -> TileState:
        tile = block.tile
        stream = self.rng.child(tile.tile_id)
        if self.mode == "verified":
            from cimcall.mitigate.rvw import rvw_program

            programmed, pulses = rvw_program(
                tile, self.tolerance, self.max_pulses, stream
            )
            count = int(pulses.sum())
            missed = np.abs(programmed.programmed() - tile.targets) > self.tolerance
            self.stats.capped_cells += int(np.count_nonzero(missed))
        else:
            conductance = apply_write_variation(
                tile.targets,
                tile.profile.write_variation_rate,
                stream,
                tile.device,
            )
            programmed = tile.with_conductance(conductance)
            count = tile.targets.size

        self.stats.pulses += count
        self.stats.cells += tile.targets.size
        self.stats.per_tile_pulses[tile.tile_id] = count
        self.residuals.append(np.abs(programmed.programmed() - tile.targets).ravel())
        return programmed


def program_plan(
    plan: TilePlan,
    model: NetworkModel,
    rng: RngStream,
    *,
    mode: ProgrammingMode = "one_shot",
    tolerance: float | None = None,
    max_pulses: int = 20,
) -> ProgrammedChip:
    """Write every tile of a plan.

    One-shot mode draws a single write-variation sample per cell; verified
    mode runs the read-verify-write loop. Tile ``t`` programs from
    ``rng.child(t)``.

    Args:
        plan: Tile plan of ``model``.
        model: Quantised model supplying the weight scales.
        rng: Programming stream.
        mode: ``"one_shot"`` or ``"verified"``.
        tolerance: Verify tolerance in siemens; defaults to 1% of the window.
        max_pulses: Pulse cap per cell in verified mode.

    Returns:
        The programmed chip with its programming statistics.

    Raises:
        MappingError: If the plan does not match the model.
    """
    for mapping in plan:
        if mapping.name not in model.weight_scales:
            raise MappingError(
                issue="model has no scale for mapped matrix", layer=mapping.name
            )
        if mapping.weight_shape != model.params[mapping.name].shape:
            raise MappingError(issue="plan and model shapes differ", layer=mapping.name)

    writer = _TileWriter(
        rng=rng,
        mode=mode,
        tolerance=tolerance if tolerance is not None else 0.01 * plan.device.window,
        max_pulses=max_pulses,
    )
    groups: dict[str, TileGroup] = {}
    for mapping in plan:
        groups[mapping.name] = mapping.group.map_tiles(writer)

    stats, residuals = writer.stats, writer.residuals

    if residuals:
        flat = np.concatenate(residuals)
        stats.max_residual = float(flat.max())
        stats.mean_residual = float(flat.mean())
    if stats.capped_cells:
        _log.warning("%d cells hit the %d-pulse cap", stats.capped_cells, max_pulses)

    _log.info(
        "Programmed %d tiles (%s): %d pulses, max residual %.3e S",
        plan.tile_count,
        mode,
        stats.pulses,
        stats.max_residual,
    )
    return ProgrammedChip(
        plan=plan,
        groups=groups,
        scales={m.name: model.weight_scales[m.name] for m in plan},
        stats=stats,
    )
