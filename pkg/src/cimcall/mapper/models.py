from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np

if TYPE_CHECKING:
    from cimcall.device import DeviceParams
    from cimcall.nn import QuantSpec
    from cimcall.xbar import SliceLayout, TileGroup

_log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LayerMapping:
    """Where one VMM weight matrix lives on the chip."""

    name: str
    stage: int
    weight_shape: tuple[int, int]
    group: TileGroup

    @property
    def layout(self) -> SliceLayout:
        return self.group.layout

    @property
    def tile_ids(self) -> list[int]:
        return [tile.tile_id for tile in self.group.tiles]

    @property
    def mapped_cells(self) -> int:
        rows, cols = self.weight_shape
        return rows * cols * self.layout.columns_per_output

    @property
    def utilization(self) -> float:
        rows, cols = self.group.array_size
        return self.mapped_cells / (len(self.group) * rows * cols)

    def blocks(self) -> list[dict[str, Any]]:
        layout = self.layout
        return [
            {
                "tile": block.tile.tile_id,
                "weight_rows": [block.row0, block.row1],
                "weight_cols": [
                    block.col0 // layout.columns_per_output,
                    -(-block.col1 // layout.columns_per_output),
                ],
                "logical_cols": [block.col0, block.col1],
            }
            for block in self.group
        ]


@dataclass(frozen=True)
class TilePlan:
    """Tile assignment of every VMM weight matrix; no tile is shared across layers."""

    array_size: tuple[int, int]
    device: DeviceParams
    spec: QuantSpec
    layers: tuple[LayerMapping, ...]

    def __iter__(self):
        return iter(self.layers)

    def layer(self, name: str) -> LayerMapping:
        for mapping in self.layers:
            if mapping.name == name:
                return mapping
        raise KeyError(name)

    @property
    def tile_count(self) -> int:
        return sum(len(m.group) for m in self.layers)

    @property
    def mapped_cells(self) -> int:
        return sum(m.mapped_cells for m in self.layers)

    @property
    def utilization(self) -> float:
        rows, cols = self.array_size
        return self.mapped_cells / (self.tile_count * rows * cols)

    @property
    def weight_count(self) -> int:
        return sum(int(np.prod(m.weight_shape)) for m in self.layers)

    def to_manifest(self) -> dict[str, Any]:
        return {
            "array_size": list(self.array_size),
            "quant": self.spec.label,
            "bits_per_cell": self.device.bits_per_cell,
            "tiles": self.tile_count,
            "utilization": self.utilization,
            "layers": [
                {
                    "name": m.name,
                    "stage": m.stage,
                    "weight_shape": list(m.weight_shape),
                    "slices": m.layout.slices,
                    "tiles": m.tile_ids,
                    "utilization": m.utilization,
                    "blocks": m.blocks(),
                }
                for m in self.layers
            ],
        }


@dataclass(frozen=True)
class StageSchedule:
    name: str
    stage: int
    depends_on: str | None


@dataclass(frozen=True)
class ScheduleModel:
    """Dataflow pipeline over the mapped VMMs.

    Each weight matrix is a pipeline stage that starts as soon as its producer
    has emitted its first output; all tiles may be active at once.
    """

    stages: tuple[StageSchedule, ...]
    all_tiles_concurrent: bool = True

    def start_times(self, latencies: dict[str, float]) -> dict[str, float]:
        """Earliest start of every stage given per-stage latencies."""
        starts: dict[str, float] = {}
        for stage in self.stages:
            if stage.depends_on is None:
                starts[stage.name] = 0.0
            else:
                producer = stage.depends_on
                starts[stage.name] = starts[producer] + latencies[producer]
        return starts

    def bottleneck(self, latencies: dict[str, float]) -> tuple[str, float]:
        name = max(self.stages, key=lambda s: latencies[s.name]).name
        return name, latencies[name]


@dataclass
class ProgrammingStats:
    """Outcome of writing a plan into tiles."""

    mode: str = "one_shot"
    cells: int = 0
    pulses: int = 0
    capped_cells: int = 0
    max_residual: float = 0.0
    mean_residual: float = 0.0
    per_tile_pulses: dict[int, int] = field(default_factory=dict)

    def to_manifest(self) -> dict[str, Any]:
        return {
            "mode": self.mode,
            "cells": self.cells,
            "pulses": self.pulses,
            "capped_cells": self.capped_cells,
            "max_residual": self.max_residual,
            "mean_residual": self.mean_residual,
        }


@dataclass(frozen=True)
class ProgrammedChip:
    """A plan whose tiles hold programmed conductances.

    ``masks`` flags, per weight matrix, the weights served from SRAM; their
    cells sit at HRS and the digital path takes their values from the model.
    """

    plan: TilePlan
    groups: dict[str, TileGroup]
    scales: dict[str, float]
    stats: ProgrammingStats
    masks: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def spec(self) -> QuantSpec:
        return self.plan.spec

    @property
    def masked_weights(self) -> int:
        return int(sum(np.count_nonzero(m) for m in self.masks.values()))

    def masked_per_layer(self) -> dict[str, int]:
        return {
            m.name: int(np.count_nonzero(self.masks.get(m.name, 0))) for m in self.plan
        }
