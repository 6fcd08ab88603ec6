from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from cimcall.device import NonIdealityProfile
from cimcall.mapper.exceptions import MappingError, UnsupportedArraySizeError
from cimcall.mapper.models import LayerMapping, ScheduleModel, StageSchedule, TilePlan
from cimcall.nn import integer_weights
from cimcall.xbar import SliceLayout, SlicingConfigurationError, tile_matrix

if TYPE_CHECKING:
    from cimcall.device import DeviceParams
    from cimcall.nn import NetworkModel, QuantSpec

_log = logging.getLogger(__name__)

SUPPORTED_ARRAY_SIZES = (4, 8, 16, 32, 64, 128, 256, 512)

# VMM matrices in dataflow order with the matrix that feeds each one.
_STAGES = (
    ("conv.w", None),
    ("rec.wx", "conv.w"),
    ("rec.wh", "rec.wx"),
    ("out.w", "rec.wh"),
)


def _array_size(size: int | tuple[int, int]) -> tuple[int, int]:
    rows, cols = (size, size) if isinstance(size, int) else tuple(size)
    if rows != cols or rows not in SUPPORTED_ARRAY_SIZES:
        raise UnsupportedArraySizeError(size=size, supported=SUPPORTED_ARRAY_SIZES)
    return rows, cols


def map_matrix(
    name: str,
    w_int: np.ndarray,
    array_size: int | tuple[int, int],
    device: DeviceParams,
    spec: QuantSpec,
    profile: NonIdealityProfile | None = None,
    *,
    stage: int = 0,
    first_tile_id: int = 0,
) -> LayerMapping:
    """Bit-slice and tile a single integer weight matrix.

    Raises:
        UnsupportedArraySizeError: If the array size is not supported.
        MappingError: If the matrix is empty or cannot be sliced.
    """
    size = _array_size(array_size)
    w_int = np.asarray(w_int, dtype=np.int64)
    if w_int.ndim != 2 or 0 in w_int.shape:
        raise MappingError(issue="weight matrix has a zero dimension", layer=name)
    try:
        layout = SliceLayout(
            weight_bits=spec.weight_bits, bits_per_cell=device.bits_per_cell
        )
        group = tile_matrix(
            name,
            w_int,
            layout,
            size,
            device,
            profile or NonIdealityProfile(),
            first_tile_id=first_tile_id,
        )
    except SlicingConfigurationError as exc:
        raise MappingError(issue=exc.message, layer=name) from exc
    return LayerMapping(name=name, stage=stage, weight_shape=w_int.shape, group=group)


def partition_and_map(
    model: NetworkModel,
    array_size: int | tuple[int, int],
    device: DeviceParams,
    spec: QuantSpec,
    profile: NonIdealityProfile | None = None,
) -> TilePlan:
    """Tile every VMM weight matrix of a quantised model, layer by layer.

    Each matrix is bit-sliced into differential column pairs and cut into
    array-sized blocks in row-major order; tile ids are consecutive across
    layers and no tile is shared between matrices. Mapping draws no random
    numbers.

    Raises:
        UnsupportedArraySizeError: If the array size is not supported.
        MappingError: If the model is not quantised to ``spec`` or a weight
            matrix is empty.
    """
    size = _array_size(array_size)
    if spec.is_float:
        raise MappingError(issue="floating-point models cannot be mapped onto cells")
    if model.quant != spec:
        raise MappingError(
            issue=f"model quantized to {model.quant.label}, plan requested {spec.label}"
        )

    layers: list[LayerMapping] = []
    next_tile = 0
    for stage, (name, _) in enumerate(_STAGES):
        mapping = map_matrix(
            name,
            integer_weights(model, name),
            size,
            device,
            spec,
            profile,
            stage=stage,
            first_tile_id=next_tile,
        )
        next_tile += len(mapping.group)
        layers.append(mapping)

    plan = TilePlan(array_size=size, device=device, spec=spec, layers=tuple(layers))
    _log.info(
        "Mapped %d weights onto %d tiles of %dx%d (utilization %.3f)",
        plan.weight_count,
        plan.tile_count,
        *size,
        plan.utilization,
    )
    return plan


def build_schedule(plan: TilePlan) -> ScheduleModel:
    """Pipelined schedule: each matrix starts once its producer has output."""
    names = {m.name for m in plan}
    stages = tuple(
        StageSchedule(name=name, stage=index, depends_on=producer)
        for index, (name, producer) in enumerate(_STAGES)
        if name in names
    )
    return ScheduleModel(stages=stages)

