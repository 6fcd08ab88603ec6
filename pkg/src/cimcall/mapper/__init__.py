from __future__ import annotations

from cimcall.mapper.backend import TileBackend
from cimcall.mapper.exceptions import (
    MapperError,
    MappingError,
    UnprogrammedPlanError,
    UnsupportedArraySizeError,
)
from cimcall.mapper.models import (
    LayerMapping,
    ProgrammedChip,
    ProgrammingStats,
    ScheduleModel,
    StageSchedule,
    TilePlan,
)
from cimcall.mapper.partition import (
    SUPPORTED_ARRAY_SIZES,
    build_schedule,
    map_matrix,
    partition_and_map,
)
from cimcall.mapper.program import ProgrammingMode, cell_mask, program_plan
from cimcall.mapper.readback import (
    analog_group,
    effective_weights,
    read_back,
    read_group,
)
from cimcall.mapper.report import render_plan_report

__all__ = [
    "SUPPORTED_ARRAY_SIZES",
    "LayerMapping",
    "MapperError",
    "MappingError",
    "ProgrammedChip",
    "ProgrammingMode",
    "ProgrammingStats",
    "ScheduleModel",
    "StageSchedule",
    "TileBackend",
    "TilePlan",
    "UnprogrammedPlanError",
    "UnsupportedArraySizeError",
    "analog_group",
    "build_schedule",
    "cell_mask",
    "effective_weights",
    "map_matrix",
    "partition_and_map",
    "program_plan",
    "read_back",
    "read_group",
    "render_plan_report",
]
