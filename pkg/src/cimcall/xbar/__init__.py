from __future__ import annotations

import importlib
from typing import Any

from cimcall.xbar.base import VmmEngine, VmmEngineFactory
from cimcall.xbar.exceptions import (
    DimensionMismatchError,
    LibraryFormatError,
    LibraryMissError,
    SingularNetworkError,
    SlicingConfigurationError,
    UnprogrammedTileError,
    XbarConfigurationError,
    XbarError,
)
from cimcall.xbar.factory import DefaultVmmEngineFactory
from cimcall.xbar.library import (
    MeasurementLibrary,
    build_measurement_library,
    library_vmm,
    probe_input,
)
from cimcall.xbar.models import TileState, VmmResult
from cimcall.xbar.nodal import nodal_oracle_vmm
from cimcall.xbar.slicing import (
    SliceLayout,
    TileBlock,
    TileGroup,
    bit_sliced_vmm,
    input_cycles,
    tile_matrix,
)
from cimcall.xbar.vmm import (
    analytical_vmm,
    column_currents,
    ideal_quantized_vmm,
    ideal_vmm,
)
from cimcall.xbar.wires import wire_attenuation

importlib.import_module("cimcall.xbar.engines")

_vmm_engine_factory: VmmEngineFactory | None = None


def get_default_vmm_engine_factory(*args: Any, **kwargs: Any) -> VmmEngineFactory:
    global _vmm_engine_factory

    if _vmm_engine_factory is None:
        _vmm_engine_factory = DefaultVmmEngineFactory(*args, **kwargs)

    return _vmm_engine_factory


__all__ = [
    "DefaultVmmEngineFactory",
    "DimensionMismatchError",
    "LibraryFormatError",
    "LibraryMissError",
    "MeasurementLibrary",
    "SingularNetworkError",
    "SliceLayout",
    "SlicingConfigurationError",
    "TileBlock",
    "TileGroup",
    "TileState",
    "UnprogrammedTileError",
    "VmmEngine",
    "VmmEngineFactory",
    "VmmResult",
    "XbarConfigurationError",
    "XbarError",
    "analytical_vmm",
    "bit_sliced_vmm",
    "build_measurement_library",
    "column_currents",
    "get_default_vmm_engine_factory",
    "ideal_quantized_vmm",
    "ideal_vmm",
    "input_cycles",
    "library_vmm",
    "nodal_oracle_vmm",
    "probe_input",
    "tile_matrix",
    "wire_attenuation",
]
