from __future__ import annotations

import importlib
from typing import Any

from cimcall.device.base import StateCurve, StateCurveFactory
from cimcall.device.exceptions import (
    DeviceConfigurationError,
    DeviceError,
    PreconditionError,
)
from cimcall.device.factory import DefaultStateCurveFactory
from cimcall.device.models import (
    ALL_NON_IDEALITIES,
    DeviceParams,
    NonIdeality,
    NonIdealityGroup,
    NonIdealityProfile,
    VariationMode,
    group_members,
)
from cimcall.device.rng import RngStream, StreamKind
from cimcall.device.transfer import (
    adc_dequantize,
    adc_transfer,
    apply_write_variation,
    conductance_quantize,
    conductance_read,
    dac_transfer,
    state_conductances,
    state_index,
)

importlib.import_module("cimcall.device.curves")

_state_curve_factory: StateCurveFactory | None = None


def get_default_state_curve_factory(*args: Any, **kwargs: Any) -> StateCurveFactory:
    global _state_curve_factory

    if _state_curve_factory is None:
        _state_curve_factory = DefaultStateCurveFactory(*args, **kwargs)

    return _state_curve_factory


__all__ = [
    "ALL_NON_IDEALITIES",
    "DefaultStateCurveFactory",
    "DeviceConfigurationError",
    "DeviceError",
    "DeviceParams",
    "NonIdeality",
    "NonIdealityGroup",
    "NonIdealityProfile",
    "PreconditionError",
    "RngStream",
    "StateCurve",
    "StateCurveFactory",
    "StreamKind",
    "VariationMode",
    "adc_dequantize",
    "adc_transfer",
    "apply_write_variation",
    "conductance_quantize",
    "conductance_read",
    "dac_transfer",
    "get_default_state_curve_factory",
    "group_members",
    "state_conductances",
    "state_index",
]
