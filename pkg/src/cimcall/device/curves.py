from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING, override

import numpy as np

from cimcall.device.base import StateCurve
from cimcall.device.registry import register

if TYPE_CHECKING:
    from cimcall.device.models import DeviceParams

_log = logging.getLogger(__name__)


@register("linear")
class LinearCurve(StateCurve):
    """Conductance linear in the state index."""

    @override
    def conductance(self, state: np.ndarray, params: DeviceParams) -> np.ndarray:
        return params.g_hrs * (1.0 - state) + params.g_lrs * state


@register("nonlinear")
class ExponentialCurve(StateCurve):
    """Saturating exponential curve.

    The shape exponent is ``log10(n_max / n_min)``, so the default device
    (0.03 / 30) gives a curve that packs the upper states close to LRS.
    """

    @override
    def conductance(self, state: np.ndarray, params: DeviceParams) -> np.ndarray:
        nu = math.log10(params.nonlinearity_max / params.nonlinearity_min)
        shape = -np.expm1(-nu * state) / -math.expm1(-nu)
        return params.g_hrs * (1.0 - shape) + params.g_lrs * shape
