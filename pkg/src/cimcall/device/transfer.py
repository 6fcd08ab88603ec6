from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from cimcall.device.exceptions import PreconditionError

if TYPE_CHECKING:
    from cimcall.device.models import DeviceParams, NonIdealityProfile
    from cimcall.device.rng import RngStream

_log = logging.getLogger(__name__)

# Relative slack for targets that land on the window edges after float math.
_WINDOW_SLACK = 1e-9


def _check_in_window(g: np.ndarray, params: DeviceParams, operation: str) -> None:
    slack = _WINDOW_SLACK * params.g_lrs
    if g.size and (g.min() < params.g_hrs - slack or g.max() > params.g_lrs + slack):
        raise PreconditionError(
            issue=(
                f"conductance outside [{params.g_hrs}, {params.g_lrs}] "
                f"(min={g.min()}, max={g.max()})"
            ),
            operation=operation,
        )


def apply_write_variation(
    g_target: np.ndarray,
    rate: float,
    rng: RngStream,
    params: DeviceParams,
) -> np.ndarray:
    """Program conductances with multiplicative Gaussian write variation.

    Args:
        g_target: Target conductances within the device window.
        rate: Relative standard deviation of the programming error.
        rng: Stream supplying the per-cell draws.
        params: Device window used for validation and clamping.

    Returns:
        ``g_target * (1 + eps)`` clamped to ``[g_hrs, g_lrs]``.

    Raises:
        PreconditionError: If a target lies outside the window or rate is not
            within [0, 1].
    """
    g = np.asarray(g_target, dtype=np.float64)
    if not 0.0 <= rate <= 1.0:
        raise PreconditionError(
            issue=f"rate {rate} not in [0, 1]",
            operation="apply_write_variation",
        )
    _check_in_window(g, params, "apply_write_variation")

    if rate == 0.0:
        return g.copy()

    eps = rng.normal(rate, g.shape)
    return np.clip(g * (1.0 + eps), params.g_hrs, params.g_lrs)


def dac_transfer(v_ideal: np.ndarray, profile: NonIdealityProfile) -> np.ndarray:
    """Quantise input voltages to ``dac_bits`` levels, then apply gain and offset.

    Inputs beyond ``[0, dac_full_scale]`` saturate; saturation is logged, not
    raised.
    """
    v = np.asarray(v_ideal, dtype=np.float64)
    full_scale = profile.dac_full_scale
    levels = (1 << profile.dac_bits) - 1

    clipped = np.clip(v, 0.0, full_scale)
    saturated = int(np.count_nonzero(clipped != v))
    if saturated:
        _log.debug("DAC saturated %d of %d inputs", saturated, v.size)

    quantized = np.rint(clipped / full_scale * levels) / levels * full_scale
    return quantized * (1.0 + profile.dac_gain_error) + profile.dac_offset


def adc_transfer(
    i_analog: np.ndarray,
    full_scale: float,
    profile: NonIdealityProfile,
) -> np.ndarray:
    """Convert column currents into saturating integer codes.

    Currents whose sensed voltage ``i * sense_resistance`` falls below
    ``sense_vmin`` read as code 0.

    Raises:
        PreconditionError: If full_scale is not positive.
    """
    if full_scale <= 0.0:
        raise PreconditionError(
            issue=f"full_scale {full_scale} must be positive",
            operation="adc_transfer",
        )

    i = np.asarray(i_analog, dtype=np.float64)
    levels = (1 << profile.adc_bits) - 1

    codes = np.rint(i * (1.0 + profile.adc_ref_error) / full_scale * levels)
    codes = np.clip(codes, 0, levels).astype(np.int64)
    if profile.sense_vmin > 0.0:
        codes[i * profile.sense_resistance < profile.sense_vmin] = 0
    return codes


def adc_dequantize(
    codes: np.ndarray,
    full_scale: float,
    profile: NonIdealityProfile,
) -> np.ndarray:
    """Map ADC codes back to the nominal current they represent."""
    levels = (1 << profile.adc_bits) - 1
    return np.asarray(codes, dtype=np.float64) * (full_scale / levels)


def state_index(w_normalized: np.ndarray, params: DeviceParams) -> np.ndarray:
    """Snap normalised weights onto the nearest cell state index."""
    w = np.asarray(w_normalized, dtype=np.float64)
    if w.size and (w.min() < 0.0 or w.max() > 1.0):
        raise PreconditionError(
            issue=f"normalized weight outside [0, 1] (min={w.min()}, max={w.max()})",
            operation="conductance_quantize",
        )
    return np.rint(w * (params.levels_per_cell - 1)).astype(np.int64)


def conductance_quantize(w_normalized: np.ndarray, params: DeviceParams) -> np.ndarray:
    """Snap normalised weights to the nearest cell state and map it to conductance.

    Raises:
        PreconditionError: If any weight lies outside [0, 1].
    """
    from cimcall.device import get_default_state_curve_factory

    states = state_index(w_normalized, params)
    curve = get_default_state_curve_factory().create(params.curve)
    return curve.conductance(states / (params.levels_per_cell - 1), params)


def state_conductances(params: DeviceParams) -> np.ndarray:
    """Conductance of every state of the configured curve, ordered by state."""
    levels = np.arange(params.levels_per_cell) / (params.levels_per_cell - 1)
    return conductance_quantize(levels, params)


def conductance_read(g: np.ndarray, params: DeviceParams) -> np.ndarray:
    """Read conductances back as the nearest state index of the configured curve."""
    reference = state_conductances(params)
    g = np.asarray(g, dtype=np.float64)
    return np.abs(g[..., None] - reference).argmin(axis=-1).astype(np.int64)
