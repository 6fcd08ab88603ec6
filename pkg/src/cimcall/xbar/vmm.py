from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from cimcall.device import adc_dequantize, adc_transfer, dac_transfer
from cimcall.xbar.exceptions import DimensionMismatchError
from cimcall.xbar.models import VmmResult

if TYPE_CHECKING:
    from cimcall.device import NonIdealityProfile, RngStream
    from cimcall.xbar.models import TileState

_log = logging.getLogger(__name__)


def ideal_vmm(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Exact product ``x @ w`` accumulated row by row in input order.

    Accepts a single vector or a batch of row vectors.

    Raises:
        DimensionMismatchError: If ``x`` and ``w`` disagree on the row count.
    """
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or x.shape[-1] != w.shape[0]:
        raise DimensionMismatchError(
            expected=w.shape[0] if w.ndim == 2 else -1,
            actual=x.shape[-1],
            operation="ideal_vmm",
        )

    acc = np.zeros((*x.shape[:-1], w.shape[1]), dtype=np.float64)
    for row in range(w.shape[0]):
        acc += x[..., row, None] * w[row]
    return acc


def pad_rows(x: np.ndarray, tile: TileState, operation: str) -> np.ndarray:
    """Zero-extend an input over the tile's undriven rows."""
    x = np.asarray(x, dtype=np.float64)
    width = x.shape[-1]
    if width == tile.rows:
        return x
    if width != tile.active_rows:
        raise DimensionMismatchError(
            expected=tile.active_rows,
            actual=width,
            operation=operation,
        )
    padded = np.zeros((*x.shape[:-1], tile.rows), dtype=np.float64)
    padded[..., :width] = x
    return padded


def drive_rows(
    x: np.ndarray, tile: TileState, profile: NonIdealityProfile
) -> np.ndarray:
    """Row voltages after the DAC; undriven rows stay at 0 V."""
    x = pad_rows(x, tile, "drive_rows")
    volts = np.zeros_like(x)
    volts[..., : tile.active_rows] = dac_transfer(x[..., : tile.active_rows], profile)
    return volts


def column_currents(
    volts: np.ndarray,
    tile: TileState,
    rng: RngStream | None = None,
) -> np.ndarray:
    """Analog column currents for given row voltages through the fast wire model."""
    volts = pad_rows(volts, tile, "column_currents")
    g_eff = tile.effective_conductance()
    currents = volts @ g_eff

    noise_rate = tile.profile.effective().read_noise_rate
    if noise_rate > 0.0 and rng is not None:
        spread = noise_rate * np.sqrt(np.square(volts) @ np.square(g_eff))
        currents = currents + rng.generator().normal(size=currents.shape) * spread
    return currents


def convert(
    currents: np.ndarray,
    tile: TileState,
    profile: NonIdealityProfile,
) -> VmmResult:
    """Run column currents through the ADC and collect telemetry."""
    full_scale = tile.full_scale_current
    codes = adc_transfer(currents, full_scale, profile)
    levels = (1 << profile.adc_bits) - 1

    saturated = int(np.count_nonzero(codes == levels))
    dead_zone = 0
    if profile.sense_vmin > 0.0:
        sensed = currents * profile.sense_resistance
        lost = (sensed < profile.sense_vmin) & (currents > 0)
        dead_zone = int(np.count_nonzero(lost))

    return VmmResult(
        codes=codes[..., : tile.active_cols],
        values=adc_dequantize(codes, full_scale, profile)[..., : tile.active_cols],
        currents=currents[..., : tile.active_cols],
        saturated=saturated,
        dead_zone=dead_zone,
    )


def analytical_vmm(
    x: np.ndarray,
    tile: TileState,
    rng: RngStream | None = None,
) -> VmmResult:
    """Non-ideal VMM: DAC, wire-attenuated current summation, then ADC.

    Args:
        x: Row input voltages already on the DAC grid, shape ``(..., rows)`` or
            ``(..., active_rows)``.
        tile: Programmed tile.
        rng: Stream for per-read noise; unused when read noise is disabled.

    Returns:
        Codes and dequantised currents for the tile's active columns.

    Raises:
        DimensionMismatchError: If the input width does not fit the tile.
        UnprogrammedTileError: If the tile has not been programmed.
    """
    profile = tile.profile.effective()
    volts = drive_rows(x, tile, profile)
    currents = column_currents(volts, tile, rng)
    return convert(currents, tile, profile)


def ideal_quantized_vmm(x: np.ndarray, tile: TileState) -> VmmResult:
    """Noise-free reference through the same DAC/ADC constraints."""
    profile = tile.profile.ideal()
    volts = drive_rows(x, tile, profile)
    currents = volts @ tile.targets
    return convert(currents, tile, profile)
