from __future__ import annotations

import dataclasses
import logging
from typing import TYPE_CHECKING, override

import numpy as np
from scipy.stats import norm

from cimcall.device import apply_write_variation
from cimcall.mitigate.base import Phase, Technique
from cimcall.mitigate.exceptions import MitigationConfigurationError
from cimcall.mitigate.models import MitigationTechnique
from cimcall.mitigate.registry import register

if TYPE_CHECKING:
    from cimcall.device import DeviceParams, RngStream
    from cimcall.mitigate.models import MitigationContext, MitigationRecipe
    from cimcall.xbar import TileState

_log = logging.getLogger(__name__)


def rvw_program(
    tile: TileState,
    tolerance: float,
    max_pulses: int,
    rng: RngStream,
) -> tuple[TileState, np.ndarray]:
    """Read-verify-write programming of one tile.

    Every cell is written, read and rewritten with a fresh variation draw
    until it lands within ``tolerance`` of its target or ``max_pulses`` is
    reached. The first pulse draws from ``rng`` itself, so it matches
    one-shot programming on the same stream; pulse ``p`` draws from
    ``rng.child(p)``. Cells left outside the tolerance are logged, not raised.

    Args:
        tile: Tile holding the target conductances.
        tolerance: Verify tolerance in siemens.
        max_pulses: Pulse cap per cell.
        rng: Programming stream of this tile.

    Returns:
        The programmed tile and the per-cell pulse counts.

    Raises:
        MitigationConfigurationError: If ``tolerance`` is not positive or
            ``max_pulses`` is below one.
    """
    if not tolerance > 0.0:
        raise MitigationConfigurationError(
            issue=f"tolerance {tolerance} must be positive",
            stage="rvw_program",
        )
    if max_pulses < 1:
        raise MitigationConfigurationError(
            issue=f"max_pulses={max_pulses} must be >= 1",
            stage="rvw_program",
        )

    rate = tile.profile.write_variation_rate
    targets = tile.targets
    g = apply_write_variation(targets, rate, rng, tile.device)
    pulses = np.ones(targets.shape, dtype=np.int64)
    pending = np.abs(g - targets) > tolerance

    for pulse in range(1, max_pulses):
        if not pending.any():
            break
        redraw = apply_write_variation(targets, rate, rng.child(pulse), tile.device)
        g = np.where(pending, redraw, g)
        pulses += pending
        pending &= np.abs(g - targets) > tolerance

    if pending.any():
        _log.debug(
            "Tile %d: %d cells outside tolerance after %d pulses",
            tile.tile_id,
            int(np.count_nonzero(pending)),
            max_pulses,
        )
    return tile.with_conductance(g), pulses


def hit_probability(
    target: np.ndarray | float,
    rate: float,
    tolerance: float,
    device: DeviceParams,
) -> np.ndarray:
    """Chance that a single write lands within ``tolerance`` of ``target``.

    Writes are clamped to the device window, so a target within
    ``tolerance`` of a window edge accepts every overshoot past that edge.
    """
    target = np.asarray(target, dtype=np.float64)
    if rate == 0.0:
        return np.ones_like(target)
    sigma = target * rate
    upper = np.where(target + tolerance >= device.g_lrs, np.inf, tolerance / sigma)
    lower = np.where(target - tolerance <= device.g_hrs, -np.inf, -tolerance / sigma)
    return norm.cdf(upper) - norm.cdf(lower)


def expected_pulses(
    target: np.ndarray | float,
    rate: float,
    tolerance: float,
    device: DeviceParams,
    max_pulses: int | None = None,
) -> np.ndarray:
    """Mean pulse count of the verify loop under a geometric model."""
    p = hit_probability(target, rate, tolerance, device)
    if max_pulses is None:
        return 1.0 / p
    return (1.0 - (1.0 - p) ** max_pulses) / p


@register(MitigationTechnique.RVW)
class ReadVerifyWrite(Technique):
    """Switches tile programming to the verified loop."""

    phase = Phase.PROGRAMMING

    @override
    def apply(
        self, context: MitigationContext, recipe: MitigationRecipe
    ) -> MitigationContext:
        return dataclasses.replace(context, programming_mode="verified")
