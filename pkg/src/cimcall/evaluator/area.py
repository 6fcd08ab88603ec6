from __future__ import annotations

import dataclasses
import logging
from typing import TYPE_CHECKING

from cimcall.evaluator.models import AreaReport

if TYPE_CHECKING:
    from cimcall.evaluator.models import AreaConfig
    from cimcall.mapper import TilePlan
    from cimcall.mitigate import RsaMask

_log = logging.getLogger(__name__)


def evaluate_area(
    plan: TilePlan | None,
    mask: RsaMask | None,
    area: AreaConfig,
    *,
    adcs_per_tile: int,
) -> AreaReport:
    """Chip area with its SRAM share.

    Each tile pays for its cells, ADCs, one DAC per row and a driver; SRAM
    holds every masked weight at full weight precision; control logic adds
    a fixed fraction of the rest. A model without a plan occupies no chip.
    """
    if plan is None:
        return AreaReport()

    rows, cols = plan.array_size
    tiles = plan.tile_count
    weight_bits = plan.spec.weight_bits
    masked = mask.count if mask is not None else 0

    report = AreaReport(
        crossbar=tiles * rows * cols * area.cell_area,
        adc=tiles * adcs_per_tile * area.adc_area,
        dac=tiles * rows * area.dac_area,
        driver=tiles * area.driver_area,
        sram=masked * weight_bits * area.sram_area_per_bit,
    )
    report = dataclasses.replace(
        report,
        control=area.control_overhead_fraction * report.subtotal,
    )
    _log.debug(
        "Area %.1f um^2 (SRAM %.1f um^2, %d tiles)", report.total, report.sram, tiles
    )
    return report
