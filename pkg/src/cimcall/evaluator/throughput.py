from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING

from cimcall.evaluator.exceptions import EvaluatorConfigurationError
from cimcall.evaluator.models import ThroughputReport
from cimcall.mapper import UnprogrammedPlanError, build_schedule
from cimcall.xbar import input_cycles

if TYPE_CHECKING:
    from cimcall.evaluator.models import TimingConfig
    from cimcall.mapper import LayerMapping, ProgrammedChip, ScheduleModel
    from cimcall.mitigate import CostLedger

_log = logging.getLogger(__name__)


def tile_latency(active_cols: int, cycles: int, timing: TimingConfig) -> float:
    """Time for one tile to turn an input vector into shift-added outputs."""
    conversions = math.ceil(active_cols / timing.adcs_per_tile)
    analog = timing.t_dac + timing.t_settle + conversions * timing.t_adc_per_conversion
    return cycles * analog + timing.t_digital_per_output * active_cols


def stage_latency(
    mapping: LayerMapping,
    cycles: int,
    timing: TimingConfig,
    masked_weights: int = 0,
) -> float:
    """Latency of one pipeline stage; its tiles run concurrently.

    Weights served from SRAM add one digital multiply-accumulate each.
    """
    slowest = max(
        tile_latency(t.active_cols, cycles, timing) for t in mapping.group.tiles
    )
    return slowest + timing.t_sram_mac * masked_weights


def software_throughput(timing: TimingConfig) -> ThroughputReport:
    """Throughput of a model left on the software baseline."""
    return ThroughputReport(
        frames_per_second=0.0,
        kbps=timing.baseline_software_kbps,
        speedup=1.0,
        bottleneck="software",
    )


def evaluate_throughput(
    chip: ProgrammedChip | None,
    timing: TimingConfig,
    frames_per_base: float,
    ledger: CostLedger | None = None,
    schedule: ScheduleModel | None = None,
) -> ThroughputReport:
    """Steady-state basecalling throughput of a programmed chip.

    Every weight matrix is a pipeline stage, so a frame leaves the pipeline
    once per bottleneck-stage latency. Read-verify-write refreshes
    reprogram the chip every ``rvw_refresh_period`` frames and are amortised
    over them.

    Args:
        chip: Programmed chip; masked weights add SRAM time to their stage.
        timing: Latency constants.
        frames_per_base: Mean signal frames per emitted base.
        ledger: Mitigation costs; refresh pulses come from here.
        schedule: Pipeline schedule; built from the plan when omitted.

    Returns:
        Frames per second, Kbp/s and speedup over the software baseline.

    Raises:
        UnprogrammedPlanError: If there is no programmed chip.
        EvaluatorConfigurationError: If ``frames_per_base`` is not positive.
    """
    if chip is None:
        raise UnprogrammedPlanError(operation="evaluate_throughput")
    if not frames_per_base > 0.0:
        raise EvaluatorConfigurationError(
            issue=f"frames_per_base={frames_per_base} must be positive",
            stage="evaluate_throughput",
        )

    schedule = schedule or build_schedule(chip.plan)
    profile = chip.plan.layers[0].group.tiles[0].profile
    cycles = input_cycles(chip.spec.activation_bits, profile.dac_bits)
    masked = chip.masked_per_layer()

    latencies = {
        mapping.name: stage_latency(
            mapping, cycles, timing, masked.get(mapping.name, 0)
        )
        for mapping in chip.plan
    }
    bottleneck, latency = schedule.bottleneck(latencies)

    refresh = 0.0
    if ledger is not None and ledger.refresh_pulses:
        pulses_time = ledger.refresh_pulses * timing.t_write_pulse
        refresh = pulses_time / timing.rvw_refresh_period

    frames_per_second = 1.0 / (latency + refresh)
    kbps = frames_per_second / frames_per_base / 1e3
    report = ThroughputReport(
        frames_per_second=frames_per_second,
        kbps=kbps,
        speedup=kbps / timing.baseline_software_kbps,
        bottleneck=bottleneck,
        stage_latencies=latencies,
        refresh_overhead=refresh,
    )
    _log.info(
        "Throughput %.3f Kbp/s (bottleneck %s, %.3e s/frame, refresh %.3e s/frame)",
        kbps,
        bottleneck,
        latency,
        refresh,
    )
    return report
