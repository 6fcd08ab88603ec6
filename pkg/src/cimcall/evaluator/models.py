from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

_log = logging.getLogger(__name__)

# Defaults are illustrative, not measured hardware constants.


class TimingConfig(BaseModel):
    """Latency constants of the analytical throughput model."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    t_dac: float = Field(
        default=1e-9, gt=0.0, description="DAC settling per input cycle, s"
    )
    t_settle: float = Field(default=1e-8, gt=0.0, description="Crossbar settling, s")
    t_adc_per_conversion: float = Field(
        default=1e-9, gt=0.0, description="One ADC conversion, s"
    )
    adcs_per_tile: int = Field(
        default=8, ge=1, description="ADCs shared by a tile's columns"
    )
    t_digital_per_output: float = Field(
        default=1e-9,
        gt=0.0,
        description="Shift-add and activation per output column, s",
    )
    t_write_pulse: float = Field(
        default=1e-7, gt=0.0, description="One write or verify pulse, s"
    )
    t_sram_mac: float = Field(
        default=1e-9, gt=0.0, description="One SRAM multiply-accumulate, s"
    )
    rvw_refresh_period: int = Field(
        default=1000,
        ge=1,
        description="Frames between read-verify-write refreshes",
    )
    baseline_software_kbps: float = Field(
        default=1.0,
        gt=0.0,
        description="Software basecaller reference throughput, Kbp/s",
    )


class AreaConfig(BaseModel):
    """Component areas in square micrometres."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    cell_area: float = Field(default=0.01, ge=0.0)
    adc_area: float = Field(default=1500.0, ge=0.0)
    dac_area: float = Field(default=5.0, ge=0.0)
    driver_area: float = Field(default=200.0, ge=0.0)
    sram_area_per_bit: float = Field(default=0.15, ge=0.0)
    control_overhead_fraction: float = Field(default=0.05, ge=0.0)


@dataclass(frozen=True)
class AccuracyStats:
    """Read accuracy in percent over repeated programming runs."""

    runs: tuple[float, ...]

    @classmethod
    def from_runs(cls, runs: list[float] | tuple[float, ...]) -> AccuracyStats:
        return cls(runs=tuple(float(r) for r in runs))

    @property
    def mean(self) -> float:
        return float(np.mean(self.runs)) if self.runs else math.nan

    @property
    def std(self) -> float:
        return float(np.std(self.runs)) if self.runs else math.nan

    @property
    def min(self) -> float:
        return float(np.min(self.runs)) if self.runs else math.nan

    @property
    def max(self) -> float:
        return float(np.max(self.runs)) if self.runs else math.nan

    @property
    def median(self) -> float:
        return float(np.median(self.runs)) if self.runs else math.nan

    def to_manifest(self) -> dict[str, Any]:
        return {
            "mean": self.mean,
            "std": self.std,
            "min": self.min,
            "max": self.max,
            "median": self.median,
            "runs": list(self.runs),
        }


@dataclass(frozen=True)
class ThroughputReport:
    frames_per_second: float
    kbps: float
    speedup: float
    bottleneck: str
    stage_latencies: dict[str, float] = field(default_factory=dict)
    refresh_overhead: float = 0.0

    def to_manifest(self) -> dict[str, Any]:
        return {
            "frames_per_second": self.frames_per_second,
            "kbps": self.kbps,
            "speedup": self.speedup,
            "bottleneck": self.bottleneck,
            "stage_latencies": dict(self.stage_latencies),
            "refresh_overhead": self.refresh_overhead,
        }


@dataclass(frozen=True)
class AreaReport:
    crossbar: float = 0.0
    adc: float = 0.0
    dac: float = 0.0
    driver: float = 0.0
    sram: float = 0.0
    control: float = 0.0

    @property
    def subtotal(self) -> float:
        return self.crossbar + self.adc + self.dac + self.driver + self.sram

    @property
    def total(self) -> float:
        return self.subtotal + self.control

    def to_manifest(self) -> dict[str, Any]:
        return {
            "crossbar": self.crossbar,
            "adc": self.adc,
            "dac": self.dac,
            "driver": self.driver,
            "sram": self.sram,
            "control": self.control,
            "total": self.total,
        }


METRIC_COLUMNS: tuple[str, ...] = (
    "accuracy_mean",
    "accuracy_std",
    "accuracy_min",
    "accuracy_max",
    "accuracy_median",
    "runs",
    "throughput_kbps",
    "speedup",
    "area_um2",
    "sram_area_um2",
    "sram_weights",
    "programming_pulses",
    "retrain_epochs",
)


@dataclass(frozen=True)
class EvalReport:
    """Accuracy, throughput and area of one evaluated configuration.

    ``labels`` holds the swept values that identify the configuration and
    leads every CSV row; ``config`` echoes the fully resolved settings.
    """

    labels: dict[str, Any]
    accuracy: AccuracyStats
    throughput: ThroughputReport
    area: AreaReport
    config: dict[str, Any] = field(default_factory=dict)
    seeds: dict[str, int] = field(default_factory=dict)
    costs: dict[str, Any] = field(default_factory=dict)
    extras: dict[str, Any] = field(default_factory=dict)

    def to_row(self) -> dict[str, Any]:
        row = dict(self.labels)
        row.update(
            {
                "accuracy_mean": self.accuracy.mean,
                "accuracy_std": self.accuracy.std,
                "accuracy_min": self.accuracy.min,
                "accuracy_max": self.accuracy.max,
                "accuracy_median": self.accuracy.median,
                "runs": len(self.accuracy.runs),
                "throughput_kbps": self.throughput.kbps,
                "speedup": self.throughput.speedup,
                "area_um2": self.area.total,
                "sram_area_um2": self.area.sram,
                "sram_weights": int(self.costs.get("sram_weights", 0)),
                "programming_pulses": int(self.costs.get("programming_pulses", 0)),
                "retrain_epochs": int(self.costs.get("retrain_epochs", 0)),
            }
        )
        return row

    def to_manifest(self) -> dict[str, Any]:
        return {
            "labels": dict(self.labels),
            "accuracy": self.accuracy.to_manifest(),
            "throughput": self.throughput.to_manifest(),
            "area": self.area.to_manifest(),
            "config": self.config,
            "seeds": dict(self.seeds),
            "costs": dict(self.costs),
            "extras": dict(self.extras),
        }

    @classmethod
    def from_manifest(cls, data: dict[str, Any]) -> EvalReport:
        throughput = dict(data["throughput"])
        area = {k: v for k, v in data["area"].items() if k != "total"}
        return cls(
            labels=dict(data["labels"]),
            accuracy=AccuracyStats.from_runs(data["accuracy"]["runs"]),
            throughput=ThroughputReport(**throughput),
            area=AreaReport(**area),
            config=dict(data.get("config", {})),
            seeds=dict(data.get("seeds", {})),
            costs=dict(data.get("costs", {})),
            extras=dict(data.get("extras", {})),
        )
