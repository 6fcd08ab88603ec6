from __future__ import annotations

import importlib
from typing import Any

from cimcall.evaluator.accuracy import (
    characterise_chip,
    dataset_accuracy,
    evaluate_accuracy,
    read_accuracy,
)
from cimcall.evaluator.area import evaluate_area
from cimcall.evaluator.base import SweepExecutor, SweepExecutorFactory
from cimcall.evaluator.exceptions import (
    EmptyGridError,
    EvaluatorConfigurationError,
    EvaluatorError,
    SweepAxisError,
    SweepCellError,
)
from cimcall.evaluator.factory import DefaultSweepExecutorFactory
from cimcall.evaluator.models import (
    METRIC_COLUMNS,
    AccuracyStats,
    AreaConfig,
    AreaReport,
    EvalReport,
    ThroughputReport,
    TimingConfig,
)
from cimcall.evaluator.reports import (
    FIGURE_CSV,
    nonadditivity_table,
    read_manifest,
    render_csv,
    render_figures,
    reports_frame,
    write_csv,
    write_manifest,
)
from cimcall.evaluator.sweep import CASE_AXIS, SweepCell, expand_grid, run_sweep
from cimcall.evaluator.throughput import (
    evaluate_throughput,
    software_throughput,
    stage_latency,
    tile_latency,
)

importlib.import_module("cimcall.evaluator.executors")

_executor_factory: SweepExecutorFactory | None = None


def get_default_executor_factory(*args: Any, **kwargs: Any) -> SweepExecutorFactory:
    global _executor_factory
    if _executor_factory is None:
        _executor_factory = DefaultSweepExecutorFactory(*args, **kwargs)
    return _executor_factory


__all__ = [
    "CASE_AXIS",
    "FIGURE_CSV",
    "METRIC_COLUMNS",
    "AccuracyStats",
    "AreaConfig",
    "AreaReport",
    "DefaultSweepExecutorFactory",
    "EmptyGridError",
    "EvalReport",
    "EvaluatorConfigurationError",
    "EvaluatorError",
    "SweepAxisError",
    "SweepCell",
    "SweepCellError",
    "SweepExecutor",
    "SweepExecutorFactory",
    "ThroughputReport",
    "TimingConfig",
    "characterise_chip",
    "dataset_accuracy",
    "evaluate_accuracy",
    "evaluate_area",
    "evaluate_throughput",
    "expand_grid",
    "get_default_executor_factory",
    "nonadditivity_table",
    "read_accuracy",
    "read_manifest",
    "render_csv",
    "render_figures",
    "reports_frame",
    "run_sweep",
    "software_throughput",
    "stage_latency",
    "tile_latency",
    "write_csv",
    "write_manifest",
]
