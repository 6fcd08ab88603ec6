from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

from cimcall.workflow.evaluate import EvaluateWorkflow
from cimcall.workflow.library import LibraryWorkflow
from cimcall.workflow.report import ReportWorkflow
from cimcall.workflow.sweep import SweepWorkflow
from cimcall.workflow.train import TrainWorkflow

if TYPE_CHECKING:
    from cimcall.config import RunConfig


def _out_dir(config: RunConfig) -> Path:
    return Path(config.output.directory)


def create_train_workflow(config: RunConfig) -> TrainWorkflow:
    """Configure a TrainWorkflow writing into the configured output directory."""
    return TrainWorkflow(config=config, out_dir=_out_dir(config))


def create_evaluate_workflow(
    config: RunConfig,
    checkpoint: Path | None = None,
) -> EvaluateWorkflow:
    return EvaluateWorkflow(
        config=config, out_dir=_out_dir(config), checkpoint=checkpoint
    )


def create_sweep_workflow(
    config: RunConfig,
    *,
    executor: str = "process",
    jobs: int = 1,
) -> SweepWorkflow:
    """Configure a SweepWorkflow on the named executor.

    ``jobs`` sizes the local process pool; Celery workers set their own
    concurrency.
    """
    from cimcall.evaluator import get_default_executor_factory

    factory = get_default_executor_factory()
    if executor == "process":
        instance = factory.create(executor, jobs=jobs)
    else:
        instance = factory.create(executor)
    return SweepWorkflow(config=config, out_dir=_out_dir(config), executor=instance)


def create_library_workflow(config: RunConfig) -> LibraryWorkflow:
    return LibraryWorkflow(config=config, out_dir=_out_dir(config))


def create_report_workflow(
    directory: Path, out_dir: Path | None = None
) -> ReportWorkflow:
    return ReportWorkflow(directory=directory, out_dir=out_dir)
