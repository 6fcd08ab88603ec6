from __future__ import annotations

from cimcall.workflow.base import Workflow
from cimcall.workflow.bootstrap import (
    create_evaluate_workflow,
    create_library_workflow,
    create_report_workflow,
    create_sweep_workflow,
    create_train_workflow,
)
from cimcall.workflow.evaluate import EvaluateWorkflow
from cimcall.workflow.exceptions import (
    CheckpointMismatchError,
    SelfCheckError,
    WorkflowError,
)
from cimcall.workflow.library import LibraryWorkflow
from cimcall.workflow.pipeline import (
    build_datasets,
    cached_teacher,
    check_report,
    evaluate_config,
    train_teacher,
)
from cimcall.workflow.report import ReportWorkflow
from cimcall.workflow.sweep import CELL_TARGET, SweepWorkflow, evaluate_cell
from cimcall.workflow.train import TrainWorkflow

__all__ = [
    "CELL_TARGET",
    "CheckpointMismatchError",
    "EvaluateWorkflow",
    "LibraryWorkflow",
    "ReportWorkflow",
    "SelfCheckError",
    "SweepWorkflow",
    "TrainWorkflow",
    "Workflow",
    "WorkflowError",
    "build_datasets",
    "cached_teacher",
    "check_report",
    "create_evaluate_workflow",
    "create_library_workflow",
    "create_report_workflow",
    "create_sweep_workflow",
    "create_train_workflow",
    "evaluate_cell",
    "evaluate_config",
    "train_teacher",
]
