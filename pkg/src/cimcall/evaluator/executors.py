from __future__ import annotations

import importlib
import logging
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from typing import Any, override

from cimcall.evaluator.base import SweepExecutor
from cimcall.evaluator.exceptions import EvaluatorConfigurationError, SweepCellError
from cimcall.evaluator.registry import register

_log = logging.getLogger(__name__)


def resolve_target(target: str):
    module_name, _, attr = target.partition(":")
    if not module_name or not attr:
        raise EvaluatorConfigurationError(
            issue=f"target '{target}' is not of the form 'module:function'",
            stage="executor_target",
        )
    return getattr(importlib.import_module(module_name), attr)


def run_target(target: str, payload: dict[str, Any]) -> dict[str, Any]:
    """Run one cell and capture failures as data.

    Package exceptions do not survive pickling across processes, so errors
    travel back as ``{"error": ..., "type": ...}``.
    """
    try:
        return {"result": resolve_target(target)(payload)}
    except Exception as exc:
        _log.exception("Sweep cell %s failed", payload.get("index"))
        return {"error": str(exc), "type": type(exc).__name__}


def _unwrap(index: int, outcome: dict[str, Any]) -> dict[str, Any]:
    if "error" in outcome:
        raise SweepCellError(index, f"{outcome['type']}: {outcome['error']}")
    return outcome["result"]


@register("process")
class ProcessExecutor(SweepExecutor):
    """Local process pool; ``jobs=1`` runs every cell in this process."""

    def __init__(self, *args: Any, jobs: int = 1, **kwargs: Any) -> None:
        super().__init__(*args, jobs=jobs, **kwargs)
        if jobs < 1:
            raise EvaluatorConfigurationError(
                issue=f"jobs={jobs} must be >= 1", stage="process_executor"
            )
        self.jobs = jobs

    @override
    def map(self, target: str, payloads: list[dict[str, Any]]) -> list[dict[str, Any]]:
        if self.jobs == 1 or len(payloads) <= 1:
            outcomes = [run_target(target, p) for p in payloads]
        else:
            context = multiprocessing.get_context("spawn")
            with ProcessPoolExecutor(
                max_workers=self.jobs, mp_context=context
            ) as pool:
                outcomes = list(
                    pool.map(run_target, [target] * len(payloads), payloads)
                )
        return [_unwrap(i, o) for i, o in enumerate(outcomes)]


@register("celery")
class CeleryExecutor(SweepExecutor):
    """Dispatches cells to Celery workers and gathers them in order."""

    def __init__(self, *args: Any, timeout: float | None = None, **kwargs: Any) -> None:
        super().__init__(*args, timeout=timeout, **kwargs)
        self.timeout = timeout

    @override
    def map(self, target: str, payloads: list[dict[str, Any]]) -> list[dict[str, Any]]:
        from celery import group

        from cimcall.worker.tasks import run_cell

        _log.info("Dispatching %d sweep cells to Celery", len(payloads))
        result = group(run_cell.s(target, p) for p in payloads).apply_async()
        outcomes = result.get(timeout=self.timeout)
        return [_unwrap(i, o) for i, o in enumerate(outcomes)]
