from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any, override

from cimcall.config import apply_overrides, build_config, has_key
from cimcall.evaluator import (
    expand_grid,
    nonadditivity_table,
    reports_frame,
    run_sweep,
    write_csv,
)
from cimcall.workflow.base import Workflow
from cimcall.workflow.pipeline import evaluate_config

if TYPE_CHECKING:
    from pathlib import Path

    from cimcall.config import RunConfig
    from cimcall.evaluator import EvalReport, SweepExecutor

_log = logging.getLogger(__name__)

CELL_TARGET = "cimcall.workflow.sweep:evaluate_cell"
DEFAULT_CSV = "sweep.csv"
NONADDITIVITY_CSV = "nonadditivity.csv"


def evaluate_cell(payload: dict[str, Any]) -> dict[str, Any]:
    """Evaluate one sweep cell and return its report manifest.

    Runs in whatever process the executor picked, so everything it needs
    travels in ``payload``.
    """
    config = build_config(apply_overrides(payload["base"], payload["overrides"]))
    return evaluate_config(config, labels=payload["labels"]).to_manifest()


class SweepWorkflow(Workflow):
    """Run the configured grid and write its table, CSVs and manifest."""

    command = "sweep"

    def __init__(
        self,
        *,
        config: RunConfig,
        out_dir: Path,
        executor: SweepExecutor,
        target: str = CELL_TARGET,
        **kwargs: Any,
    ) -> None:
        kwargs.update(
            {
                "executor": type(executor).__name__,
                "output": config.sweep.output,
            }
        )
        super().__init__(config=config, out_dir=out_dir, **kwargs)
        self._executor = executor
        self._target = target

    @override
    def run(self) -> list[EvalReport]:
        _log.info("Starting sweep workflow")

        sweep = self._config.sweep
        cells = expand_grid(sweep.axes, sweep.cases, check_axis=has_key)
        try:
            reports = run_sweep(
                cells,
                self._config.dump(),
                target=self._target,
                executor=self._executor,
            )
        except Exception:
            _log.exception("Sweep workflow failed")
            raise

        artifacts = self._write_tables(reports)
        self.manifest(
            artifacts,
            cells=len(cells),
            reports=[report.to_manifest() for report in reports],
        )
        _log.info("Sweep workflow completed with %d cells", len(cells))
        return reports

    def _write_tables(self, reports: list[EvalReport]) -> list[str]:
        name = self._config.sweep.output or DEFAULT_CSV
        written = [write_csv(reports_frame(reports), self.artifact(name)).name]
        if self._config.sweep.nonadditivity:
            table = nonadditivity_table(reports)
            written.append(write_csv(table, self.artifact(NONADDITIVITY_CSV)).name)
        return written
