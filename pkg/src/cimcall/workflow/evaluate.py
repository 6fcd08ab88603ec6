from __future__ import annotations

import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any, override

from cimcall.evaluator import reports_frame, write_csv
from cimcall.mapper import partition_and_map, render_plan_report
from cimcall.nn import load_checkpoint, quantize_model
from cimcall.workflow.base import Workflow
from cimcall.workflow.exceptions import CheckpointMismatchError
from cimcall.workflow.pipeline import cached_teacher, evaluate_config

if TYPE_CHECKING:
    from cimcall.config import RunConfig
    from cimcall.evaluator import EvalReport
    from cimcall.nn import NetworkModel

_log = logging.getLogger(__name__)

REPORT_CSV = "report.csv"
PLAN_REPORT = "plan.txt"


class EvaluateWorkflow(Workflow):
    """Evaluate one configuration from a checkpoint or a freshly trained model."""

    command = "evaluate"

    def __init__(
        self,
        *,
        config: RunConfig,
        out_dir: Path,
        checkpoint: Path | None = None,
        **kwargs: Any,
    ) -> None:
        kwargs.update(
            {
                "checkpoint": str(checkpoint) if checkpoint else None,
                "recipe": config.mitigation.recipe,
            }
        )
        super().__init__(config=config, out_dir=out_dir, **kwargs)
        self._checkpoint = Path(checkpoint) if checkpoint else None

    @override
    def run(self) -> EvalReport:
        """Run quantise, map, program, mitigate and evaluate; write the reports."""
        _log.info("Starting evaluate workflow")

        teacher = self._load_teacher()
        try:
            report = evaluate_config(self._config, teacher=teacher)
        except Exception:
            _log.exception("Evaluate workflow failed")
            raise

        artifacts = [
            write_csv(reports_frame([report]), self.artifact(REPORT_CSV)).name,
        ]
        plan_text = self._plan_report(teacher)
        if plan_text is not None:
            path = self.artifact(PLAN_REPORT)
            path.write_text(plan_text)
            artifacts.append(path.name)

        self.manifest(
            artifacts,
            checkpoint=str(self._checkpoint) if self._checkpoint else None,
            report=report.to_manifest(),
        )
        _log.info("Evaluate workflow completed")
        return report

    def _load_teacher(self) -> NetworkModel:
        if self._checkpoint is None:
            return cached_teacher(self._config)

        model = load_checkpoint(self._checkpoint)
        expected = self._config.model.shape()
        if model.shape != expected:
            raise CheckpointMismatchError(
                expected=vars(expected),
                actual=vars(model.shape),
                path=str(self._checkpoint),
            )
        return model

    def _plan_report(self, teacher: NetworkModel) -> str | None:
        spec = self._config.quant.spec
        if spec.is_float:
            return None
        size = self._config.plan.array_size
        plan = partition_and_map(
            quantize_model(teacher, spec),
            (size, size),
            self._config.device,
            spec,
            self._config.profile.resolve(),
        )
        return render_plan_report(plan)
