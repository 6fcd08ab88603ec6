from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, override

from cimcall.evaluator import render_figures
from cimcall.workflow.base import Workflow
from cimcall.workflow.exceptions import WorkflowError

_log = logging.getLogger(__name__)


class ReportWorkflow(Workflow):
    """Render every figure CSV found in a run directory to PNG."""

    command = "report"

    def __init__(
        self, *, directory: Path, out_dir: Path | None = None, **kwargs: Any
    ) -> None:
        kwargs.update({"directory": str(directory)})
        super().__init__(out_dir=out_dir, **kwargs)
        self._directory = Path(directory)

    @override
    def run(self) -> list[Path]:
        if not self._directory.is_dir():
            raise FileNotFoundError(self._directory)

        rendered = render_figures(self._directory, self._out_dir)
        if not rendered:
            raise WorkflowError(
                message="No figure CSVs to render",
                details={"directory": str(self._directory)},
            )
        _log.info("Rendered %d figures", len(rendered))
        return rendered
