from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any, override

import pandas as pd

from cimcall.evaluator import write_csv
from cimcall.nn import save_checkpoint
from cimcall.workflow.base import Workflow
from cimcall.workflow.pipeline import train_teacher

if TYPE_CHECKING:
    from pathlib import Path

    from cimcall.config import RunConfig
    from cimcall.nn import TrainResult

_log = logging.getLogger(__name__)

TRAINING_LOG = "training_log.csv"


class TrainWorkflow(Workflow):
    """Generate the training reads, train the float model and checkpoint it."""

    command = "train"

    def __init__(self, *, config: RunConfig, out_dir: Path, **kwargs: Any) -> None:
        kwargs.update({"seeds": config.seeds.model_dump()})
        super().__init__(config=config, out_dir=out_dir, **kwargs)

    @override
    def run(self) -> Path:
        """Train and write the checkpoint, training log and manifest."""
        _log.info("Starting train workflow")

        try:
            result = train_teacher(self._config)
            checkpoint = self._write_checkpoint(result)
            log_path = self._write_log(result)
        except Exception:
            _log.exception("Train workflow failed")
            raise

        self.manifest(
            [checkpoint.name, log_path.name],
            seeds=self._config.seeds.model_dump(),
            final_loss=result.final_loss,
            epochs=result.epochs,
        )
        _log.info("Train workflow completed, final loss %.6f", result.final_loss)
        return checkpoint

    def _write_checkpoint(self, result: TrainResult) -> Path:
        path = self.artifact(self._config.output.checkpoint)
        return save_checkpoint(result.model, path)

    def _write_log(self, result: TrainResult) -> Path:
        steps_per_epoch = max(len(result.losses) // max(result.epochs, 1), 1)
        frame = pd.DataFrame(
            {
                "step": range(len(result.losses)),
                "epoch": [i // steps_per_epoch for i in range(len(result.losses))],
                "loss": result.losses,
            }
        )
        return write_csv(frame, self.artifact(TRAINING_LOG))
