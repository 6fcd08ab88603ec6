from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import TYPE_CHECKING, Any, ClassVar

from cimcall.evaluator import write_manifest

if TYPE_CHECKING:
    from cimcall.config import RunConfig

_log = logging.getLogger(__name__)

MANIFEST = "manifest.json"


class Workflow(ABC):
    """One command of the tool: a resolved config in, a run directory out.

    ``manifest`` records the command, the config echo and the artifacts next
    to the outputs, so the directory alone replays the run.
    """

    command: ClassVar[str]
    manifest_name: ClassVar[str] = MANIFEST

    def __init__(
        self,
        *,
        config: RunConfig | None = None,
        out_dir: Path | None = None,
        **kwargs: Any,
    ) -> None:
        self._config = config
        self._out_dir = Path(out_dir) if out_dir is not None else None
        self._kwargs = kwargs

        _log.info(
            "%s prepared for '%s' into %s with %r",
            self.__class__.__name__,
            self.command,
            self._out_dir,
            kwargs,
        )

    def artifact(self, name: str) -> Path:
        """Path of an output file inside the run directory, which is created."""
        if self._out_dir is None:
            raise ValueError(f"'{self.command}' has no run directory")
        self._out_dir.mkdir(parents=True, exist_ok=True)
        return self._out_dir / name

    def manifest(self, artifacts: list[str], **fields: Any) -> Path:
        payload: dict[str, Any] = {"command": self.command, **fields}
        if self._config is not None:
            payload["config"] = self._config.dump()
        payload["artifacts"] = artifacts
        return write_manifest(self.artifact(self.manifest_name), payload)

    @abstractmethod
    def run(self) -> Any:
        """Run the command and return its main product."""
