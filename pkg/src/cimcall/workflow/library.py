from __future__ import annotations

import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any, override

from cimcall.device import StreamKind
from cimcall.evaluator import characterise_chip
from cimcall.mapper import partition_and_map, program_plan
from cimcall.nn import quantize_model
from cimcall.workflow.base import Workflow
from cimcall.workflow.exceptions import WorkflowError
from cimcall.workflow.pipeline import cached_teacher, load_library, root_stream

if TYPE_CHECKING:
    from cimcall.config import RunConfig
    from cimcall.nn import NetworkModel

_log = logging.getLogger(__name__)

LIBRARY_FILE = "library.cimlib"
LIBRARY_MANIFEST = "library_manifest.json"


class LibraryWorkflow(Workflow):
    """Characterise every tile of the mapped model into a measurement library.

    Entries draw from the same per-tile streams an evaluation uses when it
    characterises on demand, so a saved library serves the identical
    deviations.
    """

    command = "build-library"
    manifest_name = LIBRARY_MANIFEST

    def __init__(
        self,
        *,
        config: RunConfig,
        out_dir: Path,
        teacher: NetworkModel | None = None,
        **kwargs: Any,
    ) -> None:
        kwargs.update({"samples": config.library.samples})
        super().__init__(config=config, out_dir=out_dir, **kwargs)
        self._teacher = teacher

    @override
    def run(self) -> Path:
        _log.info("Starting library workflow")

        config = self._config
        spec = config.quant.spec
        if spec.is_float:
            raise WorkflowError(
                message="A floating-point model has no tiles to characterise",
                details={"quant": spec.label},
            )

        teacher = self._teacher or cached_teacher(config)
        student = quantize_model(teacher, spec)
        size = config.plan.array_size
        plan = partition_and_map(
            student,
            (size, size),
            config.device,
            spec,
            config.profile.resolve(),
        )
        root = root_stream(config)
        chip = program_plan(plan, student, root.child(StreamKind.PROGRAM))

        library = load_library(config)
        added = characterise_chip(chip, library, config.library.samples, root)

        path = Path(config.library.path or self.artifact(LIBRARY_FILE))
        library.save(path)
        self.manifest(
            [path.name],
            library=str(path),
            entries=len(library),
            characterised=added,
            tiles=plan.tile_count,
        )
        _log.info("Library workflow completed: %d entries in %s", len(library), path)
        return path
