from __future__ import annotations

import argparse
import logging
import logging.config
import sys
import tomllib
from pathlib import Path
from typing import TYPE_CHECKING, Any

from cimcall.config import ConfigError, RunConfig, list_presets, resolve_config
from cimcall.device import DeviceError
from cimcall.evaluator import EmptyGridError, EvaluatorError, SweepAxisError
from cimcall.mapper import MapperError
from cimcall.mitigate import MitigationConfigurationError, MitigationError
from cimcall.nn import CheckpointError, NnError
from cimcall.taskgen import DatasetFormatError, TaskError
from cimcall.workflow import (
    CheckpointMismatchError,
    SelfCheckError,
    WorkflowError,
    create_evaluate_workflow,
    create_library_workflow,
    create_report_workflow,
    create_sweep_workflow,
    create_train_workflow,
)
from cimcall.xbar import LibraryFormatError, XbarError

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

_log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_SELF_CHECK = 3

LOGGING_INI = Path(__file__).parent.parent / "config" / "logging.ini"

_INPUT_ERRORS: tuple[type[Exception], ...] = (
    ConfigError,
    FileNotFoundError,
    CheckpointError,
    CheckpointMismatchError,
    DatasetFormatError,
    LibraryFormatError,
    SweepAxisError,
    EmptyGridError,
    MitigationConfigurationError,
)
_PACKAGE_ERRORS: tuple[type[Exception], ...] = (
    DeviceError,
    XbarError,
    NnError,
    MapperError,
    MitigationError,
    TaskError,
    EvaluatorError,
    WorkflowError,
)


def _parse_override(text: str) -> tuple[str, Any]:
    """Split ``key=value``; the value is read as a TOML literal when it is one."""
    key, sep, raw = text.partition("=")
    if not sep or not key.strip():
        raise ConfigError("--set", f"expected KEY=VALUE, got '{text}'")
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    return key.strip(), value


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config", type=Path, help="TOML config or a run's manifest.json"
    )
    common.add_argument(
        "--preset", choices=list_presets(), help="Bundled preset to start from"
    )
    common.add_argument("--seed", type=int, help="Master seed (seeds.master)")
    common.add_argument("--jobs", type=int, default=1, help="Parallel sweep cells")
    common.add_argument("--out", type=Path, help="Output directory (output.directory)")
    common.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override any dotted setting, e.g. profile.write_variation_rate=0.1",
    )
    common.add_argument(
        "-v", "--verbose", action="store_true", help="Log at DEBUG level"
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="cimcall",
        description=(
            "Evaluate a crossbar-mapped basecaller under device non-idealities."
        ),
    )
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("train", parents=[common], help="Train the float model")

    evaluate = commands.add_parser(
        "evaluate", parents=[common], help="Evaluate one config"
    )
    evaluate.add_argument("--checkpoint", type=Path, help="Float model to evaluate")

    sweep = commands.add_parser(
        "sweep", parents=[common], help="Run the configured grid"
    )
    sweep.add_argument(
        "--executor",
        choices=("process", "celery"),
        default="process",
        help="Where sweep cells run",
    )

    commands.add_parser(
        "build-library",
        parents=[common],
        help="Characterise the mapped tiles into a measurement library",
    )

    report = commands.add_parser(
        "report", parents=[common], help="Render figure CSVs"
    )
    report.add_argument(
        "directory", nargs="?", type=Path, help="Run directory to render"
    )
    return parser


def _configure_logging(verbose: bool) -> None:
    logging.config.fileConfig(LOGGING_INI, disable_existing_loggers=False)
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)
        logging.getLogger("cimcall").setLevel(logging.DEBUG)


def load_config(args: argparse.Namespace) -> RunConfig:
    """Resolve preset, file, ``--set`` and flag settings into one config."""
    overrides = dict(_parse_override(item) for item in args.overrides)
    if args.seed is not None:
        overrides["seeds.master"] = args.seed
    if args.out is not None:
        overrides["output.directory"] = str(args.out)
    return resolve_config(preset=args.preset, path=args.config, overrides=overrides)


def _manifest_checkpoint(path: Path | None) -> Path | None:
    if path is None or path.suffix != ".json":
        return None
    from cimcall.evaluator import read_manifest

    checkpoint = read_manifest(path).get("checkpoint")
    return Path(checkpoint) if checkpoint else None


def cmd_train(args: argparse.Namespace, config: RunConfig) -> None:
    create_train_workflow(config).run()


def cmd_evaluate(args: argparse.Namespace, config: RunConfig) -> None:
    checkpoint = args.checkpoint or _manifest_checkpoint(args.config)
    if checkpoint is not None and not checkpoint.exists():
        raise FileNotFoundError(f"Checkpoint not found: {checkpoint}")
    create_evaluate_workflow(config, checkpoint).run()


def cmd_sweep(args: argparse.Namespace, config: RunConfig) -> None:
    if args.jobs < 1:
        raise ConfigError("--jobs", f"must be >= 1, got {args.jobs}")
    create_sweep_workflow(config, executor=args.executor, jobs=args.jobs).run()


def cmd_build_library(args: argparse.Namespace, config: RunConfig) -> None:
    create_library_workflow(config).run()


def cmd_report(args: argparse.Namespace, config: RunConfig) -> None:
    directory = args.directory or Path(config.output.directory)
    create_report_workflow(directory, args.out).run()


_COMMANDS: dict[str, Callable[[argparse.Namespace, RunConfig], None]] = {
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "build-library": cmd_build_library,
    "report": cmd_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand and return its exit status.

    0 means every artifact was written and every self-check passed; 2 flags
    bad configuration or input, 3 a failed self-check and 1 anything else.
    """
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)

    try:
        config = load_config(args)
        _COMMANDS[args.command](args, config)
    except SelfCheckError as exc:
        _log.error("%s", exc)
        return EXIT_SELF_CHECK
    except _INPUT_ERRORS as exc:
        _log.error("%s", exc)
        return EXIT_INPUT
    except _PACKAGE_ERRORS as exc:
        _log.error("%s", exc)
        return EXIT_FAILURE
    except Exception:
        _log.exception("Unexpected failure in '%s'", args.command)
        return EXIT_FAILURE
    return EXIT_OK


def run() -> None:
    sys.exit(main())
