from __future__ import annotations

import functools
import json
import logging
import math
from pathlib import Path
from typing import TYPE_CHECKING, Any

from cimcall.config import RunConfig
from cimcall.device import RngStream, StreamKind
from cimcall.evaluator import (
    EvalReport,
    dataset_accuracy,
    evaluate_accuracy,
    evaluate_area,
    evaluate_throughput,
    software_throughput,
)
from cimcall.mitigate import MitigationContext, prepare_recipe
from cimcall.nn import NetworkModel, quantize_model
from cimcall.taskgen import KmerTable, generate_dataset
from cimcall.workflow.exceptions import SelfCheckError
from cimcall.xbar import MeasurementLibrary, get_default_vmm_engine_factory

if TYPE_CHECKING:
    from cimcall.nn import TrainResult
    from cimcall.taskgen import SyntheticDataset
    from cimcall.xbar import VmmEngine

_log = logging.getLogger(__name__)

TRAIN_SPLIT = 0
TEST_SPLIT = 1

# Sections that fully determine the trained float model.
_TEACHER_SECTIONS = ("task", "model", "training", "seeds")


def _key(data: Any) -> str:
    return json.dumps(data, sort_keys=True, default=str)


def root_stream(config: RunConfig) -> RngStream:
    return RngStream(seed=config.seeds.master)


@functools.lru_cache(maxsize=8)
def _datasets(task_key: str, seed: int) -> tuple[SyntheticDataset, SyntheticDataset]:
    task = json.loads(task_key)
    table = KmerTable.from_seed(task["table_seed"], k=task["kmer"])
    stream = RngStream(seed=seed).child(StreamKind.DATASET)
    dwell = (task["dwell_min"], task["dwell_max"])

    def split(index: int, n_reads: int) -> SyntheticDataset:
        return generate_dataset(
            n_reads,
            task["read_length"],
            task["noise_sigma"],
            dwell,
            stream.child(index),
            table=table,
        )

    train = split(TRAIN_SPLIT, task["train_reads"])
    test = split(TEST_SPLIT, task["test_reads"])
    _log.info("Generated %d training and %d test reads", len(train), len(test))
    return train, test


def build_datasets(config: RunConfig) -> tuple[SyntheticDataset, SyntheticDataset]:
    """Training and test reads of the configured task and dataset seed."""
    return _datasets(_key(config.task.model_dump(mode="json")), config.seeds.dataset)


def train_teacher(config: RunConfig) -> TrainResult:
    """Train the float model from scratch on the training reads.

    The result is rounded to float32 so a saved checkpoint reloads to the
    same parameters bit for bit.
    """
    train, _ = build_datasets(config)
    root = root_stream(config)
    model = NetworkModel.initialize(
        root.child(StreamKind.TRAIN, 0).generator(),
        config.model.shape(),
        activation=config.model.activation,
        input_range=config.model.input_range,
    )
    trainer = config.training.trainer(root.child(StreamKind.TRAIN, 1))
    result = trainer.fit(model, train.to_batch(min_frames=model.receptive_field))
    result.model = result.model.rounded_to_float32()
    return result


@functools.lru_cache(maxsize=8)
def _teacher(sections_key: str) -> NetworkModel:
    return train_teacher(RunConfig(**json.loads(sections_key))).model


def cached_teacher(config: RunConfig) -> NetworkModel:
    """``train_teacher`` memoised on the sections that shape its result."""
    dump = config.dump()
    return _teacher(_key({name: dump[name] for name in _TEACHER_SECTIONS}))


@functools.lru_cache(maxsize=4)
def _session_library(
    key: str, rows: int, cols: int, min_samples: int
) -> MeasurementLibrary:
    _log.info("Starting an in-memory measurement library for %dx%d tiles", rows, cols)
    return MeasurementLibrary(rows=rows, cols=cols, min_samples=min_samples)


def load_library(config: RunConfig) -> MeasurementLibrary:
    """The configured library file, or an in-memory one filled on demand.

    In-memory libraries are shared by every evaluation in this process with
    the same array size, device, profile and master seed.
    """
    rows = cols = config.plan.array_size
    path = config.library.path
    if path is not None and Path(path).exists():
        library = MeasurementLibrary.load(path, min_samples=config.library.min_samples)
        if (library.rows, library.cols) != (rows, cols):
            _log.warning(
                "Library %s holds %dx%d tiles, plan uses %dx%d",
                path,
                library.rows,
                library.cols,
                rows,
                cols,
            )
        return library

    key = _key(
        [
            config.device.model_dump(mode="json"),
            config.profile.resolve().model_dump(mode="json"),
            config.seeds.master,
        ]
    )
    return _session_library(key, rows, cols, config.library.min_samples)


def create_engine(config: RunConfig) -> VmmEngine:
    factory = get_default_vmm_engine_factory()
    if config.engine_name == "library":
        return factory.create("library", library=load_library(config))
    return factory.create(config.engine_name)


def build_context(
    config: RunConfig,
    teacher: NetworkModel,
    train: SyntheticDataset,
) -> MitigationContext:
    """Mitigation context of the plainly quantised student of ``teacher``."""
    spec = config.quant.spec
    student = quantize_model(teacher, spec)
    engine_library = load_library(config) if config.engine_name == "library" else None
    size = config.plan.array_size
    return MitigationContext(
        model=student,
        teacher=teacher,
        data=train.to_batch(min_frames=teacher.receptive_field),
        device=config.device,
        profile=config.profile.resolve(),
        spec=spec,
        array_size=(size, size),
        training=config.training,
        rng=root_stream(config).child(StreamKind.MITIGATION),
        library=engine_library,
        programming_mode=config.programming.mode,
    )


def check_report(report: EvalReport) -> EvalReport:
    """Result invariants every written report must satisfy.

    Raises:
        SelfCheckError: If accuracy leaves [0, 100] or throughput is not
            positive and finite.
    """
    for score in report.accuracy.runs:
        if not 0.0 <= score <= 100.0:
            raise SelfCheckError(
                "accuracy_bounds", f"run accuracy {score} outside [0, 100]"
            )
    kbps = report.throughput.kbps
    if not (kbps > 0.0 and math.isfinite(kbps)):
        raise SelfCheckError("throughput_positive", f"throughput {kbps} Kbp/s")
    if report.area.total < 0.0:
        raise SelfCheckError("area_non_negative", f"area {report.area.total}")
    return report


def evaluate_config(
    config: RunConfig,
    *,
    teacher: NetworkModel | None = None,
    labels: dict[str, Any] | None = None,
) -> EvalReport:
    """Quantise, mitigate, program and evaluate one configuration.

    The float model comes from ``teacher`` or is trained from the config.
    Offline techniques run once; every programming run then deploys the
    recipe afresh.

    Args:
        config: Fully resolved settings.
        teacher: Float model to start from.
        labels: Identifying values placed first in the report row.

    Returns:
        The checked report, echoing the config and its seeds.
    """
    train, test = build_datasets(config)
    teacher = teacher if teacher is not None else cached_teacher(config)
    recipe = config.mitigation.resolve()

    context = build_context(config, teacher, train)
    if not recipe.is_empty:
        context = prepare_recipe(recipe, context)
    exact = dataset_accuracy(context.model, test)

    engine = create_engine(config)
    library_samples = None
    if config.engine_name == "library":
        library_samples = config.library.samples
    stats, deployed = evaluate_accuracy(
        context,
        recipe,
        test,
        config.evaluation.runs,
        root_stream(config),
        engine=engine,
        library_samples=library_samples,
    )

    if deployed.chip is None:
        throughput = software_throughput(config.timing)
        programming: dict[str, Any] = {}
    else:
        throughput = evaluate_throughput(
            deployed.chip,
            config.timing,
            test.mean_frames_per_base,
            deployed.ledger,
        )
        programming = deployed.chip.stats.to_manifest()
    area = evaluate_area(
        deployed.plan,
        deployed.mask,
        config.area,
        adcs_per_tile=config.timing.adcs_per_tile,
    )

    costs = deployed.ledger.to_manifest()
    # Wall-clock notes stay in the log; manifests must rerun byte-identically.
    costs.pop("notes", None)
    report = EvalReport(
        labels=dict(labels or {}),
        accuracy=stats,
        throughput=throughput,
        area=area,
        config=config.dump(),
        seeds={"master": config.seeds.master, "dataset": config.seeds.dataset},
        costs=costs,
        extras={
            "exact_accuracy": exact,
            "engine": config.engine_name,
            "recipe": recipe.label,
            "tiles": deployed.plan.tile_count if deployed.plan is not None else 0,
            "programming": programming,
        },
    )
    _log.info(
        "Evaluated %s: accuracy %.3f%% (exact %.3f%%), %.4g Kbp/s",
        recipe.label,
        stats.mean,
        exact,
        throughput.kbps,
    )
    return check_report(report)
