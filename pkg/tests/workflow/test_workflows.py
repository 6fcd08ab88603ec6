from __future__ import annotations

import dataclasses
import json

import pandas as pd
import pytest

from cimcall.config import apply_overrides, build_config
from cimcall.evaluator import AccuracyStats, read_manifest
from cimcall.nn import load_checkpoint
from cimcall.workflow import (
    CheckpointMismatchError,
    SelfCheckError,
    WorkflowError,
    check_report,
    create_evaluate_workflow,
    create_library_workflow,
    create_report_workflow,
    create_sweep_workflow,
    create_train_workflow,
    evaluate_config,
)
from cimcall.xbar import MeasurementLibrary


def configure(base, out_dir, **overrides):
    data = apply_overrides(base.dump(), {"output.directory": str(out_dir), **overrides})
    return build_config(data)


@pytest.mark.slow
def test_evaluation_reruns_identically(small_config):
    first = evaluate_config(small_config).to_manifest()
    second = evaluate_config(small_config).to_manifest()
    assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)
    assert len(first["accuracy"]["runs"]) == 2
    assert "notes" not in first["costs"]


@pytest.mark.slow
def test_evaluate_workflow_writes_its_artifacts(small_config, tmp_path):
    config = configure(small_config, tmp_path)
    create_evaluate_workflow(config).run()
    first = (tmp_path / "manifest.json").read_bytes()
    create_evaluate_workflow(config).run()

    assert (tmp_path / "manifest.json").read_bytes() == first
    assert (tmp_path / "plan.txt").read_text().startswith("Tile plan:")
    frame = pd.read_csv(tmp_path / "report.csv")
    assert len(frame) == 1
    assert read_manifest(tmp_path / "manifest.json")["command"] == "evaluate"


@pytest.mark.slow
def test_checkpoint_reproduces_the_trained_model(small_config, tmp_path):
    config = configure(small_config, tmp_path)
    checkpoint = create_train_workflow(config).run()

    assert checkpoint == tmp_path / "model.cimnet"
    assert (tmp_path / "training_log.csv").exists()
    from_file = create_evaluate_workflow(config, checkpoint).run()
    in_memory = evaluate_config(config, teacher=load_checkpoint(checkpoint))
    assert from_file.accuracy == in_memory.accuracy


@pytest.mark.slow
def test_checkpoint_must_match_the_model_section(small_config, tmp_path):
    checkpoint = create_train_workflow(configure(small_config, tmp_path)).run()
    wider = configure(small_config, tmp_path / "eval", **{"model.hidden": 5})
    with pytest.raises(CheckpointMismatchError):
        create_evaluate_workflow(wider, checkpoint).run()


def test_self_check_rejects_impossible_results(small_config):
    report = evaluate_config(
        configure(small_config, "unused", **{"quant.format": "32-32"})
    )
    assert check_report(report) is report

    with pytest.raises(SelfCheckError, match="accuracy_bounds"):
        check_report(
            dataclasses.replace(report, accuracy=AccuracyStats.from_runs([101.0]))
        )
    stalled = dataclasses.replace(report.throughput, kbps=0.0)
    with pytest.raises(SelfCheckError, match="throughput_positive"):
        check_report(dataclasses.replace(report, throughput=stalled))


@pytest.mark.slow
def test_sweep_writes_one_row_per_cell(small_config, tmp_path):
    config = configure(
        small_config,
        tmp_path,
        **{
            "evaluation.runs": 1,
            "sweep.axes": {"plan.array_size": [16, 32]},
            "sweep.output": "fig10_sweep.csv",
        },
    )
    reports = create_sweep_workflow(config, jobs=1).run()

    assert [r.labels["plan.array_size"] for r in reports] == [16, 32]
    frame = pd.read_csv(tmp_path / "fig10_sweep.csv")
    assert frame["plan.array_size"].tolist() == [16, 32]
    assert read_manifest(tmp_path / "manifest.json")["cells"] == 2


@pytest.mark.slow
def test_library_workflow_feeds_the_library_engine(small_config, tmp_path):
    overrides = {
        "profile.group": "measured",
        "library.samples": 8,
        "library.min_samples": 8,
        "evaluation.runs": 1,
    }
    config = configure(small_config, tmp_path, **overrides)
    path = create_library_workflow(config).run()

    library = MeasurementLibrary.load(path, min_samples=8)
    assert len(library) > 0
    manifest = read_manifest(tmp_path / "library_manifest.json")
    assert manifest["entries"] == len(library)

    with_file = configure(
        small_config, tmp_path, **overrides, **{"library.path": str(path)}
    )
    assert with_file.engine_name == "library"
    report = evaluate_config(with_file)
    assert len(report.accuracy.runs) == 1


def test_float_model_has_no_library(small_config, tmp_path):
    config = configure(small_config, tmp_path, **{"quant.format": "32-32"})
    with pytest.raises(WorkflowError):
        create_library_workflow(config).run()


def test_report_needs_an_existing_directory(tmp_path):
    with pytest.raises(FileNotFoundError):
        create_report_workflow(tmp_path / "absent").run()
    with pytest.raises(WorkflowError):
        create_report_workflow(tmp_path).run()
