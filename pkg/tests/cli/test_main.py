from __future__ import annotations

import importlib
import tomllib
from pathlib import Path

import pytest

from cimcall.cli import (
    EXIT_FAILURE,
    EXIT_INPUT,
    EXIT_OK,
    build_parser,
    load_config,
    main,
    run,
)
from cimcall.evaluator import read_manifest

SMALL = [
    "task.train_reads=12",
    "task.test_reads=4",
    "task.read_length=16",
    "model.kernel=3",
    "model.channels=4",
    "model.hidden=4",
    "training.epochs=2",
    "training.batch_size=4",
    'quant.format="8-8"',
    "plan.array_size=16",
    "evaluation.runs=1",
]


def small_args(out) -> list[str]:
    args = ["--out", str(out)]
    for item in SMALL:
        args += ["--set", item]
    return args


@pytest.mark.parametrize(
    "command", ["train", "evaluate", "sweep", "build-library", "report"]
)
def test_every_command_parses(command):
    args = build_parser().parse_args([command])
    assert args.command == command


def test_flags_become_overrides(tmp_path):
    args = build_parser().parse_args(
        [
            "evaluate",
            "--preset",
            "repro-fig7",
            "--seed",
            "5",
            "--out",
            str(tmp_path),
            "--set",
            "profile.write_variation_rate=0.25",
            "--set",
            "mitigation.recipe=rvw",
        ]
    )
    config = load_config(args)
    assert config.seeds.master == 5
    assert config.output.directory == tmp_path
    assert config.profile.write_variation_rate == 0.25
    assert config.mitigation.recipe == "rvw"
    assert config.sweep.output == "fig7_sweep.csv"


@pytest.mark.parametrize(
    "argv",
    [
        ["evaluate", "--set", "bogus.key=1"],
        ["evaluate", "--set", "no_equals_sign"],
        ["evaluate", "--set", "evaluation.runs=0"],
        ["sweep", "--jobs", "0"],
    ],
)
def test_bad_input_exits_two(argv):
    assert main(argv) == EXIT_INPUT


def test_missing_checkpoint_exits_two(tmp_path):
    argv = ["evaluate", "--checkpoint", str(tmp_path / "absent.cimnet")]
    assert main(argv) == EXIT_INPUT


def test_sweep_without_axes_exits_two(tmp_path):
    assert main(["sweep", "--out", str(tmp_path)]) == EXIT_INPUT


def test_report_of_missing_directory_exits_two(tmp_path):
    assert main(["report", str(tmp_path / "absent")]) == EXIT_INPUT


def test_report_without_csvs_fails(tmp_path):
    assert main(["report", str(tmp_path)]) == EXIT_FAILURE


@pytest.mark.slow
def test_train_then_evaluate(tmp_path):
    assert main(["train", *small_args(tmp_path)]) == EXIT_OK
    checkpoint = tmp_path / "model.cimnet"
    assert checkpoint.exists()

    out = tmp_path / "eval"
    argv = ["evaluate", "--checkpoint", str(checkpoint), *small_args(out)]
    assert main(argv) == EXIT_OK
    manifest = read_manifest(out / "manifest.json")
    assert manifest["checkpoint"] == str(checkpoint)
    assert set(manifest["artifacts"]) == {"report.csv", "plan.txt"}


@pytest.mark.slow
def test_manifest_reruns_its_configuration(tmp_path):
    assert main(["evaluate", *small_args(tmp_path / "first")]) == EXIT_OK
    first = tmp_path / "first" / "manifest.json"
    argv = ["evaluate", "--config", str(first), "--out", str(tmp_path / "second")]
    assert main(argv) == EXIT_OK
    again = read_manifest(tmp_path / "second" / "manifest.json")
    before = read_manifest(first)["report"]
    assert again["report"]["accuracy"] == before["accuracy"]
    assert again["report"]["seeds"] == before["seeds"]


def test_console_script_points_at_run():
    manifest = Path(__file__).parents[2] / "pyproject.toml"
    scripts = tomllib.loads(manifest.read_text())["tool"]["poetry"]["scripts"]
    module, _, attr = scripts["cimcall"].partition(":")
    assert getattr(importlib.import_module(module), attr) is run


def test_run_exits_with_the_command_status(monkeypatch, tmp_path):
    monkeypatch.setattr("sys.argv", ["cimcall", "report", str(tmp_path / "absent")])
    with pytest.raises(SystemExit) as info:
        run()
    assert info.value.code == EXIT_INPUT
