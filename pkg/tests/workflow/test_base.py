from __future__ import annotations

import pytest

from cimcall.config import resolve_config
from cimcall.evaluator import read_manifest
from cimcall.workflow.base import MANIFEST, Workflow


class Echo(Workflow):
    command = "echo"

    def run(self):
        path = self.artifact("echo.txt")
        path.write_text("hello\n")
        return self.manifest([path.name], lines=1)


def test_manifest_records_command_config_and_artifacts(tmp_path):
    config = resolve_config(overrides={"seeds.master": 3})
    path = Echo(config=config, out_dir=tmp_path / "run").run()
    assert path == tmp_path / "run" / MANIFEST
    manifest = read_manifest(path)
    assert manifest["command"] == "echo"
    assert manifest["config"]["seeds"]["master"] == 3
    assert manifest["artifacts"] == ["echo.txt"]
    assert manifest["lines"] == 1


def test_manifest_without_config_has_no_echo(tmp_path):
    manifest = read_manifest(Echo(out_dir=tmp_path).run())
    assert "config" not in manifest


def test_artifact_needs_a_run_directory():
    with pytest.raises(ValueError, match="echo"):
        Echo().artifact("x")
