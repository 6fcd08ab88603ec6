from __future__ import annotations

import json

import pytest
from pydantic import RedisDsn

from cimcall.config import (
    ConfigError,
    apply_overrides,
    build_config,
    deep_merge,
    has_key,
    list_presets,
    load_config_file,
    load_preset,
    resolve_config,
)


def test_defaults_resolve():
    config = resolve_config()
    assert config.quant.spec.weight_bits == 16
    assert config.engine_name == "analytical"


@pytest.mark.parametrize(
    ("overrides", "key"),
    [
        ({"task.bogus": 1}, "task.bogus"),
        ({"evaluation.runs": 0}, "evaluation.runs"),
        ({"quant.format": "8-x"}, "quant.format"),
        ({"mitigation.recipe": "vat+dropout"}, "mitigation.recipe"),
    ],
)
def test_errors_name_the_offending_key(overrides, key):
    with pytest.raises(ConfigError) as info:
        resolve_config(overrides=overrides)
    assert info.value.details["key"] == key
    assert key in str(info.value)


def test_every_preset_resolves():
    presets = list_presets()
    assert "repro-fig7" in presets
    assert "repro-table3" in presets
    for name in presets:
        config = resolve_config(preset=name)
        for key in config.sweep.axes:
            assert has_key(key), (name, key)
        for case in config.sweep.cases:
            assert all(has_key(k) for k in case if k != "name"), (name, case)


def test_unknown_preset():
    with pytest.raises(ConfigError, match="unknown preset"):
        load_preset("repro-fig99")


def test_sources_apply_in_order(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text('[evaluation]\nruns = 2\n\n[quant]\nformat = "4-4"\n')
    config = resolve_config(
        preset="repro-fig7", path=path, overrides={"evaluation.runs": 3}
    )
    assert config.quant.format == "4-4"
    assert config.evaluation.runs == 3
    assert config.sweep.output == "fig7_sweep.csv"


def test_manifest_config_is_reusable(tmp_path):
    original = resolve_config(overrides={"seeds.master": 11, "plan.array_size": 32})
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps({"config": original.dump()}))
    assert build_config(load_config_file(path)) == original


def test_celery_urls_are_validated_by_default():
    celery = resolve_config().celery
    assert isinstance(celery.broker_url, RedisDsn)
    assert isinstance(celery.result_backend, RedisDsn)
    assert str(celery.broker_url) == "redis://localhost:6379/0"


def test_json_without_config_object(tmp_path):
    path = tmp_path / "other.json"
    path.write_text("{}")
    with pytest.raises(ConfigError):
        load_config_file(path)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config_file(tmp_path / "absent.toml")


def test_has_key():
    assert has_key("profile.write_variation_rate")
    assert has_key("mitigation.rsa.fraction")
    assert has_key("seeds")
    assert not has_key("profile.bogus")
    assert not has_key("seeds.master.deeper")


def test_overrides_and_merge():
    data = apply_overrides({"a": {"b": 1}}, {"a.c": 2, "d": 3})
    assert data == {"a": {"b": 1, "c": 2}, "d": 3}
    assert deep_merge({"a": {"b": 1}}, {"a": {"b": 2}}) == {"a": {"b": 2}}


def test_environment_supplies_defaults(monkeypatch):
    monkeypatch.setenv("CIMCALL_SEEDS__MASTER", "7")
    assert resolve_config().seeds.master == 7
    assert resolve_config(overrides={"seeds.master": 9}).seeds.master == 9


def test_group_resolves_profile():
    config = resolve_config(overrides={"profile.group": "sense_adc"})
    profile = config.profile.resolve()
    assert not profile.is_ideal
    effective = profile.effective()
    assert effective.wire_resistance_per_segment == 0.0
    assert effective.dac_offset == 0.0
    assert effective.adc_ref_error == pytest.approx(0.02)
