from __future__ import annotations

import math

import numpy as np
import pytest

from cimcall.mapper import (
    MappingError,
    UnsupportedArraySizeError,
    build_schedule,
    partition_and_map,
    render_plan_report,
)
from cimcall.nn import VMM_PARAMETERS, QuantSpec, quantize_model


@pytest.fixture
def spec() -> QuantSpec:
    return QuantSpec.parse("4-4")


@pytest.fixture
def student(tiny_model, spec):
    return quantize_model(tiny_model, spec)


def test_every_matrix_gets_its_own_tiles(student, spec, device, ideal_profile):
    plan = partition_and_map(student, 16, device, spec, ideal_profile)
    assert [m.name for m in plan] == list(VMM_PARAMETERS)
    ids = [tile_id for mapping in plan for tile_id in mapping.tile_ids]
    assert ids == list(range(plan.tile_count))


def test_tile_count_follows_matrix_shape(student, spec, device, ideal_profile):
    plan = partition_and_map(student, 16, device, spec, ideal_profile)
    for mapping in plan:
        rows, cols = mapping.weight_shape
        logical = cols * mapping.layout.columns_per_output
        assert len(mapping.group) == math.ceil(rows / 16) * math.ceil(logical / 16)
    assert 0.0 < plan.utilization <= 1.0
    assert plan.weight_count == sum(student.params[n].size for n in VMM_PARAMETERS)


def test_mapping_draws_no_randomness(student, spec, device, ideal_profile):
    first = partition_and_map(student, 8, device, spec, ideal_profile)
    second = partition_and_map(student, 8, device, spec, ideal_profile)
    for a, b in zip(first.layers, second.layers, strict=True):
        assert [t.fingerprint for t in a.group.tiles] == [
            t.fingerprint for t in b.group.tiles
        ]


def test_float_model_cannot_be_mapped(tiny_model, device):
    with pytest.raises(MappingError):
        partition_and_map(tiny_model, 16, device, QuantSpec())


def test_quantisation_mismatch_rejected(student, device):
    with pytest.raises(MappingError):
        partition_and_map(student, 16, device, QuantSpec.parse("8-8"))


@pytest.mark.parametrize("size", [48, 1024, (16, 32)])
def test_unsupported_array_size(student, spec, device, size):
    with pytest.raises(UnsupportedArraySizeError):
        partition_and_map(student, size, device, spec)


def test_schedule_chains_stages(student, spec, device):
    schedule = build_schedule(partition_and_map(student, 16, device, spec))
    latencies = {"conv.w": 1.0, "rec.wx": 2.0, "rec.wh": 3.0, "out.w": 0.5}
    starts = schedule.start_times(latencies)
    assert starts == {"conv.w": 0.0, "rec.wx": 1.0, "rec.wh": 3.0, "out.w": 6.0}
    assert schedule.bottleneck(latencies) == ("rec.wh", 3.0)


def test_plan_report_lists_every_tile(student, spec, device):
    plan = partition_and_map(student, 16, device, spec)
    report = render_plan_report(plan)
    assert report.startswith(f"Tile plan: {plan.tile_count} tiles of 16x16")
    assert report.count("    tile ") == plan.tile_count
    assert np.isclose(plan.to_manifest()["utilization"], plan.utilization)
