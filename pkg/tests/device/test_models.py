from __future__ import annotations

import pydantic
import pytest

from cimcall.device import (
    ALL_NON_IDEALITIES,
    DeviceConfigurationError,
    DeviceParams,
    NonIdeality,
    NonIdealityProfile,
    RngStream,
    get_default_state_curve_factory,
    group_members,
)


def test_device_window_must_be_positive():
    with pytest.raises(pydantic.ValidationError):
        DeviceParams(g_lrs=1e-6, g_hrs=1e-4)


def test_device_bits_per_cell():
    assert DeviceParams().bits_per_cell == 1
    assert DeviceParams(levels_per_cell=4).bits_per_cell == 2
    assert DeviceParams(levels_per_cell=3).bits_per_cell == 0


@pytest.mark.parametrize(
    ("group", "members"),
    [
        ("none", frozenset()),
        ("sense_adc", frozenset({NonIdeality.SENSE_ADC})),
        ("combined", ALL_NON_IDEALITIES),
        ("measured", ALL_NON_IDEALITIES),
    ],
)
def test_group_members(group, members):
    assert group_members(group) == members


def test_effective_neutralises_disabled_classes():
    profile = NonIdealityProfile().with_group("dac_driver").effective()
    assert profile.dac_gain_error == pytest.approx(0.02)
    assert profile.adc_ref_error == 0.0
    assert profile.sense_vmin == 0.0
    assert profile.wire_resistance_per_segment == 0.0


def test_ideal_keeps_quantisation_constraints():
    profile = NonIdealityProfile(adc_bits=6, dac_bits=2).ideal()
    assert profile.is_ideal
    assert profile.adc_bits == 6
    assert profile.dac_bits == 2


def test_default_profile_is_not_ideal():
    assert not NonIdealityProfile().is_ideal


def test_profile_serialises_enabled_sorted():
    dumped = NonIdealityProfile().model_dump(mode="json")
    assert dumped["enabled"] == sorted(dumped["enabled"])


def test_rng_child_extends_path():
    stream = RngStream(seed=5).child(2, 3)
    assert stream.stream_id == (0, 0, 2, 3)


def test_rng_draws_independent_of_call_order():
    root = RngStream(seed=11)
    first = root.child(1).generator().random(4)
    root.child(2).generator().random(100)
    again = root.child(1).generator().random(4)
    assert list(first) == list(again)


def test_unknown_curve_raises():
    with pytest.raises(DeviceConfigurationError):
        get_default_state_curve_factory().create("sigmoid")
