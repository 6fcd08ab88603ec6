from __future__ import annotations

import itertools

import numpy as np
import pytest

from cimcall.device import DeviceParams, RngStream
from cimcall.nn import QuantSpec
from cimcall.xbar import (
    SliceLayout,
    SlicingConfigurationError,
    bit_sliced_vmm,
    get_default_vmm_engine_factory,
    input_cycles,
    tile_matrix,
)


def test_layout_encode_decode_signed():
    layout = SliceLayout(weight_bits=4, bits_per_cell=1)
    w = np.arange(-7, 8).reshape(3, 5)
    states = layout.encode(w)
    assert states.shape == (3, 5 * layout.columns_per_output)
    assert set(np.unique(states)) <= {0, 1}
    np.testing.assert_array_equal(layout.decode(states), w)


def test_layout_multi_level_cells():
    layout = SliceLayout(weight_bits=4, bits_per_cell=2)
    w = np.array([[15, -9], [0, 6]])
    assert layout.slices == 2
    np.testing.assert_array_equal(layout.decode(layout.encode(w)), w)


def test_layout_rejects_uneven_bits():
    with pytest.raises(SlicingConfigurationError):
        SliceLayout(weight_bits=4, bits_per_cell=3)


def test_input_cycles():
    assert input_cycles(8, 1) == 8
    assert input_cycles(8, 2) == 4
    with pytest.raises(SlicingConfigurationError):
        input_cycles(8, 3)


def test_tile_matrix_covers_matrix(device, ideal_profile):
    layout = SliceLayout(weight_bits=4, bits_per_cell=1)
    w = np.random.default_rng(0).integers(-7, 8, size=(5, 3))
    group = tile_matrix("m", w, layout, (4, 8), device, ideal_profile)
    # 5 rows over 4-row tiles, 24 logical columns over 8-wide tiles.
    assert len(group) == 6
    assert group.blocks[-1].tile.active_rows == 1
    assert {tile.tile_id for tile in group.tiles} == set(range(6))


def test_tile_matrix_rejects_odd_width(device, ideal_profile):
    layout = SliceLayout(weight_bits=4, bits_per_cell=1)
    with pytest.raises(SlicingConfigurationError):
        tile_matrix(
            "m", np.ones((2, 2), dtype=int), layout, (4, 5), device, ideal_profile
        )


def test_bit_sliced_vmm_is_exact_for_every_4bit_pair(ideal_profile):
    device = DeviceParams()
    spec = QuantSpec(weight_bits=4, activation_bits=4, mode="fixed")
    layout = SliceLayout(weight_bits=4, bits_per_cell=device.bits_per_cell)
    values = np.arange(-7, 8)
    w = np.stack([values, values[::-1]])
    group = tile_matrix("w", w, layout, (4, 4), device, ideal_profile)
    group = group.map_tiles(
        lambda block: block.tile.with_conductance(block.tile.targets)
    )

    x = np.array(list(itertools.product(values, repeat=2)))
    engine = get_default_vmm_engine_factory().create("ideal")
    out = bit_sliced_vmm(x, group, spec, RngStream(seed=0), engine=engine)
    np.testing.assert_array_equal(out, x @ w)


def test_bit_sliced_vmm_requantizes(ideal_profile, device):
    spec = QuantSpec(weight_bits=4, activation_bits=4, mode="fixed")
    layout = SliceLayout(weight_bits=4, bits_per_cell=1)
    w = np.full((2, 1), 7)
    group = tile_matrix("w", w, layout, (4, 4), device, ideal_profile)
    group = group.map_tiles(
        lambda block: block.tile.with_conductance(block.tile.targets)
    )
    engine = get_default_vmm_engine_factory().create("ideal")
    out = bit_sliced_vmm(
        np.array([[7, 7]]),
        group,
        spec,
        RngStream(seed=0),
        engine=engine,
        requantize_scale=1.0,
    )
    assert out[0, 0] == 7


def test_bit_sliced_vmm_rejects_float_spec(ideal_profile, device):
    layout = SliceLayout(weight_bits=4, bits_per_cell=1)
    group = tile_matrix(
        "w", np.ones((2, 1), dtype=int), layout, (4, 4), device, ideal_profile
    )
    engine = get_default_vmm_engine_factory().create("ideal")
    with pytest.raises(SlicingConfigurationError):
        bit_sliced_vmm(
            np.ones((1, 2)), group, QuantSpec(), RngStream(seed=0), engine=engine
        )
