from __future__ import annotations

import numpy as np
import pytest

from cimcall.device import NonIdealityProfile, RngStream
from cimcall.xbar import (
    DimensionMismatchError,
    UnprogrammedTileError,
    TileState,
    XbarConfigurationError,
    analytical_vmm,
    column_currents,
    get_default_vmm_engine_factory,
    ideal_quantized_vmm,
    ideal_vmm,
    nodal_oracle_vmm,
    wire_attenuation,
)

from .conftest import make_tile


def wires_only(r: float) -> NonIdealityProfile:
    return (
        NonIdealityProfile(wire_resistance_per_segment=r, write_variation_rate=0.0)
        .with_group("synaptic_wires")
    )


def test_ideal_vmm_matches_matmul():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(3, 6))
    w = rng.normal(size=(6, 4))
    np.testing.assert_allclose(ideal_vmm(x, w), x @ w, rtol=1e-12)


def test_ideal_vmm_rejects_mismatch():
    with pytest.raises(DimensionMismatchError):
        ideal_vmm(np.ones(3), np.ones((4, 2)))


def test_attenuation_is_identity_without_resistance(binary_cells):
    np.testing.assert_array_equal(wire_attenuation(binary_cells, 0.0), 1.0)


def test_attenuation_grows_with_distance(device):
    cells = np.full((8, 8), device.g_lrs)
    factors = wire_attenuation(cells, 5.0)
    assert np.all((factors > 0.0) & (factors <= 1.0))
    # Far from the drivers and far from the outputs means more drop.
    assert factors[0, 7] < factors[7, 0]


@pytest.mark.parametrize("r", [1.0, 5.0])
def test_fast_wire_model_tracks_nodal_solution(binary_cells, r):
    tile = make_tile(binary_cells, wires_only(r))
    volts = np.full((1, 8), 0.2)
    fast = column_currents(volts, tile)
    exact = nodal_oracle_vmm(volts, tile)
    np.testing.assert_allclose(fast, exact, rtol=0.02)


@pytest.mark.parametrize("seed", range(100))
def test_fast_wire_model_tracks_nodal_solution_on_random_tiles(device, seed):
    rng = np.random.default_rng(seed)
    rows, cols = (int(n) for n in rng.integers(1, 9, size=2))
    cells = rng.uniform(device.g_hrs, device.g_lrs, size=(rows, cols))
    tile = make_tile(cells, wires_only(float(rng.choice([1.0, 5.0, 10.0]))))
    volts = rng.uniform(0.0, 0.2, size=(3, rows))
    fast = column_currents(volts, tile)
    exact = nodal_oracle_vmm(volts, tile)
    np.testing.assert_allclose(fast, exact, rtol=0.02)


def test_nodal_solution_without_wires_is_ohms_law(binary_cells):
    tile = make_tile(binary_cells, wires_only(0.0))
    volts = np.random.default_rng(1).uniform(0.0, 0.2, size=(4, 8))
    np.testing.assert_allclose(nodal_oracle_vmm(volts, tile), volts @ binary_cells)


def test_nodal_wire_drop_lowers_currents(binary_cells):
    tile = make_tile(binary_cells, wires_only(10.0))
    volts = np.full(8, 0.2)
    assert np.all(nodal_oracle_vmm(volts, tile) < volts @ binary_cells)


def test_nodal_rejects_oversized_tile(device):
    tile = make_tile(np.full((8, 8), device.g_hrs), wires_only(1.0))
    with pytest.raises(XbarConfigurationError):
        nodal_oracle_vmm(np.zeros(8), tile, max_cells=16)


def test_analytical_matches_ideal_when_profile_is_ideal(binary_cells, ideal_profile):
    tile = make_tile(binary_cells, ideal_profile)
    x = np.random.default_rng(2).choice([0.0, 0.2], size=(5, 8))
    noisy = analytical_vmm(x, tile, RngStream(seed=0))
    clean = ideal_quantized_vmm(x, tile)
    np.testing.assert_array_equal(noisy.codes, clean.codes)


def test_analytical_requires_programming(binary_cells, profile):
    tile = make_tile(binary_cells, profile, programmed=False)
    with pytest.raises(UnprogrammedTileError):
        analytical_vmm(np.zeros(8), tile)


def test_partial_input_drives_active_rows_only(device, ideal_profile):
    cells = np.full((4, 4), device.g_lrs)
    tile = TileState(
        rows=4,
        cols=4,
        targets=cells,
        device=device,
        profile=ideal_profile,
        conductance=cells,
        active_rows=2,
        active_cols=2,
    )
    result = ideal_quantized_vmm(np.full(2, 0.2), tile)
    assert result.values.shape == (2,)
    np.testing.assert_allclose(result.currents, 2 * 0.2 * device.g_lrs)


def test_engine_factory_rejects_unknown_name():
    with pytest.raises(XbarConfigurationError):
        get_default_vmm_engine_factory().create("spice")


def test_library_engine_requires_library():
    with pytest.raises(XbarConfigurationError):
        get_default_vmm_engine_factory().create("library")
