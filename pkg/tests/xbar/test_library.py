from __future__ import annotations

import numpy as np
import pytest

from cimcall.device import RngStream
from cimcall.xbar import (
    LibraryFormatError,
    LibraryMissError,
    MeasurementLibrary,
    XbarConfigurationError,
    analytical_vmm,
    build_measurement_library,
    get_default_vmm_engine_factory,
)

from .conftest import make_tile


@pytest.fixture
def library_tile(binary_cells, profile):
    return make_tile(binary_cells, profile, programmed=False)


@pytest.fixture
def library(library_tile) -> MeasurementLibrary:
    return build_measurement_library(
        library_tile, 40, RngStream(seed=9), min_samples=20
    )


def test_build_records_one_entry(library, library_tile):
    assert library_tile.fingerprint in library
    assert library.deviations(library_tile.fingerprint).shape == (40, 8)


def test_build_is_deterministic(library, library_tile):
    again = build_measurement_library(
        library_tile, 40, RngStream(seed=9), min_samples=20
    )
    np.testing.assert_array_equal(
        again.deviations(library_tile.fingerprint),
        library.deviations(library_tile.fingerprint),
    )


def test_build_rejects_too_few_samples(library_tile):
    with pytest.raises(XbarConfigurationError):
        build_measurement_library(library_tile, 5, RngStream(seed=0), min_samples=20)


def test_save_load_preserves_entries(library, library_tile, tmp_path):
    path = tmp_path / "tiles.cimlib"
    library.save(path)
    loaded = MeasurementLibrary.load(path, min_samples=20)
    assert (loaded.rows, loaded.cols) == (8, 8)
    np.testing.assert_array_equal(
        loaded.deviations(library_tile.fingerprint),
        library.deviations(library_tile.fingerprint),
    )


def test_load_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.cimlib"
    path.write_bytes(b"NOTALIB!" + bytes(20))
    with pytest.raises(LibraryFormatError):
        MeasurementLibrary.load(path)


def test_load_rejects_truncated_body(library, tmp_path):
    path = tmp_path / "cut.cimlib"
    library.save(path)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(LibraryFormatError):
        MeasurementLibrary.load(path)


def test_unknown_tile_is_a_miss(library, device, profile):
    other = make_tile(np.full((8, 8), device.g_hrs), profile)
    with pytest.raises(LibraryMissError):
        library.deviations(other.fingerprint)


def test_library_engine_adds_stored_deviation(library, library_tile):
    engine = get_default_vmm_engine_factory().create("library", library=library)
    x = np.full((3, 8), library_tile.profile.dac_full_scale)
    result = engine.run(x, library_tile, RngStream(seed=1))
    assert result.values.shape == (3, 8)
    assert np.all(np.isfinite(result.values))


def test_hybrid_engine_uses_library_where_characterised(library, library_tile):
    engine = get_default_vmm_engine_factory().create("hybrid", library=library)
    library_only = get_default_vmm_engine_factory().create("library", library=library)
    x = np.full((3, 8), library_tile.profile.dac_full_scale)
    np.testing.assert_array_equal(
        engine.run(x, library_tile, RngStream(seed=1)).values,
        library_only.run(x, library_tile, RngStream(seed=1)).values,
    )


def test_hybrid_engine_falls_back_to_analytical(library, device, profile):
    other = make_tile(np.full((8, 8), device.g_lrs), profile)
    engine = get_default_vmm_engine_factory().create("hybrid", library=library)
    x = np.full((2, 8), profile.dac_full_scale)
    expected = analytical_vmm(x, other, RngStream(seed=4))
    result = engine.run(x, other, RngStream(seed=4))
    np.testing.assert_array_equal(result.values, expected.values)


@pytest.mark.slow
def test_library_moments_match_write_variation(device, profile):
    rate = 0.05
    only_writes = profile.model_copy(
        update={
            "write_variation_rate": rate,
            "enabled": frozenset(),
            "adc_bits": 16,
        }
    )
    g_mid = 0.5 * (device.g_hrs + device.g_lrs)
    tile = make_tile(np.full((8, 8), g_mid), only_writes, programmed=False)
    library = build_measurement_library(
        tile, 400, RngStream(seed=21), min_samples=20
    )

    deviations = library.deviations(tile.fingerprint)
    expected_std = only_writes.dac_full_scale * g_mid * rate * np.sqrt(8)
    assert abs(deviations.mean()) < 0.1 * expected_std
    assert deviations.std() == pytest.approx(expected_std, rel=0.1)
    assert library.column_variance(tile.fingerprint) == pytest.approx(
        np.full(8, expected_std**2), rel=0.25
    )
