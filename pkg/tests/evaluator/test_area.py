from __future__ import annotations

import numpy as np
import pytest

from cimcall.evaluator import AreaConfig, AreaReport, evaluate_area
from cimcall.mitigate import RsaMask


@pytest.fixture
def area():
    return AreaConfig(
        cell_area=0.01,
        adc_area=100.0,
        dac_area=2.0,
        driver_area=50.0,
        sram_area_per_bit=0.5,
        control_overhead_fraction=0.1,
    )


def mask_of(count: int, size: int = 64) -> RsaMask:
    flags = np.zeros(size, dtype=bool)
    flags[:count] = True
    return RsaMask(
        masks={"out.w": flags}, fraction=count / size, selection_mode="ranked"
    )


def test_components(chip, area):
    plan = chip.plan
    report = evaluate_area(plan, None, area, adcs_per_tile=4)
    tiles = plan.tile_count
    assert report.crossbar == pytest.approx(tiles * 16 * 16 * 0.01)
    assert report.adc == pytest.approx(tiles * 4 * 100.0)
    assert report.dac == pytest.approx(tiles * 16 * 2.0)
    assert report.driver == pytest.approx(tiles * 50.0)
    assert report.sram == 0.0
    assert report.control == pytest.approx(0.1 * report.subtotal)
    assert report.total == pytest.approx(1.1 * report.subtotal)


def test_sram_grows_linearly_with_masked_weights(chip, area):
    areas = [
        evaluate_area(chip.plan, mask_of(n), area, adcs_per_tile=4).sram
        for n in (0, 8, 16)
    ]
    assert areas == pytest.approx([0.0, 8 * 8 * 0.5, 16 * 8 * 0.5])


def test_no_plan_occupies_no_area(area):
    assert evaluate_area(None, None, area, adcs_per_tile=4) == AreaReport()
