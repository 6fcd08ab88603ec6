from __future__ import annotations

import numpy as np
import pytest

from cimcall.device import DeviceParams, NonIdealityProfile
from cimcall.xbar import TileState


def make_tile(
    g: np.ndarray,
    profile: NonIdealityProfile,
    device: DeviceParams | None = None,
    *,
    programmed: bool = True,
) -> TileState:
    rows, cols = g.shape
    return TileState(
        rows=rows,
        cols=cols,
        targets=g,
        device=device or DeviceParams(),
        profile=profile,
        conductance=g if programmed else None,
    )


@pytest.fixture
def binary_cells(device) -> np.ndarray:
    pattern = np.random.default_rng(3).integers(0, 2, size=(8, 8))
    return np.where(pattern == 1, device.g_lrs, device.g_hrs)
