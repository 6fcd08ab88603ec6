from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from cimcall.device import conductance_read

if TYPE_CHECKING:
    from cimcall.mapper.models import ProgrammedChip
    from cimcall.xbar import TileGroup

_log = logging.getLogger(__name__)


def read_group(group: TileGroup) -> np.ndarray:
    """Integer weights recovered by reading every cell as its nearest state."""
    states = group.assemble(
        lambda tile: conductance_read(tile.programmed(), tile.device)
    )
    return group.layout.decode(states.astype(np.int64))


def read_back(chip: ProgrammedChip) -> dict[str, np.ndarray]:
    """Integer weight matrices read back from the programmed cells."""
    return {name: read_group(group) for name, group in chip.groups.items()}


def analog_group(group: TileGroup) -> np.ndarray:
    """Weights in integer units as the crossbar actually sees them.

    Uses the wire-attenuated conductances and a continuous state estimate, so
    write variation and IR drop both show up.
    """

    def levels(tile) -> np.ndarray:
        device = tile.device
        fraction = (tile.effective_conductance() - device.g_hrs) / device.window
        return fraction * (group.layout.levels - 1)

    return group.layout.decode(group.assemble(levels))


def effective_weights(chip: ProgrammedChip) -> dict[str, np.ndarray]:
    """Weights the analog path realises, including masked cells at HRS."""
    return {
        name: analog_group(group) * chip.scales[name]
        for name, group in chip.groups.items()
    }
