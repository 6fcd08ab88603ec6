from __future__ import annotations

import dataclasses
import hashlib
import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from cimcall.device import DeviceParams, NonIdealityProfile
from cimcall.xbar.exceptions import UnprogrammedTileError, XbarConfigurationError
from cimcall.xbar.wires import wire_attenuation

_log = logging.getLogger(__name__)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64, copy=True)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class TileState:
    """One crossbar: its target and programmed conductances plus peripherals.

    ``targets`` are the noise-free conductances the mapper asked for;
    ``conductance`` is what programming produced and is ``None`` until the
    tile has been written. Rows and columns past ``active_rows`` and
    ``active_cols`` hold HRS cells that are never driven or sensed.
    """

    rows: int
    cols: int
    targets: np.ndarray
    device: DeviceParams
    profile: NonIdealityProfile
    conductance: np.ndarray | None = None
    active_rows: int = 0
    active_cols: int = 0
    tile_id: int = 0
    _shared: dict[str, object] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise XbarConfigurationError(
                issue=f"tile size {self.rows}x{self.cols} is empty",
                stage="tile_construction",
            )
        object.__setattr__(self, "targets", _frozen(self.targets))
        if self.targets.shape != (self.rows, self.cols):
            raise XbarConfigurationError(
                issue=f"targets shape {self.targets.shape} != "
                f"({self.rows}, {self.cols})",
                stage="tile_construction",
            )
        if self.conductance is not None:
            object.__setattr__(self, "conductance", _frozen(self.conductance))
            if self.conductance.shape != self.targets.shape:
                raise XbarConfigurationError(
                    issue="conductance and targets differ in shape",
                    stage="tile_construction",
                )
        if not self.active_rows:
            object.__setattr__(self, "active_rows", self.rows)
        if not self.active_cols:
            object.__setattr__(self, "active_cols", self.cols)

    @property
    def is_programmed(self) -> bool:
        return self.conductance is not None

    def programmed(self) -> np.ndarray:
        if self.conductance is None:
            raise UnprogrammedTileError(self.tile_id)
        return self.conductance

    def with_conductance(self, conductance: np.ndarray) -> TileState:
        """Return this tile reprogrammed, sharing target-derived caches."""
        return dataclasses.replace(self, conductance=conductance)

    def with_targets(self, targets: np.ndarray) -> TileState:
        """Return an unprogrammed tile holding a different target pattern."""
        return dataclasses.replace(self, targets=targets, conductance=None, _shared={})

    @cached_property
    def fingerprint(self) -> str:
        """Stable identity of the programmed pattern, independent of noise."""
        digest = hashlib.sha256()
        digest.update(f"{self.rows}x{self.cols}".encode())
        digest.update(np.ascontiguousarray(self.targets, dtype="<f8").tobytes())
        return digest.hexdigest()

    @property
    def attenuation(self) -> np.ndarray:
        """Wire attenuation factors, computed once per target pattern."""
        r = self.profile.effective().wire_resistance_per_segment
        key = f"attenuation:{r!r}"
        cached = self._shared.get(key)
        if cached is None:
            cached = wire_attenuation(self.targets, r)
            cached.flags.writeable = False
            self._shared[key] = cached
        return cached  # type: ignore[return-value]

    def effective_conductance(self) -> np.ndarray:
        """Programmed conductances after IR-drop attenuation."""
        return self.programmed() * self.attenuation

    @property
    def full_scale_current(self) -> float:
        """ADC full scale: every row at full voltage into LRS cells."""
        return self.rows * self.profile.dac_full_scale * self.device.g_lrs


@dataclass(frozen=True)
class VmmResult:
    """Output of one crossbar VMM.

    ``codes`` are the post-ADC integers and ``values`` their dequantised
    currents in amps; ``currents`` keeps the analog column currents that fed
    the ADC.
    """

    codes: np.ndarray
    values: np.ndarray
    currents: np.ndarray
    saturated: int = 0
    dead_zone: int = 0

    @property
    def error_flags(self) -> dict[str, int]:
        return {"saturated": self.saturated, "dead_zone": self.dead_zone}
