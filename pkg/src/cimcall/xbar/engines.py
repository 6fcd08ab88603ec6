from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any, override

from cimcall.xbar.base import VmmEngine
from cimcall.xbar.exceptions import XbarConfigurationError
from cimcall.xbar.library import MeasurementLibrary, library_vmm
from cimcall.xbar.registry import register
from cimcall.xbar.vmm import analytical_vmm, ideal_quantized_vmm

if TYPE_CHECKING:
    import numpy as np

    from cimcall.device import RngStream
    from cimcall.xbar.models import TileState, VmmResult

_log = logging.getLogger(__name__)


@register("ideal")
class IdealEngine(VmmEngine):
    """Noise-free targets through the DAC/ADC constraints only."""

    @override
    def run(self, x: np.ndarray, tile: TileState, rng: RngStream) -> VmmResult:
        return ideal_quantized_vmm(x, tile)


@register("analytical")
class AnalyticalEngine(VmmEngine):
    """Programmed conductances through the enabled analytical models."""

    @override
    def run(self, x: np.ndarray, tile: TileState, rng: RngStream) -> VmmResult:
        return analytical_vmm(x, tile, rng)


@register("library")
class LibraryEngine(VmmEngine):
    """Ideal result plus a deviation drawn from a measurement library."""

    def __init__(self, *args: Any, library: MeasurementLibrary, **kwargs: Any) -> None:
        super().__init__(*args, **kwargs)
        if not isinstance(library, MeasurementLibrary):
            raise XbarConfigurationError(
                issue="library engine requires a MeasurementLibrary",
                stage="engine_instantiation",
            )
        self._library = library

    @property
    def library(self) -> MeasurementLibrary:
        return self._library

    @override
    def run(self, x: np.ndarray, tile: TileState, rng: RngStream) -> VmmResult:
        return library_vmm(x, self._library, tile, rng)


@register("hybrid")
class HybridEngine(LibraryEngine):
    """Library deviations for characterised tiles, the analytical model elsewhere."""

    @override
    def run(self, x: np.ndarray, tile: TileState, rng: RngStream) -> VmmResult:
        if tile.fingerprint in self.library:
            return library_vmm(x, self.library, tile, rng)
        return analytical_vmm(x, tile, rng)
