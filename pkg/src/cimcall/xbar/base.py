from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    import numpy as np

    from cimcall.device import RngStream
    from cimcall.xbar.models import TileState, VmmResult

_log = logging.getLogger(__name__)


class VmmEngine(ABC):
    """One way of computing a crossbar VMM on a tile."""

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        self._args = args
        self._kwargs = kwargs

        _log.debug(
            "%s initialized with args=%r, kwargs=%r",
            self.__class__.__name__,
            args,
            kwargs,
        )

    @abstractmethod
    def run(self, x: np.ndarray, tile: TileState, rng: RngStream) -> VmmResult:
        """Multiply row voltages by the tile's conductances.

        Args:
            x: Row voltages on the DAC grid, shape ``(..., active_rows)``.
            tile: Programmed tile.
            rng: Stream for any per-call randomness.

        Returns:
            Post-ADC codes and dequantised currents.
        """


class VmmEngineFactory(ABC):
    """Base factory for creating VmmEngine instances."""

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        self._engine_args = args
        self._engine_kwargs = kwargs

        _log.info(
            "%s initialized with args=%r, kwargs=%r",
            self.__class__.__name__,
            self._engine_args,
            self._engine_kwargs,
        )

    @abstractmethod
    def create(self, name: str, **options: Any) -> VmmEngine:
        """Create the engine registered under ``name``.

        Args:
            name: Registered engine name.
            **options: Engine-specific constructor options.

        Returns:
            A VmmEngine instance.
        """
