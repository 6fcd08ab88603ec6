from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    import numpy as np

    from cimcall.device.models import DeviceParams

_log = logging.getLogger(__name__)


class StateCurve(ABC):
    """Maps a normalised cell state in [0, 1] onto a physical conductance."""

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
    def conductance(self, state: np.ndarray, params: DeviceParams) -> np.ndarray:
        """Return the conductance of each normalised state.

        Args:
            state: Normalised state values, each one of the cell's levels.
            params: Device window and curve parameters.

        Returns:
            Conductances in siemens within ``[g_hrs, g_lrs]``.
        """


class StateCurveFactory(ABC):
    """Base factory for creating StateCurve instances."""

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        self._curve_args = args
        self._curve_kwargs = kwargs

        _log.info(
            "%s initialized with args=%r, kwargs=%r",
            self.__class__.__name__,
            self._curve_args,
            self._curve_kwargs,
        )

    @abstractmethod
    def create(self, name: str) -> StateCurve:
        """Create the state curve registered under ``name``.

        Args:
            name: Registered curve name.

        Returns:
            A StateCurve instance.
        """
