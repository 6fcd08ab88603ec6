from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from typing import Any, override

import numpy as np

_log = logging.getLogger(__name__)


class VmmBackend(ABC):
    """Executes the dense products of a forward pass."""

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
    def matmul(
        self,
        name: str,
        x: np.ndarray,
        w: np.ndarray,
        x_scale: float | None,
    ) -> np.ndarray:
        """Multiply activations by the weight matrix ``name``.

        Args:
            name: Parameter name of the weight matrix, e.g. ``"rec.wh"``.
            x: Activations of shape ``(..., rows)``, already on the activation
                grid when ``x_scale`` is given.
            w: The model's (possibly quantised) weight matrix.
            x_scale: Activation grid step, or ``None`` in floating point.

        Returns:
            The product with shape ``(..., cols)``.
        """


class ExactBackend(VmmBackend):
    """Plain floating-point products."""

    @override
    def matmul(
        self,
        name: str,
        x: np.ndarray,
        w: np.ndarray,
        x_scale: float | None,
    ) -> np.ndarray:
        return x @ w
