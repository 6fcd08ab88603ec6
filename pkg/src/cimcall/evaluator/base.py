from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from typing import Any

_log = logging.getLogger(__name__)


class SweepExecutor(ABC):
    """Runs independent sweep cells and returns their results in cell order."""

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
    def map(self, target: str, payloads: list[dict[str, Any]]) -> list[dict[str, Any]]:
        """Call ``target`` on every payload.

        Args:
            target: Importable ``"module:function"`` taking one payload dict
                and returning a JSON-compatible dict.
            payloads: One payload per sweep cell.

        Returns:
            Results in the order of ``payloads``.
        """


class SweepExecutorFactory(ABC):
    """Base factory for creating SweepExecutor instances."""

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        self._executor_args = args
        self._executor_kwargs = kwargs

        _log.info(
            "%s initialized with args=%r, kwargs=%r",
            self.__class__.__name__,
            self._executor_args,
            self._executor_kwargs,
        )

    @abstractmethod
    def create(self, name: str, **options: Any) -> SweepExecutor:
        """Create the executor registered under ``name``.

        Args:
            name: Registered executor name.
            **options: Executor-specific options such as ``jobs``.

        Returns:
            A SweepExecutor instance.
        """
