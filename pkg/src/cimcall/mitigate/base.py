from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from enum import StrEnum
from typing import TYPE_CHECKING, Any, ClassVar

if TYPE_CHECKING:
    from cimcall.mitigate.models import MitigationContext, MitigationRecipe

_log = logging.getLogger(__name__)


class Phase(StrEnum):
    OFFLINE = "offline"
    PROGRAMMING = "programming"
    ONLINE = "online"


class Technique(ABC):
    """One accuracy-mitigation step applied to a deployment context.

    Offline techniques change the model before mapping, programming
    techniques change how tiles are written and online techniques act on
    the programmed chip.
    """

    phase: ClassVar[Phase]

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
    def apply(
        self,
        context: MitigationContext,
        recipe: MitigationRecipe,
    ) -> MitigationContext:
        """Apply the technique and return the updated context.

        Args:
            context: Current model, chip and cost ledger.
            recipe: Recipe supplying the technique's hyperparameters.

        Returns:
            The context with this technique's effect and costs recorded.
        """


class TechniqueFactory(ABC):
    """Base factory for creating Technique instances."""

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        self._technique_args = args
        self._technique_kwargs = kwargs

        _log.info(
            "%s initialized with args=%r, kwargs=%r",
            self.__class__.__name__,
            self._technique_args,
            self._technique_kwargs,
        )

    @abstractmethod
    def create(self, name: str) -> Technique:
        """Create the technique registered under ``name``.

        Args:
            name: Registered technique name.

        Returns:
            A Technique instance.
        """
