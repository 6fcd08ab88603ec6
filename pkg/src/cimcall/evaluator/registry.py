from __future__ import annotations

import logging
from collections.abc import Callable

from cimcall.evaluator.base import SweepExecutor
from cimcall.evaluator.exceptions import EvaluatorConfigurationError

_log = logging.getLogger(__name__)


class ExecutorRegistry(dict[str, type[SweepExecutor]]):
    """Map executor names to SweepExecutor subclasses."""

    def register(self, name: str, cls: type[SweepExecutor]) -> None:
        if not isinstance(cls, type) or not issubclass(cls, SweepExecutor):
            message = f"Cannot register '{cls!r}': not a SweepExecutor subclass"
            _log.error(message)
            raise EvaluatorConfigurationError(
                issue=message, stage="executor_registration"
            )

        self[name] = cls
        _log.debug("Sweep executor '%s' registered as '%s'", cls.__name__, name)


executor_registry = ExecutorRegistry()


def register(name: str) -> Callable[[type[SweepExecutor]], type[SweepExecutor]]:
    """Create a decorator registering a SweepExecutor under ``name``."""

    def wrapper(cls: type[SweepExecutor]) -> type[SweepExecutor]:
        try:
            executor_registry.register(name, cls)
            return cls

        except EvaluatorConfigurationError:
            raise

        except Exception as exc:
            _log.error("Unexpected error registering executor '%s': %s", name, exc)
            raise EvaluatorConfigurationError(
                issue=f"Registration failed for '{name}': {exc}",
                stage="executor_registration",
            ) from exc

    return wrapper
