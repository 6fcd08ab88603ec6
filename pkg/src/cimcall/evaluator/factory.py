from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any, override

from cimcall.evaluator.base import SweepExecutorFactory
from cimcall.evaluator.exceptions import EvaluatorConfigurationError
from cimcall.evaluator.registry import executor_registry

if TYPE_CHECKING:
    from cimcall.evaluator.base import SweepExecutor

_log = logging.getLogger(__name__)


class DefaultSweepExecutorFactory(SweepExecutorFactory):
    """Factory that instantiates registered sweep executors by name."""

    @override
    def create(self, name: str, **options: Any) -> SweepExecutor:
        """Create the executor registered under ``name``.

        Raises:
            EvaluatorConfigurationError: If no executor is registered for the
                name or instantiation fails.
        """
        executor_cls = executor_registry.get(name)
        if executor_cls is None:
            _log.error("No sweep executor registered as '%s'", name)
            raise EvaluatorConfigurationError(
                issue=f"No sweep executor registered as '{name}'",
                stage="executor_selection",
            )

        kwargs = {**self._executor_kwargs, **options}
        try:
            return executor_cls(*self._executor_args, **kwargs)

        except Exception as exc:
            _log.error("Failed to instantiate executor '%s': %s", name, exc)
            raise EvaluatorConfigurationError(
                issue=f"Instantiation error in '{executor_cls.__name__}': {exc}",
                stage="executor_instantiation",
            ) from exc
