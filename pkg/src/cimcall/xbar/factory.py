from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any, override

from cimcall.xbar.base import VmmEngineFactory
from cimcall.xbar.exceptions import XbarConfigurationError, XbarError
from cimcall.xbar.registry import engine_registry

if TYPE_CHECKING:
    from cimcall.xbar.base import VmmEngine

_log = logging.getLogger(__name__)


class DefaultVmmEngineFactory(VmmEngineFactory):
    """Factory that instantiates registered VMM engines by name."""

    @override
    def create(self, name: str, **options: Any) -> VmmEngine:
        """Create the engine registered under ``name``.

        Raises:
            XbarConfigurationError: If no engine is registered for the name or
                instantiation fails.
        """
        engine_cls = engine_registry.get(name)
        if engine_cls is None:
            _log.error("No VMM engine registered as '%s'", name)
            raise XbarConfigurationError(
                issue=f"No VMM engine registered as '{name}'",
                stage="engine_selection",
            )

        try:
            return engine_cls(
                *self._engine_args,
                **{**self._engine_kwargs, **options},
            )

        except XbarError:
            raise

        except Exception as exc:
            _log.error("Failed to instantiate engine '%s': %s", name, exc)
            raise XbarConfigurationError(
                issue=f"Instantiation error in '{engine_cls.__name__}': {exc}",
                stage="engine_instantiation",
            ) from exc
