from __future__ import annotations

import logging
from collections.abc import Callable

from cimcall.xbar.base import VmmEngine
from cimcall.xbar.exceptions import XbarConfigurationError

_log = logging.getLogger(__name__)


class EngineRegistry(dict[str, type[VmmEngine]]):
    """Map engine names to VmmEngine subclasses."""

    def register(self, name: str, cls: type[VmmEngine]) -> None:
        if not isinstance(cls, type) or not issubclass(cls, VmmEngine):
            message = f"Cannot register '{cls!r}': not a VmmEngine subclass"
            _log.error(message)
            raise XbarConfigurationError(issue=message, stage="engine_registration")

        self[name] = cls
        _log.debug("VMM engine '%s' registered as '%s'", cls.__name__, name)


engine_registry = EngineRegistry()


def register(name: str) -> Callable[[type[VmmEngine]], type[VmmEngine]]:
    """Create a decorator registering a VmmEngine under ``name``."""

    def wrapper(cls: type[VmmEngine]) -> type[VmmEngine]:
        try:
            engine_registry.register(name, cls)
            return cls

        except XbarConfigurationError:
            raise

        except Exception as exc:
            _log.error("Unexpected error registering engine '%s': %s", name, exc)
            raise XbarConfigurationError(
                issue=f"Registration failed for '{name}': {exc}",
                stage="engine_registration",
            ) from exc

    return wrapper
