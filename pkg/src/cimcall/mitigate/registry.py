from __future__ import annotations

import logging
from collections.abc import Callable

from cimcall.mitigate.base import Technique
from cimcall.mitigate.exceptions import MitigationConfigurationError

_log = logging.getLogger(__name__)


class TechniqueRegistry(dict[str, type[Technique]]):
    """Map recipe names to Technique subclasses."""

    def register(self, name: str, cls: type[Technique]) -> None:
        """Register a Technique subclass under a name.

        Raises:
            MitigationConfigurationError: If cls is not a Technique subclass or
                declares no phase.
        """
        if not isinstance(cls, type) or not issubclass(cls, Technique):
            message = f"Cannot register '{cls!r}': not a Technique subclass"
            _log.error(message)
            raise MitigationConfigurationError(
                issue=message, stage="technique_registration"
            )
        if getattr(cls, "phase", None) is None:
            message = f"Technique '{cls.__name__}' declares no phase"
            _log.error(message)
            raise MitigationConfigurationError(
                issue=message, stage="technique_registration"
            )

        self[name] = cls
        _log.debug("Technique '%s' registered as '%s'", cls.__name__, name)


technique_registry = TechniqueRegistry()


def register(name: str) -> Callable[[type[Technique]], type[Technique]]:
    """Create a decorator registering a Technique under ``name``."""

    def wrapper(cls: type[Technique]) -> type[Technique]:
        try:
            technique_registry.register(name, cls)
            return cls

        except MitigationConfigurationError:
            raise

        except Exception as exc:
            _log.error("Unexpected error registering technique '%s': %s", name, exc)
            raise MitigationConfigurationError(
                issue=f"Registration failed for '{name}': {exc}",
                stage="technique_registration",
            ) from exc

    return wrapper
