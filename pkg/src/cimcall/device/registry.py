from __future__ import annotations

import logging
from collections.abc import Callable

from cimcall.device.base import StateCurve
from cimcall.device.exceptions import DeviceConfigurationError

_log = logging.getLogger(__name__)


class CurveRegistry(dict[str, type[StateCurve]]):
    """Map curve names to StateCurve subclasses."""

    def register(self, name: str, cls: type[StateCurve]) -> None:
        """Register a StateCurve subclass under a name.

        Args:
            name: Curve name used by ``DeviceParams.curve``.
            cls: StateCurve subclass to register.

        Raises:
            DeviceConfigurationError: If cls is not a StateCurve subclass.
        """
        if not isinstance(cls, type) or not issubclass(cls, StateCurve):
            message = f"Cannot register '{cls!r}': not a StateCurve subclass"
            _log.error(message)
            raise DeviceConfigurationError(issue=message, stage="curve_registration")

        self[name] = cls
        _log.debug("State curve '%s' registered as '%s'", cls.__name__, name)


curve_registry = CurveRegistry()


def register(name: str) -> Callable[[type[StateCurve]], type[StateCurve]]:
    """Create a decorator registering a StateCurve under ``name``."""

    def wrapper(cls: type[StateCurve]) -> type[StateCurve]:
        try:
            curve_registry.register(name, cls)
            return cls

        except DeviceConfigurationError:
            raise

        except Exception as exc:
            _log.error("Unexpected error registering curve '%s': %s", name, exc)
            raise DeviceConfigurationError(
                issue=f"Registration failed for '{name}': {exc}",
                stage="curve_registration",
            ) from exc

    return wrapper
