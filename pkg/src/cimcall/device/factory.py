from __future__ import annotations

import logging
from typing import TYPE_CHECKING, override

from cimcall.device.base import StateCurveFactory
from cimcall.device.exceptions import DeviceConfigurationError
from cimcall.device.registry import curve_registry

if TYPE_CHECKING:
    from cimcall.device.base import StateCurve

_log = logging.getLogger(__name__)


class DefaultStateCurveFactory(StateCurveFactory):
    """Factory that instantiates registered state curves by name."""

    @override
    def create(self, name: str) -> StateCurve:
        """Create the state curve registered under ``name``.

        Raises:
            DeviceConfigurationError: If no curve is registered for the name or
                instantiation fails.
        """
        curve_cls = curve_registry.get(name)
        if curve_cls is None:
            _log.error("No state curve registered as '%s'", name)
            raise DeviceConfigurationError(
                issue=f"No state curve registered as '{name}'",
                stage="curve_selection",
            )

        try:
            return curve_cls(*self._curve_args, **self._curve_kwargs)

        except Exception as exc:
            _log.error("Failed to instantiate curve '%s': %s", name, exc)
            raise DeviceConfigurationError(
                issue=f"Instantiation error in '{curve_cls.__name__}': {exc}",
                stage="curve_instantiation",
            ) from exc
