from __future__ import annotations

import logging
from typing import TYPE_CHECKING, override

from cimcall.mitigate.base import TechniqueFactory
from cimcall.mitigate.exceptions import MitigationConfigurationError
from cimcall.mitigate.registry import technique_registry

if TYPE_CHECKING:
    from cimcall.mitigate.base import Technique

_log = logging.getLogger(__name__)


class DefaultTechniqueFactory(TechniqueFactory):
    """Factory that instantiates registered techniques by name."""

    @override
    def create(self, name: str) -> Technique:
        """Create the technique registered under ``name``.

        Raises:
            MitigationConfigurationError: If no technique is registered for the
                name or instantiation fails.
        """
        technique_cls = technique_registry.get(name)
        if technique_cls is None:
            _log.error("No technique registered as '%s'", name)
            raise MitigationConfigurationError(
                issue=f"No technique registered as '{name}'",
                stage="technique_selection",
            )

        try:
            return technique_cls(*self._technique_args, **self._technique_kwargs)

        except Exception as exc:
            _log.error("Failed to instantiate technique '%s': %s", name, exc)
            raise MitigationConfigurationError(
                issue=f"Instantiation error in '{technique_cls.__name__}': {exc}",
                stage="technique_instantiation",
            ) from exc
