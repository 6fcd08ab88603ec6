from __future__ import annotations


class MapperError(Exception):
    """Base exception for partitioning, mapping and programming."""

    def __init__(self, message: str, details: dict | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __repr__(self) -> str:
        if self.details:
            return f"{self.message} ({self.details!r})"
        return self.message

    def __str__(self) -> str:
        return repr(self)


class MappingError(MapperError):
    """Raised when a model cannot be mapped onto tiles."""

    def __init__(self, issue: str, layer: str | None = None) -> None:
        super().__init__(
            message=f"Mapping error: {issue}",
            details={
                "issue": issue,
                "layer": layer,
            },
        )


class UnsupportedArraySizeError(MapperError):
    """Raised for crossbar sizes outside the supported set."""

    def __init__(self, size: object, supported: tuple[int, ...]) -> None:
        super().__init__(
            message=f"Unsupported array size {size}",
            details={
                "size": size,
                "supported": list(supported),
            },
        )


class UnprogrammedPlanError(MapperError):
    """Raised when an operation needs a programmed chip but got a bare plan."""

    def __init__(self, operation: str) -> None:
        super().__init__(
            message="Plan has not been programmed",
            details={"operation": operation},
        )
