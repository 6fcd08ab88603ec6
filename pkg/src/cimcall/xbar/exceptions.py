from __future__ import annotations


class XbarError(Exception):
    """Base exception for crossbar operations with message and optional details."""

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


class XbarConfigurationError(XbarError):
    """Raised when an engine, tile or oracle is configured inconsistently."""

    def __init__(self, issue: str, stage: str) -> None:
        super().__init__(
            message=f"Configuration error: {issue}",
            details={
                "issue": issue,
                "stage": stage,
            },
        )


class DimensionMismatchError(XbarError):
    """Raised when vector and matrix shapes cannot be multiplied."""

    def __init__(self, expected: int, actual: int, operation: str) -> None:
        super().__init__(
            message=f"Dimension mismatch: expected {expected}, got {actual}",
            details={
                "expected": expected,
                "actual": actual,
                "operation": operation,
            },
        )


class UnprogrammedTileError(XbarError):
    """Raised when a VMM is requested on a tile that holds no conductances."""

    def __init__(self, tile_id: int) -> None:
        super().__init__(
            message=f"Tile {tile_id} has not been programmed",
            details={"tile_id": tile_id},
        )


class SingularNetworkError(XbarError):
    """Raised when the nodal equations of a crossbar have no unique solution."""

    def __init__(self, issue: str) -> None:
        super().__init__(
            message=f"Singular network: {issue}",
            details={"issue": issue},
        )


class LibraryMissError(XbarError):
    """Raised when the measurement library holds no entry for a tile."""

    def __init__(self, fingerprint: str) -> None:
        super().__init__(
            message="No measurement library entry for tile",
            details={"fingerprint": fingerprint},
        )


class LibraryFormatError(XbarError):
    """Raised when a measurement library file cannot be decoded."""

    def __init__(self, issue: str, path: str) -> None:
        super().__init__(
            message=f"Malformed measurement library: {issue}",
            details={
                "issue": issue,
                "path": path,
            },
        )


class SlicingConfigurationError(XbarError):
    """Raised when bit-widths cannot be split across cells or DAC cycles."""

    def __init__(self, issue: str) -> None:
        super().__init__(
            message=f"Slicing configuration error: {issue}",
            details={"issue": issue},
        )
