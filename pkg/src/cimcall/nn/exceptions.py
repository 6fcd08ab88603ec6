from __future__ import annotations


class NnError(Exception):
    """Base exception for network operations with message and optional details."""

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


class NnConfigurationError(NnError):
    """Raised when a model, quantisation format or optimiser is misconfigured."""

    def __init__(self, issue: str, stage: str) -> None:
        super().__init__(
            message=f"Configuration error: {issue}",
            details={
                "issue": issue,
                "stage": stage,
            },
        )


class ShapeMismatchError(NnError):
    """Raised when inputs, labels or gradients disagree with the model shapes."""

    def __init__(self, expected: object, actual: object, operation: str) -> None:
        super().__init__(
            message=f"Shape mismatch: expected {expected}, got {actual}",
            details={
                "expected": expected,
                "actual": actual,
                "operation": operation,
            },
        )


class UnmappedModelError(NnError):
    """Raised when a tile-mapped forward pass finds no tiles for a weight matrix."""

    def __init__(self, parameter: str) -> None:
        super().__init__(
            message=f"No tile group mapped for '{parameter}'",
            details={"parameter": parameter},
        )


class TrainingDivergenceError(NnError):
    """Raised when a loss or gradient becomes non-finite."""

    def __init__(self, issue: str, step: int | None = None) -> None:
        super().__init__(
            message=f"Training diverged: {issue}",
            details={
                "issue": issue,
                "step": step,
            },
        )


class CheckpointError(NnError):
    """Raised when a checkpoint cannot be written or decoded."""

    def __init__(self, issue: str, path: str) -> None:
        super().__init__(
            message=f"Checkpoint error: {issue}",
            details={
                "issue": issue,
                "path": path,
            },
        )
