from __future__ import annotations


class EvaluatorError(Exception):
    """Base exception for accuracy, throughput, area and sweep evaluation."""

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


class EvaluatorConfigurationError(EvaluatorError):
    """Raised when an evaluator component is configured incorrectly."""

    def __init__(self, issue: str, stage: str) -> None:
        super().__init__(
            message=f"Configuration error: {issue}",
            details={
                "issue": issue,
                "stage": stage,
            },
        )


class SweepAxisError(EvaluatorError):
    """Raised when a sweep axis names an unknown key or holds no values."""

    def __init__(self, axis: str, issue: str) -> None:
        super().__init__(
            message=f"Invalid sweep axis '{axis}': {issue}",
            details={
                "axis": axis,
                "issue": issue,
            },
        )


class EmptyGridError(EvaluatorError):
    """Raised when a sweep expands to no cells."""

    def __init__(self) -> None:
        super().__init__(message="Sweep grid is empty")


class SweepCellError(EvaluatorError):
    """Raised when a sweep cell fails on an executor."""

    def __init__(self, index: int, issue: str) -> None:
        super().__init__(
            message=f"Sweep cell {index} failed: {issue}",
            details={
                "index": index,
                "issue": issue,
            },
        )
