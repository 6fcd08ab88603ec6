from __future__ import annotations


class TaskError(Exception):
    """Base exception for the synthetic task with message and optional details."""

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


class TaskConfigurationError(TaskError):
    """Raised when generator parameters are inconsistent."""

    def __init__(self, issue: str) -> None:
        super().__init__(
            message=f"Configuration error: {issue}",
            details={"issue": issue},
        )


class EmptySequenceError(TaskError):
    """Raised when alignment or scoring receives an empty sequence."""

    def __init__(self, operation: str) -> None:
        super().__init__(
            message="Sequence must not be empty",
            details={"operation": operation},
        )


class DatasetFormatError(TaskError):
    """Raised when a dataset text file cannot be parsed."""

    def __init__(self, issue: str, line: int | None = None) -> None:
        super().__init__(
            message=f"Malformed dataset: {issue}",
            details={
                "issue": issue,
                "line": line,
            },
        )
