from __future__ import annotations


class WorkflowError(Exception):
    """Base exception for pipeline runs with message and optional details."""

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


class SelfCheckError(WorkflowError):
    """Raised when a finished run violates a result invariant."""

    def __init__(self, check: str, issue: str) -> None:
        super().__init__(
            message=f"Self-check '{check}' failed: {issue}",
            details={
                "check": check,
                "issue": issue,
            },
        )


class CheckpointMismatchError(WorkflowError):
    """Raised when a checkpoint does not fit the configured model section."""

    def __init__(self, expected: object, actual: object, path: str) -> None:
        super().__init__(
            message=f"Checkpoint shape {actual} does not match configured {expected}",
            details={
                "expected": expected,
                "actual": actual,
                "path": path,
            },
        )
