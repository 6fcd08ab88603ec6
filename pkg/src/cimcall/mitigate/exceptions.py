from __future__ import annotations


class MitigationError(Exception):
    """Base exception for accuracy-mitigation techniques."""

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


class MitigationConfigurationError(MitigationError):
    """Raised when a technique is configured outside its documented range."""

    def __init__(self, issue: str, stage: str) -> None:
        super().__init__(
            message=f"Configuration error: {issue}",
            details={
                "issue": issue,
                "stage": stage,
            },
        )


class EmptyRecipeError(MitigationError):
    """Raised when a recipe with no techniques is applied."""

    def __init__(self) -> None:
        super().__init__(message="Mitigation recipe is empty")


class NoTrainableParametersError(MitigationError):
    """Raised when online retraining is given an empty mask."""

    def __init__(self) -> None:
        super().__init__(message="RSA mask selects no weights to retrain")


class MaskMismatchError(MitigationError):
    """Raised when a mask does not match the weights or tiles it refers to."""

    def __init__(self, name: str, expected: object, actual: object) -> None:
        super().__init__(
            message=f"Mask for '{name}' has shape {actual}, expected {expected}",
            details={
                "name": name,
                "expected": expected,
                "actual": actual,
            },
        )
