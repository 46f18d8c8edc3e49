"""Custom exceptions for normctl."""

from typing import Any, Dict, Optional


class NormControlException(Exception):
    """Base exception for normctl operations."""

    def __init__(self, message: str, exit_code: int = 1, detail: Optional[Dict[str, Any]] = None):
        self.message = message
        self.exit_code = exit_code
        self.detail = detail or {}
        super().__init__(self.message)


class StructuralError(NormControlException):
    """Exception raised when elements of different algebras are combined."""

    def __init__(self, left: str, right: str):
        super().__init__(
            message=f"Cannot combine {left} with {right}",
            detail={"left": left, "right": right}
        )


class DomainError(NormControlException):
    """Exception raised when an operation's precondition does not hold."""

    def __init__(self, message: str, detail: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, detail=detail)


class NotInvertibleError(DomainError):
    """Exception raised when an element is not invertible in the C*-algebra."""

    def __init__(self, measured: float, threshold: float):
        super().__init__(
            message=f"Element is not invertible: smallest modulus {measured:.3e} <= {threshold:.3e}",
            detail={"measured": measured, "threshold": threshold}
        )


class NumericError(NormControlException):
    """Exception raised when an iterative kernel fails to converge."""

    def __init__(self, message: str, detail: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, detail=detail)


class TruncationError(NormControlException):
    """Exception raised when a truncated series exhausts its budget."""

    def __init__(self, message: str, achieved: float, detail: Optional[Dict[str, Any]] = None):
        payload = {"achieved": achieved}
        payload.update(detail or {})
        super().__init__(message=message, detail=payload)


class DivergenceError(NormControlException):
    """Exception raised when an infinite product diverges."""

    def __init__(self, v: float):
        super().__init__(
            message=f"Product diverges: v = {v} is not below 1",
            detail={"v": v}
        )


class UsageError(NormControlException):
    """Exception raised for malformed configuration or arguments."""

    def __init__(self, message: str, errors: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=message,
            exit_code=2,
            detail=errors or {}
        )
