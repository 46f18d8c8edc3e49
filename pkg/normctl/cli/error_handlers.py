"""Error handlers for the command line."""

import json
import logging
import sys
from typing import Any, Dict, Optional, TextIO

from pydantic import ValidationError

from normctl.core.exceptions import NormControlException

logger = logging.getLogger(__name__)

EXIT_FAILURE = 1
EXIT_USAGE = 2


def _report(payload: Dict[str, Any], stream: Optional[TextIO]) -> None:
    stream = sys.stderr if stream is None else stream
    stream.write(json.dumps(payload, default=str) + "\n")


def normctl_exception_handler(exc: NormControlException, stream: Optional[TextIO] = None) -> int:
    """Handle normctl-specific exceptions."""
    logger.error(f"{exc.__class__.__name__}: {exc.message}")
    _report(
        {
            "error": exc.message,
            "detail": exc.detail,
            "type": exc.__class__.__name__
        },
        stream
    )
    return exc.exit_code


def validation_exception_handler(exc: ValidationError, stream: Optional[TextIO] = None) -> int:
    """Handle Pydantic validation errors."""
    _report(
        {
            "error": "Validation error",
            "detail": json.loads(exc.json()),
            "type": "ValidationError"
        },
        stream
    )
    return EXIT_USAGE


def general_exception_handler(exc: Exception, stream: Optional[TextIO] = None) -> int:
    """Handle general exceptions."""
    logger.exception("Unhandled error")
    _report(
        {
            "error": "Internal error",
            "detail": str(exc),
            "type": exc.__class__.__name__
        },
        stream
    )
    return EXIT_FAILURE


def handle_exception(exc: Exception, stream: Optional[TextIO] = None) -> int:
    """Route ``exc`` to its handler; returns the process exit code."""
    if isinstance(exc, NormControlException):
        return normctl_exception_handler(exc, stream)
    if isinstance(exc, ValidationError):
        return validation_exception_handler(exc, stream)
    if isinstance(exc, json.JSONDecodeError):
        _report({"error": "Malformed JSON", "detail": exc.msg, "type": "JSONDecodeError"}, stream)
        return EXIT_USAGE
    return general_exception_handler(exc, stream)
