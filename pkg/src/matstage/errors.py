"""Error hierarchy shared by the engine and the HTTP layer.

Every error carries a stable ``code`` so transports can map it without
string matching on messages.
"""

from __future__ import annotations


class StagingError(Exception):
    """Base class for all domain errors."""

    code = "validation"

    def __init__(self, message: str, detail: object = None):
        super().__init__(message)
        self.message = message
        self.detail = detail


class ValidationError(StagingError):
    code = "validation"


class NotFoundError(StagingError):
    code = "not_found"


class ConflictError(StagingError):
    code = "conflict"


class StaleVersionError(StagingError):
    code = "stale_version"


class ForbiddenTransitionError(StagingError):
    code = "forbidden_transition"
