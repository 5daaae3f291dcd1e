"""Error hierarchy shared by every layer.

Each failure carries a stable machine-readable ``code`` (an UPPER_SNAKE
tag such as ``BAD_TIME`` or ``PAGE_OCCUPIED``) so callers can branch on
the code without parsing message text.
"""

from __future__ import annotations


class CloudPassError(Exception):
    """Base class for all domain failures."""

    def __init__(self, code: str, message: str | None = None):
        super().__init__(message if message is not None else code)
        self.code = code


class ValidationError(CloudPassError):
    """A value violates one of its declared invariants."""


class AuthError(CloudPassError):
    """Session, credential, captcha, or OTP failure."""


class QrError(CloudPassError):
    """Segmentation or link-token failure."""


class NfcError(CloudPassError):
    """Proximity channel or tap protocol failure."""


class CloudError(CloudPassError):
    """Authority or airport store failure."""


class DeskError(CloudPassError):
    """Immigration desk misuse (not a traveler outcome)."""


class ScenarioParseError(CloudPassError):
    """Scenario text rejected before execution; points at line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__("PARSE_ERROR", f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ScenarioRuntimeError(CloudPassError):
    """A command failed mid-run; ``index`` is the failing command position."""

    def __init__(self, index: int, cause: Exception):
        super().__init__("RUNTIME_FAULT", f"command {index}: {cause}")
        self.index = index
        self.cause = cause
