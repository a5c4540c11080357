"""Exception hierarchy shared across the toolchain.

For out-of-range feature indices and backend deadlines the builtin
IndexError and TimeoutError are raised directly.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .source import SourceSpan


class NomosError(Exception):
    """Base class for all errors raised by this package."""


class LexError(NomosError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(message)
        self.span = span


class ParseError(NomosError):
    def __init__(self, message: str, span: SourceSpan, expected: frozenset[str] = frozenset()):
        super().__init__(message)
        self.span = span
        self.expected = expected


class SemaError(NomosError):
    """Raised by the checker when at least one error-severity diagnostic exists."""

    def __init__(self, diagnostics):
        super().__init__("; ".join(d.render() for d in diagnostics))
        self.diagnostics = list(diagnostics)


class EvalError(NomosError):
    """Runtime failure while interpreting a spec (kind mismatch, unbound read, ...)."""

    def __init__(self, message: str, span: SourceSpan | None = None):
        super().__init__(message)
        self.span = span


class KindError(NomosError):
    """A value of the wrong kind reached a builtin function or backend."""


class RangeError(NomosError):
    """Empty range passed to a random draw (lo > hi)."""


class ProvenanceError(NomosError):
    """label() applied to a synthesized or modified record."""


class SchemaError(NomosError):
    def __init__(self, message: str, row: int | None = None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class ModelFormatError(NomosError):
    """Malformed model file."""


class DimError(NomosError):
    """Input length does not match a network's first layer."""


class ProtocolError(NomosError):
    """Malformed message on the child-process wire."""


class BackendError(NomosError):
    """The model backend reported an error or lacks the requested operation."""


class RetryExhausted(NomosError):
    """Too many consecutive precondition failures; the precondition is likely unsatisfiable."""

    def __init__(self, attempts: int):
        super().__init__(f"precondition not satisfied after {attempts} consecutive attempts")
        self.attempts = attempts


class ConfigError(NomosError):
    """Invalid run configuration (budget < 1, bad binding, ...)."""
