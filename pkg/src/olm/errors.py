"""Exception types shared across the pipeline.

The CLI maps these onto exit codes, so raising the right class matters:
bad user input is a plain ValueError, everything below is a data or
processing failure.
"""


class OlmError(Exception):
    """Base class for data and processing errors."""


class FormatError(OlmError):
    """A file is not in the expected container format (magic, version, header)."""


class CorruptionError(OlmError):
    """A file declares lengths that do not match its payload."""


class ValidationError(OlmError):
    """Data violates a documented invariant (NaN, negative activation, ...)."""


class DimensionError(OlmError):
    """Operands have incompatible shapes."""


class InfeasibleError(OlmError):
    """The requested computation has no solution for this input."""


class NoObjectFoundError(OlmError):
    """The support map is empty; there is nothing to put a box around."""
