"""Exception types shared across the library."""


class CurvcertError(Exception):
    """Base class for library errors."""


class DomainError(CurvcertError):
    """A chart point (or trajectory) left the truncated chart domain.

    When raised by a trajectory integrator the exception carries the
    partial result reached before truncation in ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class DegenerateInputError(CurvcertError):
    """Degenerate geometric input (zero vector, collapsed plane, x = base)."""


class QuadratureError(CurvcertError):
    """Order-doubling discrepancy above tolerance; carries the estimate."""

    def __init__(self, message, estimate=None, discrepancy=None):
        super().__init__(message)
        self.estimate = estimate
        self.discrepancy = discrepancy


class ClosednessError(CurvcertError):
    """Source form failed the closedness audit required by the primitive operator."""


class ValidationError(CurvcertError):
    """Invalid configuration or operation preconditions."""


class SchemaError(CurvcertError):
    """Result record does not match the shipped output schema."""
