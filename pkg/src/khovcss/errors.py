"""Exception types shared across the package."""


class KhovCSSError(Exception):
    """Base class for all package errors."""


class DiagramError(KhovCSSError, ValueError):
    """Malformed planar diagram data."""


class PreconditionError(KhovCSSError, ValueError):
    """An operation was called on input outside its domain."""


class DimensionMismatch(KhovCSSError, ValueError):
    """Matrix or vector shapes do not agree."""


class IntegrityError(KhovCSSError, ArithmeticError):
    """A structural identity (such as d∘d = 0) does not hold."""


class CapacityError(KhovCSSError, MemoryError):
    """A requested object exceeds the configured size cap."""


class EmptyCodeError(KhovCSSError, ValueError):
    """A code slice has no qubits."""


class UnsupportedFormat(KhovCSSError, ValueError):
    """Unknown export or import format tag."""
