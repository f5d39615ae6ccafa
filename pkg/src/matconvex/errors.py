"""Exception hierarchy shared across the library."""


class MatConvexError(Exception):
    """Base class for all library errors."""


class HermiticityError(MatConvexError, ValueError):
    """Input matrix is not Hermitian within tolerance."""


class DimensionMismatchError(MatConvexError, ValueError):
    """Operands have incompatible shapes or tensor factorizations."""


class DomainViolationError(MatConvexError, ValueError):
    """An eigenvalue escaped the admissible spectrum window of a function.

    Carries the offending eigenvalue in ``eigenvalue`` and, when known, a
    label for the matrix it came from in ``source``.
    """

    def __init__(self, message, eigenvalue=None, source=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.source = source


class ConditioningError(MatConvexError, ValueError):
    """An operand is too close to singular for the requested operation."""


class UnboundedWindowError(MatConvexError, ValueError):
    """A compact spectrum window is required; pass a bounded sub-window."""


class UnsupportedArityError(MatConvexError, ValueError):
    """The requested tuple length is not supported by this code path."""


class ValidationError(MatConvexError, ValueError):
    """A serialized object violates its schema or invariants."""
