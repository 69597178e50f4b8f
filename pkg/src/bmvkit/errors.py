"""Exception types shared across the toolkit."""


class BmvError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(BmvError, ValueError):
    """Operands have incompatible dimensions."""


class DomainError(BmvError, ValueError):
    """Input lies outside the mathematical domain of an operation."""


class ExactInputError(BmvError, TypeError):
    """Exact arithmetic was requested on inputs without rational entries."""


class ImaginaryResidueError(BmvError, ArithmeticError):
    """A quantity that should be real carried a large imaginary part.

    This signals an implementation bug, not a property of the inputs.
    """


class CheckFailure(BmvError):
    """A mathematical identity or gate that must hold was violated."""
