"""Exception hierarchy shared by every invkit module."""


class InvkitError(Exception):
    """Base class for all library errors."""


class RingMismatchError(InvkitError, TypeError):
    """Operands live in different rings (field, variables or order differ)."""


class ParseError(InvkitError, ValueError):
    """An expression violates the polynomial grammar.

    ``position`` is the 0-based character offset of the offending token.
    """

    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}")


class InseparableError(InvkitError, ValueError):
    """Characteristic-p input with a factor whose multiplicity is divisible by p."""


class ResourceLimitError(InvkitError, RuntimeError):
    """A Groebner computation exceeded the configured budget."""

    def __init__(self, what, limit, observed):
        self.what = what
        self.limit = limit
        self.observed = observed
        super().__init__(f"{what} budget exceeded: {observed} > {limit}")


class FactorizationError(InvkitError, ValueError):
    """An operation needs irreducible components that could not be certified."""


class NotAUnitError(InvkitError, ValueError):
    """An element that should be a unit of the chart has a residual factor.

    The remedy is to enlarge the inverted set of the source chart.
    """

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class PreconditionError(InvkitError, ValueError):
    """Input data violates a documented precondition."""

    def __init__(self, message, details=None):
        self.details = details or []
        super().__init__(message)


class HypothesisRefused(InvkitError):
    """A pipeline refuses to run because a theorem hypothesis fails."""

    def __init__(self, message, details=None):
        self.details = details or []
        super().__init__(message)
