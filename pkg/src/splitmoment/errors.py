"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CapacityError(ValueError):
    """A request exceeds a configured size ceiling (sieve limit, oracle ceiling)."""


class AccuracyError(ArithmeticError):
    """A truncation or quadrature could not certify the requested tolerance."""


class VerificationError(AssertionError):
    """An exhaustive identity check found a counterexample.

    The offending inputs are kept on ``witness``.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
