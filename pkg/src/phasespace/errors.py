"""Exception types shared across the package."""


class PhaseSpaceError(Exception):
    """Base class for all package errors."""


class UsageError(PhaseSpaceError, ValueError):
    """Invalid argument combination or out-of-range input."""


class NotPrime(UsageError):
    pass


class ReducibleModulus(UsageError):
    pass


class DivisionByZero(PhaseSpaceError, ZeroDivisionError):
    pass


class ShapeMismatch(UsageError):
    pass


class WrongDimension(UsageError):
    pass


class NotNormalized(UsageError):
    pass


class UnknownScheme(UsageError):
    pass


class InvalidDirection(UsageError):
    pass


class VerificationError(PhaseSpaceError):
    """A numerical verification exceeded its tolerance.

    ``residual`` holds the offending value; the CLI maps every subclass to
    exit status 2.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotRankOneProjector(VerificationError):
    pass


class ClosureFailure(VerificationError):
    pass


class AcceptabilityFailure(VerificationError):
    pass


class ResidualExceeded(VerificationError):
    pass
