"""Exception types shared across the package."""


class JumpCodeError(ValueError):
    """Base class for all package errors."""


class InvalidBasisState(JumpCodeError):
    pass


class DimensionMismatch(JumpCodeError):
    pass


class InvalidQubitIndex(JumpCodeError):
    pass


class NotNormalized(JumpCodeError):
    pass


class InvalidDuration(JumpCodeError):
    pass


class StepTooLarge(JumpCodeError):
    pass


class TooLargeForOracle(JumpCodeError):
    pass


class RecoveryUnavailable(JumpCodeError):
    pass


class OddLengthUnsupported(JumpCodeError):
    pass


class InvalidParameters(JumpCodeError):
    pass


class JumpAnnihilatesCode(JumpCodeError):
    pass


class NotRecoverable(JumpCodeError):
    pass


class UnsupportedOrder(JumpCodeError):
    pass


class InvalidSeed(JumpCodeError):
    pass


class SearchExhausted(JumpCodeError):
    """Raised when a design search finishes without a certified solution.

    ``explored`` counts the candidate classes that were examined.
    """

    def __init__(self, message: str, explored: int = 0):
        super().__init__(message)
        self.explored = explored
