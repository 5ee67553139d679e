"""Exception types shared across the package."""


class OrigamiError(ValueError):
    """Base class for invalid origami input."""


class NotConnected(OrigamiError):
    pass


class SizeMismatch(OrigamiError):
    pass


class DimensionMismatch(ValueError):
    pass


class SingularMatrix(ValueError):
    pass


class OrbitTooLarge(RuntimeError):
    pass


class DegenerateStream(ArithmeticError):
    pass


class NoConvergence(RuntimeError):
    pass


class NotInvariant(ValueError):
    pass


class HypothesisFailure(ValueError):
    pass


class PreconditionViolated(ValueError):
    """A transport formula was called outside its hypotheses.

    ``value`` holds the offending exact pairing.
    """

    def __init__(self, message, value=None):
        super().__init__(message if value is None else f"{message} (got {value})")
        self.value = value
