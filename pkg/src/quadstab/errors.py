"""Exception hierarchy shared by all quadstab modules."""


class QuadstabError(Exception):
    pass


class InvalidArgument(QuadstabError, ValueError):
    pass


class InvalidModel(InvalidArgument):
    pass


class InvalidSpec(InvalidArgument):
    pass


class DegenerateDetuning(InvalidArgument):
    """Raised when |Delta| is too close to Omega for the dispersive formulas."""


class NumericFailure(QuadstabError, ArithmeticError):
    pass


class DivergedError(NumericFailure):
    """Propagation overflowed; ``last_finite_time`` is the last good sample."""

    def __init__(self, msg, last_finite_time=None):
        super().__init__(msg)
        self.last_finite_time = last_finite_time


class InternalError(QuadstabError, RuntimeError):
    """A consistency check on a hand-transcribed formula failed."""
