"""Exception hierarchy shared by every rffuq module."""


class RffUQError(Exception):
    """Base class for all errors raised by rffuq."""


class DimensionMismatch(RffUQError, ValueError):
    pass


class InvalidConfig(RffUQError, ValueError):
    pass


class NonFinite(RffUQError, ValueError):
    pass


class FactorizationFailure(RffUQError, ArithmeticError):
    """Cholesky failed at every jitter level; the upstream covariance is badly conditioned."""


class DivergedOptimization(RffUQError, RuntimeError):
    pass


class EmptyObservation(RffUQError, ValueError):
    pass


class IndexOutOfRange(RffUQError, IndexError):
    pass


class InsufficientSamples(RffUQError, ValueError):
    pass


class EmptyInput(RffUQError, ValueError):
    pass


class TrialFailed(RffUQError, RuntimeError):
    """An experiment unit raised; carries the trial index and feature count."""

    def __init__(self, trial: int, J: int, cause: BaseException):
        super().__init__(f"trial {trial} (J={J}) failed: {type(cause).__name__}: {cause}")
        self.trial = trial
        self.J = J


class IoError(RffUQError, OSError):
    pass
