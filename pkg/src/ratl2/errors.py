"""Exception and warning types."""


class Ratl2Error(Exception):
    """Base class for all errors raised by the package."""


class DomainError(Ratl2Error, ValueError):
    """A point or polynomial lies where an operation is undefined."""


class DimensionError(Ratl2Error, ValueError):
    pass


class DegreeError(Ratl2Error, ValueError):
    pass


class BranchError(DomainError):
    """Evaluation requested on a branch cut without a side flag."""


class PoleCollisionError(DomainError):
    pass


class ResolutionError(Ratl2Error):
    """A discretization is too coarse for the requested accuracy."""


class VanishingOnCircleError(DomainError):
    """A function that must be zero-free on the unit circle is not."""


class ClassViolationError(Ratl2Error, ValueError):
    """A density fails the non-vanishing / bounded-argument-variation checks."""


class NumericalConsistencyError(Ratl2Error):
    """Two routes to the same quantity disagree beyond tolerance."""


class InconsistentProjectionError(NumericalConsistencyError):
    pass


class PreconditionError(Ratl2Error, ValueError):
    pass


class DegeneracyError(Ratl2Error):
    """A Hessian is (numerically) singular; its Morse index is undefined."""


class OrderingError(Ratl2Error, ValueError):
    def __init__(self, message, indices=()):
        super().__init__(message)
        self.indices = tuple(indices)


class TruncationError(ResolutionError):
    pass


class ConvergenceError(Ratl2Error):
    def __init__(self, message, history=()):
        super().__init__(message)
        self.history = list(history)


class CriterionInapplicable(Ratl2Error):
    pass


class ConditioningWarning(UserWarning):
    pass
