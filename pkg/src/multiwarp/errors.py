"""Exception hierarchy shared by every multiwarp module."""


class MultiwarpError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(MultiwarpError, ValueError):
    """A point lies outside the open domain of a function or interval."""


class PositivityError(MultiwarpError, ValueError):
    """A warping function (or ODE solution) is not strictly positive.

    ``t`` holds the first failing abscissa when it is known.
    """

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class ValidationError(MultiwarpError, ValueError):
    """A model object violates one of its structural invariants."""


class MissingDataError(MultiwarpError, ValueError):
    """Fiber curvature data needed by a formula is absent."""


class DegenerateError(MultiwarpError, ValueError):
    """A substitution is undefined because one of its hypotheses fails."""


class StarSystemError(MultiwarpError, ValueError):
    """The starred ODE system has no solution for the requested parameter."""


class InconsistentParameters(MultiwarpError, ValueError):
    """Classification inputs do not describe a single parameter tuple."""


class BracketError(MultiwarpError, RuntimeError):
    """Positive-root count changed when the search bracket was enlarged."""


class NonInvertibleError(MultiwarpError, ValueError):
    """The lapse transform cannot be inverted on the requested domain."""


class NoModelError(MultiwarpError, ValueError):
    """A fiber has no coordinate model, so no chart can be built."""


class SingularMetricError(MultiwarpError, ArithmeticError):
    """The coordinate metric is degenerate near the evaluation point."""


class StepTooLargeError(MultiwarpError, ArithmeticError):
    """Finite-difference extrapolation did not settle at the given step."""
