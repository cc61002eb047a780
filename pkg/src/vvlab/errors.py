"""Exception hierarchy shared by all vvlab modules."""


class VVLabError(Exception):
    """Base class for every error raised by vvlab."""


class ConfigurationError(VVLabError):
    """Inconsistent or incomplete configuration (grids, regions, sample sets)."""


class ParameterError(VVLabError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class DomainError(VVLabError, ValueError):
    """A function was evaluated outside its domain of definition."""


class EvaluationError(VVLabError, ArithmeticError):
    """A constitutive function returned a non-finite value."""


class PreconditionError(VVLabError):
    """Input violates a documented precondition of an operation."""


class IntegrationError(VVLabError):
    """The time integrator had to abort.

    ``cell`` is the flat index of the offending cell when one is known.
    """

    def __init__(self, message, cell=None, time=None):
        super().__init__(message)
        self.cell = cell
        self.time = time


class SmoothnessError(IntegrationError):
    """The Euler run left its smooth regime (gradient blow-up proxy tripped)."""
