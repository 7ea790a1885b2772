"""Exception hierarchy shared by all ssalib modules."""


class SsaError(Exception):
    """Base class for every error raised by ssalib."""


class ParameterError(SsaError, ValueError):
    """An argument is out of range or inconsistent with the session."""


class ValidationError(SsaError, ValueError):
    """Input data violates a series invariant (non-finite values, too short...)."""


class FormatError(ValidationError):
    """A series file could not be parsed.

    ``lineno`` is the 1-based line number of the offending line, if known.
    """

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class NumericalError(SsaError, ArithmeticError):
    """A linear-algebra routine failed or produced an unusable result."""


class ConvergenceError(NumericalError):
    """An iterative solver stopped before all requested triples converged."""

    def __init__(self, message, converged=0):
        super().__init__(message)
        self.converged = converged


class VerticalityError(NumericalError):
    """The chosen eigenvector subspace (nearly) contains the last unit vector.

    The forecasting recurrence is undefined in that case.
    """


class BootstrapError(NumericalError):
    """Too many bootstrap replicates failed."""


class StateError(SsaError, RuntimeError):
    """The requested quantity is not defined for this object state."""


class IoError(SsaError, OSError):
    """Reading or writing a file failed."""
