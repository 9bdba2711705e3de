"""Exception types shared across the package."""


class GeomoptError(Exception):
    """Base class for all errors raised by geomopt."""


class InputError(GeomoptError, ValueError):
    """Invalid argument: bad dimensions, non-finite entries, infeasible start."""


class DegenerateMatrixError(GeomoptError, ValueError):
    """Matrix has no usable spectrum (zero matrix, rank-deficient beyond tolerance)."""


class DomainError(GeomoptError, ValueError):
    """Evaluation requested outside the domain of the nonsmooth term."""


class PreconditionError(GeomoptError, ValueError):
    """A formula's hypothesis is violated (e.g. smoothness below curvature/2)."""


class SizeCapError(GeomoptError, ValueError):
    """System exceeds the exact-enumeration size cap."""


class NotOptimalError(GeomoptError, ValueError):
    """Candidate solution fails its optimality (KKT) check beyond tolerance."""


class ClassificationError(GeomoptError, ValueError):
    """Index cannot be classified as active/inactive: degenerate instance."""


class SamplingError(GeomoptError, RuntimeError):
    """No admissible sample found for an empirical estimate."""


class NumericalError(GeomoptError, RuntimeError):
    """Numerical failure: non-finite values or non-convergent subroutine."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConfigError(GeomoptError, ValueError):
    """Malformed configuration file or command line."""
