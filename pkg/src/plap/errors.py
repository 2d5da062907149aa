"""Exception types shared across the package."""


class PlapError(Exception):
    """Base class for all package-specific errors."""


class SpecOutOfRange(PlapError):
    """A constructor or harness argument violates its documented range."""


class TooLarge(PlapError):
    """An input exceeds the exhaustive-computation size bound."""


class ExponentOutOfRange(PlapError):
    """The exponent p lies outside the supported range for the operation."""


class ZeroFunction(PlapError):
    """A vertex function that must be nonzero is identically zero."""


class BoundaryViolation(PlapError):
    """A Dirichlet test function is nonzero on a boundary vertex."""


class NoBoundary(PlapError):
    """The graph has no degree-one vertices but the operation needs some."""


class EmptyInterior(PlapError):
    """Every vertex is a boundary vertex; there is nothing to solve on."""


class Disconnected(PlapError):
    """The graph is not connected."""


class NotConverged(PlapError):
    """No solver start met the convergence tolerances.

    The best run found so far is attached as ``best`` (an ``EigenResult``
    with ``converged=False``) so callers can still report it.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
