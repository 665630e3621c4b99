"""Exception types raised by the numerical core."""


class InvalidDimensionError(ValueError):
    """Block count or ambient dimension outside the supported range."""


class SingularityError(ValueError):
    """Evaluation at the origin of an unregularized potential."""


class OutsideSupportError(ValueError):
    """Point outside the cone |y| < |z| where the construction lives."""


class EndpointPairError(ValueError):
    """The mass-conservation pair (inf, 2) where the pipeline excludes it."""


class GridTooCoarseError(ValueError):
    """Discretization grid with too few points per direction."""


class ConvergenceError(RuntimeError):
    """Iterative solver did not converge.

    The ``diagnostics`` dict carries iteration counts and partial results.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
