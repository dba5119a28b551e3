"""Exception types raised across the toolkit."""


class FinslerIsoError(Exception):
    """Base class for all toolkit errors."""


class BoundaryError(FinslerIsoError, ValueError):
    """A point lies too close to (or outside) the unit circle."""


class DomainError(FinslerIsoError, ValueError):
    pass


class ZeroVectorError(FinslerIsoError, ValueError):
    pass


class OriginError(FinslerIsoError, ValueError):
    """Evaluation at the origin, where the area integrand is singular."""


class OriginOnCurveError(OriginError):
    pass


class AmbiguousWindingError(FinslerIsoError, ValueError):
    pass


class NonPositiveRadiusError(FinslerIsoError, ValueError):
    pass


class DegenerateSpeedError(FinslerIsoError, ValueError):
    pass


class NonFiniteIntegrandError(FinslerIsoError, ArithmeticError):
    pass


class MaxDepthError(FinslerIsoError, RuntimeError):
    pass


class UnsupportedRegionError(FinslerIsoError, ValueError):
    pass


class InfeasibleError(FinslerIsoError, ValueError):
    pass


class SeedError(FinslerIsoError, ValueError):
    pass


class NonConvergenceError(FinslerIsoError, RuntimeError):
    """Ascent hit its iteration cap; the partial result is attached."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
