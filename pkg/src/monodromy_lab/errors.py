"""Exception taxonomy shared across the package."""


class MonodromyLabError(Exception):
    """Base class for all package-specific failures."""


class InvalidParameterError(MonodromyLabError):
    """A configuration value is outside its allowed range."""


class DegenerateIntersectionError(MonodromyLabError):
    """Two parallel (or identical) lines were asked for their crossing."""


class GenericityError(MonodromyLabError):
    """The line family is not in general position (concurrent triple)."""


class CountMismatchError(MonodromyLabError):
    """A critical-point or cycle census disagrees with the expected census."""


class NonOrthogonalGroupError(MonodromyLabError):
    """Two cycles sharing a critical value have nonzero intersection."""


class TraceFailureError(MonodromyLabError):
    """A level-curve trace failed to close or left its containing face."""


class PoleProximityError(MonodromyLabError):
    """A quadrature node sits too close to a pole of the integrand."""
