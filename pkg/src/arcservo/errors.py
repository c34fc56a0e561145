"""Exception types shared across the package."""


class ArcServoError(Exception):
    """Base class for all library errors."""


class InputError(ArcServoError):
    """Unusable input: bad file, bad config key/value, malformed cloud."""


class DegenerateGeometryError(ArcServoError):
    """Input admits no unique geometric solution (collinear points,
    grasp off the arc plane, coincident frame axes, ...)."""


class AmbiguousCaseError(ArcServoError):
    """Sector counts tie; the arc topology case cannot be decided."""


class InconsistentGeometryError(ArcServoError):
    """Quantities violate the arc model beyond tolerance (cosine outside
    [-1, 1], swept angle above a full turn, chord at least rod length)."""


class SingularConfigurationError(ArcServoError):
    """Configuration where a constraint Jacobian loses rank (grasp
    diametrically opposite the fixed end, near-straight rod)."""


class NumericalFaultError(ArcServoError):
    """Non-finite value produced inside the control loop."""
