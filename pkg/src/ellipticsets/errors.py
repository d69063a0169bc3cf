"""Exception types raised across the package."""


class EllipticSetsError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(EllipticSetsError, ValueError):
    pass


class SingularShift(EllipticSetsError, ValueError):
    """``I - delta*X`` is not invertible with ``|delta X| < 1``."""


class InvalidSpec(EllipticSetsError, ValueError):
    pass


class PointOutsideDomain(EllipticSetsError, ValueError):
    pass


class NoBracket(EllipticSetsError, RuntimeError):
    """Level-set membership does not change sign along the ray ``X + tI``."""


class InvalidCount(EllipticSetsError, ValueError):
    pass


class InvalidRadius(EllipticSetsError, ValueError):
    pass


class NoAcceptedSamples(EllipticSetsError, RuntimeError):
    pass


class BallOutsideDomain(EllipticSetsError, ValueError):
    pass


class ZeroCoefficient(EllipticSetsError, ValueError):
    pass


class PreconditionNotMet(EllipticSetsError, ValueError):
    pass


class OnAxis(EllipticSetsError, ValueError):
    pass


class NoTouchingFound(EllipticSetsError, RuntimeError):
    pass


class NoPositiveMax(EllipticSetsError, ValueError):
    pass


class BoundaryViolation(EllipticSetsError, ValueError):
    pass


class ParseError(InvalidSpec):
    """Malformed operator file; ``field`` and ``line`` locate the problem when known."""

    def __init__(self, message, field=None, line=None):
        super().__init__(message)
        self.field = field
        self.line = line


class ConfigError(EllipticSetsError, ValueError):
    """Command-line configuration is missing or invalid."""
