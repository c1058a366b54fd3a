"""Exception types raised by the library.

Every error carries a short machine-readable ``kind`` (the class name) and an
optional ``context`` dict that the CLI serializes into its error payload.
"""


class SU2DetError(Exception):
    """Base class for all library errors."""

    def __init__(self, message, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    @property
    def kind(self):
        return type(self).__name__


class InvalidInput(SU2DetError):
    """Malformed or non-finite numerical input."""


class PoleAtExpansionPoint(SU2DetError):
    """A power series was requested at (or too close to) its pole."""


class NoConvergence(SU2DetError):
    """Newton iteration ran out of iterations.

    ``best`` holds the iterate with the smallest residual norm seen and
    ``residual`` its norm.
    """

    def __init__(self, message, best=None, residual=None, **context):
        super().__init__(message, residual=residual, **context)
        self.best = best
        self.residual = residual


class SingularJacobian(SU2DetError):
    """The Newton Jacobian could not be inverted even after damping."""


class CoincidentRapidities(SU2DetError):
    """Two rapidities that must differ are (numerically) equal."""


class InvalidGeometry(SU2DetError):
    """Inconsistent counts for a scalar product or three-point geometry."""


class CollidingRoots(SU2DetError):
    """The Bethe solver returned two (numerically) coincident roots."""


class TooLarge(SU2DetError):
    """The requested Hilbert space exceeds the configured size cap."""


class UnverifiedRoots(SU2DetError):
    """Rapidities fail the Bethe equations but an on-shell formula was requested."""


class ParseError(SU2DetError):
    """Malformed trace word; ``position`` is the 0-based offending offset."""

    def __init__(self, message, position, **context):
        super().__init__(message, position=position, **context)
        self.position = position


class WrongSector(SU2DetError):
    """A field is not allowed for the requested operator role and side."""
