"""Exception types shared across the package.

``GeometryError`` subclasses signal violated preconditions of geometric
operations (point not interior, map degenerate at the requested point, ...).
``BodySpecError`` signals an invalid body-specification file and carries the
offending line number.
"""


class GeometryError(Exception):
    """Base class for geometric precondition violations."""


class ImageAtInfinity(GeometryError):
    """The projective image of the point lies on the hyperplane at infinity."""


class SingularMap(GeometryError):
    """The matrix of a projective map is numerically singular."""


class NotCollinear(GeometryError):
    """Cross-ratio requested for four points that do not lie on one line."""


class CoincidentPoints(GeometryError):
    """A cross-ratio denominator underflows because two points coincide."""


class OutsideBall(GeometryError):
    """Ball automorphism requested for a point not inside the unit ball."""


class PointNotInterior(GeometryError):
    """The base point of a metric or squeezing query is not inside the body."""


class OriginNotInterior(PointNotInterior):
    """Radius-at-origin query on a body that does not contain the origin."""


class Unbounded(GeometryError):
    """Circumradius or witness requested for an unbounded body."""


class UnsupportedDimension(GeometryError):
    """Operation only available in a restricted dimension (hulls are 2D)."""


class NotStrictlyConvex(GeometryError):
    """Boundary point fails the positive-definite tangential Hessian test."""


class NoUniqueProjection(GeometryError):
    """Nearest-boundary-point iteration did not converge to a single foot."""


class SingularHyperplaneCrossing(GeometryError):
    """A projective map's singular hyperplane meets the body being pushed."""


class SegmentExits(GeometryError):
    """A quadrature node of an integrated-distance segment left the body."""


class BodySpecError(Exception):
    """Invalid body specification text.

    Parameters
    ----------
    message : str
        Description of the problem.
    line : int or None
        1-based line number in the specification text, when known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
