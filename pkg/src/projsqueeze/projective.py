"""Homogeneous coordinates, projective maps, cross-ratio, ball automorphisms.

An affine point x in R^d embeds as the homogeneous vector (1, x_1, ..., x_d).
A projective map is an invertible (d+1) x (d+1) matrix M acting on these
vectors; in the affine chart it is the fractional-linear map

    x  |->  (c + B x) / (a + w . x),       M = [[a, w^T], [c, B]].

Matrices are stored Frobenius-normalized with a canonical sign so that maps
can be compared entry-wise and optimizers can parameterize them without the
scale redundancy.
"""

import numpy as np

from .errors import (
    CoincidentPoints,
    ImageAtInfinity,
    NotCollinear,
    OutsideBall,
    SingularMap,
)

# Relative tolerance below which a dehomogenization divisor counts as zero.
AT_INFINITY_RTOL = 1e-12
# Determinant threshold for a Frobenius-normalized matrix.
SINGULAR_DET_TOL = 1e-12


def to_homogeneous(x):
    """Embed an affine point as (1, x_1, ..., x_d)."""
    x = np.asarray(x, dtype=float)
    return np.concatenate(([1.0], x))


def dehomogenize(h, rtol=AT_INFINITY_RTOL):
    """Return the affine representative of a homogeneous vector.

    Raises ``ImageAtInfinity`` when the leading coordinate is smaller than
    ``rtol`` times the vector norm.
    """
    h = np.asarray(h, dtype=float)
    scale = np.linalg.norm(h)
    if scale == 0.0 or abs(h[0]) < rtol * scale:
        raise ImageAtInfinity("homogeneous vector lies (numerically) at infinity")
    return h[1:] / h[0]


def normalize_homogeneous(h):
    """Canonical representative: unit norm, first nonzero coordinate positive."""
    h = np.asarray(h, dtype=float)
    n = np.linalg.norm(h)
    if n == 0.0:
        raise ValueError("zero vector has no projective class")
    h = h / n
    for v in h:
        if abs(v) > 1e-14:
            return h if v > 0 else -h
    return h


def _canonicalize(matrix):
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
        raise ValueError(f"projective matrix must be square of size >= 2, got {m.shape}")
    norm = np.linalg.norm(m)
    if not np.isfinite(norm) or norm == 0.0:
        raise SingularMap("matrix is zero or non-finite")
    m = m / norm
    flat = m.ravel()
    for v in flat:
        if abs(v) > 1e-14:
            if v < 0:
                m = -m
            break
    return m


class ProjectiveMap:
    """Invertible projective transformation in an affine chart of RP^d.

    Parameters
    ----------
    matrix : (d+1, d+1) array_like
        Any nonzero multiple of the homogeneous matrix.  Stored normalized to
        unit Frobenius norm with the first nonzero entry positive.

    Raises
    ------
    SingularMap
        If the normalized matrix has |det| below ``SINGULAR_DET_TOL``.
    """

    __slots__ = ("matrix", "dim")

    def __init__(self, matrix):
        m = _canonicalize(matrix)
        if abs(np.linalg.det(m)) < SINGULAR_DET_TOL:
            raise SingularMap("matrix is numerically singular")
        self.matrix = m
        self.matrix.setflags(write=False)
        self.dim = m.shape[0] - 1

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim + 1))

    @classmethod
    def affine(cls, linear, offset=None):
        """Map x |-> linear @ x + offset as a projective matrix."""
        linear = np.asarray(linear, dtype=float)
        d = linear.shape[0]
        if offset is None:
            offset = np.zeros(d)
        m = np.zeros((d + 1, d + 1))
        m[0, 0] = 1.0
        m[1:, 0] = np.asarray(offset, dtype=float)
        m[1:, 1:] = linear
        return cls(m)

    @classmethod
    def translation(cls, offset):
        offset = np.asarray(offset, dtype=float)
        return cls.affine(np.eye(len(offset)), offset)

    @classmethod
    def scaling(cls, factor, dim):
        return cls.affine(factor * np.eye(dim))

    # -- group operations ---------------------------------------------------

    def compose(self, other):
        """Return self o other (apply ``other`` first)."""
        return ProjectiveMap(self.matrix @ other.matrix)

    def __matmul__(self, other):
        return self.compose(other)

    def inverse(self):
        try:
            inv = np.linalg.inv(self.matrix)
        except np.linalg.LinAlgError as exc:
            raise SingularMap("matrix inversion failed") from exc
        return ProjectiveMap(inv)

    # -- chart action -------------------------------------------------------

    def apply(self, point):
        """Image of an affine point; raises ``ImageAtInfinity`` if undefined."""
        return dehomogenize(self.matrix @ to_homogeneous(point))

    def apply_batch(self, points):
        """Vectorized ``apply`` for an (n, d) array of affine points."""
        points = np.asarray(points, dtype=float)
        h = np.column_stack([np.ones(len(points)), points])
        img = h @ self.matrix.T
        w = img[:, 0]
        scale = np.linalg.norm(img, axis=1)
        bad = np.abs(w) < AT_INFINITY_RTOL * scale
        if np.any(bad):
            raise ImageAtInfinity(f"{int(bad.sum())} of {len(points)} images at infinity")
        return img[:, 1:] / w[:, None]

    def denominator(self, point):
        """Value of the dehomogenization divisor a + w . x at an affine point."""
        return float(self.matrix[0, 0] + self.matrix[0, 1:] @ np.asarray(point, dtype=float))

    def differential(self, point):
        """Jacobian of the chart action at ``point``.

        Computed from the quotient rule on homogeneous coordinates:
        with numerator n(x) = c + B x and divisor w(x) = a + w . x,
        the Jacobian is B / w - n w^T / w^2.
        """
        x = np.asarray(point, dtype=float)
        a = self.matrix[0, 0]
        wrow = self.matrix[0, 1:]
        c = self.matrix[1:, 0]
        bmat = self.matrix[1:, 1:]
        w = a + wrow @ x
        scale = np.linalg.norm(self.matrix @ to_homogeneous(x))
        if abs(w) < AT_INFINITY_RTOL * scale:
            raise ImageAtInfinity("differential undefined: image at infinity")
        n = c + bmat @ x
        return bmat / w - np.outer(n, wrow) / w**2

    # -- comparison ---------------------------------------------------------

    def same_as(self, other, tol=1e-10):
        """Entry-wise equality of the canonical matrices."""
        return bool(np.allclose(self.matrix, other.matrix, atol=tol))

    def __repr__(self):
        return f"ProjectiveMap(dim={self.dim})"


def cross_ratio(a, p, q, b):
    """Cross ratio (ab; pq) of four collinear affine points.

    Using the signed parameter t of each point along the line through a and b,
    returns (t_q - t_a)(t_p - t_b) / ((t_p - t_a)(t_q - t_b)).  With this
    convention the Hilbert distance |log (ab; pq)| of an interval agrees with
    the integrated ray-exit metric.

    Raises
    ------
    NotCollinear
        If any of the four points is farther than 1e-9 times their diameter
        from the line through a and b.
    CoincidentPoints
        If a denominator underflows (p ~ a or q ~ b, or a ~ b).
    """
    a, p, q, b = (np.asarray(v, dtype=float) for v in (a, p, q, b))
    pts = np.stack([a, p, q, b])
    diameter = max(np.linalg.norm(u - v) for u in pts for v in pts)
    if diameter == 0.0:
        raise CoincidentPoints("all four points coincide")
    axis = b - a
    axis_len = np.linalg.norm(axis)
    if axis_len < 1e-14 * diameter:
        raise CoincidentPoints("endpoints a and b coincide")
    u = axis / axis_len
    for x in (p, q):
        v = x - a
        perp = v - (v @ u) * u
        if np.linalg.norm(perp) > 1e-9 * diameter:
            raise NotCollinear("points are not collinear within tolerance")
    t_a, t_b = 0.0, axis_len
    t_p = (p - a) @ u
    t_q = (q - a) @ u
    num = (t_q - t_a) * (t_p - t_b)
    den = (t_p - t_a) * (t_q - t_b)
    if abs(den) < 1e-15 * diameter**2:
        raise CoincidentPoints("cross-ratio denominator underflows")
    return num / den


def ball_automorphism(a):
    """Projective automorphism of the unit ball sending ``a`` to the origin.

    Realized as the hyperbolic boost in O(d,1) acting on the homogeneous
    coordinates of the ball's projective (Klein) model: a boost along a/|a|
    with rapidity artanh |a|.  The map preserves the unit sphere and is an
    isometry of the Hilbert metric of the ball.

    Raises ``OutsideBall`` when |a| >= 1 - 1e-12.
    """
    a = np.asarray(a, dtype=float)
    d = len(a)
    r = np.linalg.norm(a)
    if r >= 1.0 - 1e-12:
        raise OutsideBall(f"|a| = {r:.17g} is not inside the unit ball")
    if r < 1e-15:
        return ProjectiveMap.identity(d)
    e = a / r
    chi = np.arctanh(r)
    ch, sh = np.cosh(chi), np.sinh(chi)
    m = np.zeros((d + 1, d + 1))
    m[0, 0] = ch
    m[0, 1:] = -sh * e
    m[1:, 0] = -sh * e
    m[1:, 1:] = np.eye(d) + (ch - 1.0) * np.outer(e, e)
    return ProjectiveMap(m)


def orthant_ball_map(d):
    """Projective map taking the shifted orthant (-1, inf)^d into the unit ball.

    The chart action is x |-> x / (sqrt(d) (d + 1 + sum_i x_i)); it fixes the
    origin and maps any ball B(0, r) onto a set containing
    B(0, r / (d r + sqrt(d) (d + 1))).
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    m = np.zeros((d + 1, d + 1))
    m[0, 0] = d + 1.0
    m[0, 1:] = 1.0
    m[1:, 1:] = np.eye(d) / np.sqrt(d)
    return ProjectiveMap(m)


def orthant_ball_radius(d, r):
    """Radius of the ball certified inside the image of B(0, r) by ``orthant_ball_map``."""
    return r / (d * r + np.sqrt(d) * (d + 1.0))


def ball_to_paraboloid(delta, dim):
    """Projective map of the unit ball onto the paraboloid {x_1 < -|x'|^2}.

    The chart action is y |-> (delta (y_1 - 1), sqrt(delta) y') / (1 + y_1);
    the origin goes to (-delta, 0, ..., 0) and the unit sphere maps onto the
    paraboloid boundary {x_1 = -|x'|^2}.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    m = np.zeros((dim + 1, dim + 1))
    m[0, 0] = 1.0
    m[0, 1] = 1.0
    m[1, 0] = -delta
    m[1, 1] = delta
    if dim > 1:
        m[2:, 2:] = np.sqrt(delta) * np.eye(dim - 1)
    return ProjectiveMap(m)
