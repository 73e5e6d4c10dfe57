"""Projective Finsler metrics, the Hilbert distance, and integrated length.

The infinitesimal metric at p along X is F(p; X) = 1/P_plus + 1/P_minus,
where P_plus and P_minus are the ray-exit parameters of p +- lambda X and X
is deliberately left unnormalized (F is 1-homogeneous in X).  On a convex
body the integral of F along a chord telescopes to the Hilbert distance
|log (ab; pq)| of the chord endpoints.
"""

from dataclasses import dataclass

import numpy as np

from .bodies import UnionBody, convex_hull
from .errors import PointNotInterior, SegmentExits
from .projective import cross_ratio


@dataclass(frozen=True)
class MetricSample:
    """One metric evaluation; C is None when the hull route was not taken."""

    p: np.ndarray
    X: np.ndarray
    P_plus: float
    P_minus: float
    F: float
    C: float = None


def _inv(x):
    return 0.0 if np.isinf(x) else 1.0 / x


def finsler_F(body, p, X):
    """Metric sample at p along X; raises PointNotInterior off the interior."""
    p = np.asarray(p, dtype=float)
    X = np.asarray(X, dtype=float)
    if not body.contains(p):
        raise PointNotInterior(f"point {p} is not interior")
    exits = body.ray_exit_batch(p, np.vstack([X, -X]))
    P_plus, P_minus = float(exits[0]), float(exits[1])
    F = _inv(P_plus) + _inv(P_minus)
    return MetricSample(p=p, X=X, P_plus=P_plus, P_minus=P_minus, F=F)


def caratheodory_C(body, p, X):
    """Hull-route value: F of the convex hull (= F itself for convex bodies)."""
    if getattr(body, "convex", True):
        return finsler_F(body, p, X).F
    if isinstance(body, UnionBody):
        return finsler_F(convex_hull(body), p, X).F
    raise TypeError(f"no hull route for {type(body).__name__}")


def metric_sample(body, p, X):
    """Joint (F, C) sample with the comparison C <= F built in."""
    s = finsler_F(body, p, X)
    C = s.F if getattr(body, "convex", True) else caratheodory_C(body, p, X)
    return MetricSample(p=s.p, X=s.X, P_plus=s.P_plus, P_minus=s.P_minus, F=s.F, C=C)


def hilbert_distance(body, p, q):
    """|log (ab; pq)| with a, b the chordal boundary points through p and q.

    Exits at infinity degenerate per the pseudodistance convention: the
    corresponding cross-ratio factor tends to 1 and is dropped; when both
    chord ends are at infinity the distance is 0.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    for z in (p, q):
        if not body.contains(z):
            raise PointNotInterior(f"point {z} is not interior")
    X = q - p
    nX = np.linalg.norm(X)
    if nX < 1e-15:
        return 0.0
    exits = body.ray_exit_batch(p, np.vstack([X, -X]))
    # line parameter s: p at 0, q at 1, in steps of X
    s_b = float(exits[0])
    s_a = -float(exits[1])
    if np.isinf(s_b) and np.isinf(s_a):
        return 0.0
    if np.isinf(s_b):
        ratio = (1.0 - s_a) / (0.0 - s_a)
        return abs(np.log(ratio))
    if np.isinf(s_a):
        ratio = (0.0 - s_b) / (1.0 - s_b)
        return abs(np.log(ratio))
    a = p + s_a * X
    b = p + s_b * X
    return abs(np.log(cross_ratio(a, p, q, b)))


def integrated_distance(body, p, q, quad_points=64):
    """Gauss-Legendre length of the straight segment from p to q under F."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    X = q - p
    if np.linalg.norm(X) < 1e-15:
        return 0.0
    nodes, weights = np.polynomial.legendre.leggauss(int(quad_points))
    ts = 0.5 * (nodes + 1.0)
    ws = 0.5 * weights
    pts = p[None, :] + ts[:, None] * X[None, :]
    if not np.all(body.contains_batch(pts)):
        raise SegmentExits("a quadrature node leaves the body")
    fwd = np.array([body.ray_exit_batch(x, X[None, :])[0] for x in pts])
    bwd = np.array([body.ray_exit_batch(x, -X[None, :])[0] for x in pts])
    vals = np.where(np.isfinite(fwd), 1.0 / fwd, 0.0) + \
        np.where(np.isfinite(bwd), 1.0 / bwd, 0.0)
    return float(ws @ vals)
