import numpy as np
import pytest

from projsqueeze.bodies import HalfspacePolytope, TransformedBody
from projsqueeze.errors import PointNotInterior, SegmentExits
from projsqueeze.metrics import (
    caratheodory_C,
    finsler_F,
    hilbert_distance,
    integrated_distance,
    metric_sample,
)
from projsqueeze.projective import ProjectiveMap

SQRT2 = np.sqrt(2.0)


def test_interval_metric_on_ball(ball2):
    """On the unit disk the axis metric is 2 / (1 - t^2)."""
    for t in (0.0, 0.3, 0.8):
        s = finsler_F(ball2, np.array([t, 0.0]), np.array([1.0, 0.0]))
        assert np.isclose(s.F, 2.0 / (1.0 - t * t), atol=1e-12)
        assert np.isclose(s.P_plus, 1.0 - t)
        assert np.isclose(s.P_minus, 1.0 + t)


def test_metric_is_one_homogeneous(square):
    p = np.array([0.2, -0.4])
    X = np.array([0.7, 0.3])
    f1 = finsler_F(square, p, X).F
    f2 = finsler_F(square, p, 2.5 * X).F
    assert np.isclose(f2, 2.5 * f1)


def test_metric_monotone_under_inclusion(square, ball2):
    # the disk sits inside the square, so its metric is larger
    rng = np.random.default_rng(0)
    for _ in range(20):
        p = rng.uniform(-0.6, 0.6, 2)
        X = rng.standard_normal(2)
        assert finsler_F(ball2, p, X).F >= finsler_F(square, p, X).F - 1e-12


def test_metric_requires_interior_point(square):
    with pytest.raises(PointNotInterior):
        finsler_F(square, np.array([2.0, 0.0]), np.array([1.0, 0.0]))
    with pytest.raises(PointNotInterior):
        hilbert_distance(square, np.array([2.0, 0.0]), np.zeros(2))


def test_hilbert_distance_interval_anchor(ball2):
    d = hilbert_distance(ball2, np.zeros(2), np.array([0.5, 0.0]))
    assert np.isclose(d, np.log(3.0), atol=1e-12)


def test_hilbert_distance_symmetry_and_triangle(square):
    rng = np.random.default_rng(1)
    for _ in range(30):
        p, q, r = rng.uniform(-0.9, 0.9, (3, 2))
        dpq = hilbert_distance(square, p, q)
        assert np.isclose(dpq, hilbert_distance(square, q, p), atol=1e-12)
        assert dpq >= 0.0
        assert dpq <= hilbert_distance(square, p, r) \
            + hilbert_distance(square, r, q) + 1e-12
    assert hilbert_distance(square, p, p) == 0.0


def test_integrated_length_matches_cross_ratio(square, ball2, triangle):
    rng = np.random.default_rng(2)
    for body in (square, ball2, triangle):
        for _ in range(10):
            p = rng.uniform(-0.4, 0.4, 2)
            q = rng.uniform(-0.4, 0.4, 2)
            if not (body.contains(p) and body.contains(q)):
                continue
            dh = hilbert_distance(body, p, q)
            di = integrated_distance(body, p, q)
            assert np.isclose(dh, di, atol=1e-8)


def test_slab_metric_conventions():
    slab = HalfspacePolytope(np.array([[0.0, 1.0], [0.0, -1.0]]), np.ones(2))
    p = np.zeros(2)
    # along the slab: both exits at infinity, vanishing metric and distance
    assert finsler_F(slab, p, np.array([1.0, 0.0])).F == 0.0
    assert hilbert_distance(slab, p, np.array([0.7, 0.0])) == 0.0
    # across the slab the metric is the usual interval one
    assert np.isclose(finsler_F(slab, p, np.array([0.0, 1.0])).F, 2.0)


def test_halfplane_one_sided_distance():
    half = HalfspacePolytope(np.array([[0.0, 1.0]]), np.array([1.0]),
                             witness=np.zeros(2))
    d = hilbert_distance(half, np.zeros(2), np.array([0.0, 0.5]))
    # only the factor from the finite chord end survives
    assert np.isclose(d, np.log(2.0), atol=1e-12)


def test_lshape_metric_along_reflex_diagonal(lshape):
    """Toward the reflex corner the union metric sees the corner exit."""
    u = np.array([1.0, 1.0]) / SQRT2
    for t in (0.1, 0.25, 0.5):
        p = -t * u
        s = finsler_F(lshape, p, u)
        assert np.isclose(s.F, 1.0 / t + 1.0 / (SQRT2 - t), atol=1e-10)


def test_caratheodory_uses_hull_on_unions(lshape):
    u = np.array([1.0, 1.0]) / SQRT2
    t = 0.25
    p = -t * u
    c = caratheodory_C(lshape, p, u)
    expected = SQRT2 / (1.0 + SQRT2 * t) + 1.0 / (SQRT2 - t)
    assert np.isclose(c, expected, atol=1e-10)
    f = finsler_F(lshape, p, u).F
    assert c <= f + 1e-12


def test_caratheodory_equals_metric_on_convex(square, ball2):
    p = np.array([0.3, 0.1])
    X = np.array([0.2, -0.9])
    for body in (square, ball2):
        assert np.isclose(caratheodory_C(body, p, X), finsler_F(body, p, X).F)


def test_metric_sample_carries_both_values(lshape, square):
    s = metric_sample(lshape, np.array([-0.3, -0.3]), np.array([1.0, 1.0]))
    assert s.C is not None and s.C <= s.F + 1e-12
    s2 = metric_sample(square, np.zeros(2), np.array([1.0, 0.0]))
    assert np.isclose(s2.C, s2.F)


def test_integrated_distance_rejects_exiting_segment(lshape):
    p = np.array([-0.2, 0.8])
    q = np.array([0.8, -0.2])
    assert lshape.contains(p) and lshape.contains(q)
    with pytest.raises(SegmentExits):
        integrated_distance(lshape, p, q)


def test_metric_projective_invariance(square):
    rng = np.random.default_rng(3)
    for _ in range(10):
        m = np.eye(3)
        m[0, 1:] = 0.15 * rng.uniform(-1.0, 1.0, 2)
        m[1:, 1:] += 0.2 * rng.standard_normal((2, 2))
        f = ProjectiveMap(m)
        image = TransformedBody(square, f)
        p = rng.uniform(-0.5, 0.5, 2)
        q = rng.uniform(-0.5, 0.5, 2)
        d0 = hilbert_distance(square, p, q)
        d1 = hilbert_distance(image, f.apply(p), f.apply(q))
        assert np.isclose(d0, d1, rtol=1e-8, atol=1e-10)
