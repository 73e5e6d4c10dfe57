import json

import numpy as np
import pytest

from projsqueeze.bodies import (
    EllipsoidBody,
    HalfspacePolytope,
    LevelSetBody,
    TransformedBody,
)
from projsqueeze.bodyspec import builtin_body, quartic_body, resolve_body
from projsqueeze.errors import (
    OriginNotInterior,
    PointNotInterior,
    Unbounded,
)
from projsqueeze.projective import (
    ProjectiveMap,
    orthant_ball_map,
    orthant_ball_radius,
)
from projsqueeze.sampling import unit_directions
from projsqueeze.squeezing import (
    certify_witness,
    circumradius_at_origin,
    inradius_at_origin,
    optimize_squeeze,
    oracle_squeeze_2d,
    pushforward_polytope,
    upper_bound_squeeze,
    witness_ball_point,
    witness_recenter_scale,
    witness_strictly_convex,
)

SQRT2 = np.sqrt(2.0)


def test_radii_on_square(square):
    assert np.isclose(inradius_at_origin(square), 1.0)
    assert np.isclose(circumradius_at_origin(square), SQRT2)


def test_radii_on_ball(ball2):
    assert np.isclose(inradius_at_origin(ball2), 1.0, atol=1e-9)
    assert np.isclose(circumradius_at_origin(ball2), 1.0, atol=1e-9)


def test_radii_require_interior_origin():
    shifted = HalfspacePolytope.box(np.array([1.0, 1.0]), np.array([2.0, 2.0]))
    with pytest.raises(OriginNotInterior):
        inradius_at_origin(shifted)


def test_circumradius_unbounded_raises():
    slab = HalfspacePolytope(np.array([[0.0, 1.0], [0.0, -1.0]]), np.ones(2))
    with pytest.raises(Unbounded):
        circumradius_at_origin(slab)


def test_frankel_image_inradius():
    ball = EllipsoidBody.unit_ball(2)
    img = TransformedBody(ball, orthant_ball_map(2), validate=False)
    r = inradius_at_origin(img, n_samples=4096)
    assert r >= 1.0 / (2.0 + 3.0 * SQRT2) - 1e-6


# ---------------------------------------------------------------------------
# pushforward


def test_pushforward_identity(square):
    img = pushforward_polytope(square, ProjectiveMap.identity(2))
    assert np.isclose(inradius_at_origin(img), 1.0)
    verts = {tuple(np.round(v, 9)) for v in img.vertices()}
    assert verts == {tuple(np.round(v, 9)) for v in square.vertices()}


def test_pushforward_affine(square):
    f = ProjectiveMap.affine(np.diag([2.0, 0.5]), np.array([1.0, 0.0]))
    img = pushforward_polytope(square, f)
    assert img.contains(np.array([2.9, 0.0]))
    assert not img.contains(np.array([3.1, 0.0]))


def test_pushforward_membership_cross_check(square):
    """Exact half-space transport agrees with generic membership tests."""
    rng = np.random.default_rng(0)
    half_square = HalfspacePolytope.from_vertices(
        0.5 * np.asarray(square.vertices()))
    f = orthant_ball_map(2)
    img = pushforward_polytope(half_square, f)
    timg = TransformedBody(half_square, f, validate=False)
    pts = rng.uniform(-0.6, 0.6, (10000, 2))
    assert np.array_equal(img.contains_batch(pts), timg.contains_batch(pts))


def test_pushforward_rejects_singular_crossing(square):
    f = ProjectiveMap(np.array([[1.0, 2.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))
    from projsqueeze.errors import SingularHyperplaneCrossing
    with pytest.raises(SingularHyperplaneCrossing):
        pushforward_polytope(square, f)


# ---------------------------------------------------------------------------
# explicit witnesses


def test_recenter_scale_anchors(square, ball2):
    assert np.isclose(witness_recenter_scale(ball2, np.zeros(2)).ratio, 1.0,
                      atol=1e-9)
    w = witness_recenter_scale(ball2, np.array([0.9, 0.0]))
    assert np.isclose(w.ratio, 1.0 / 19.0, atol=1e-6)
    assert np.isclose(witness_recenter_scale(square, np.zeros(2)).ratio,
                      1.0 / SQRT2, atol=1e-12)


def test_witness_maps_point_to_origin(square):
    z = np.array([0.3, 0.2])
    w = witness_recenter_scale(square, z)
    assert np.linalg.norm(w.map.apply(z)) < 1e-10
    assert w.r_in <= w.r_out


def test_ball_point_witness_is_exact(ball2, ellipse):
    w = witness_ball_point(ball2, np.array([0.99, 0.0]))
    assert w.ratio >= 1.0 - 1e-6
    w2 = witness_ball_point(ellipse, np.array([1.5, 0.3]))
    assert w2.ratio >= 1.0 - 1e-9


def test_ball_point_witness_outside():
    from projsqueeze.errors import OutsideBall
    with pytest.raises(OutsideBall):
        witness_ball_point(EllipsoidBody.unit_ball(2), np.array([1.0, 0.0]))


def test_strictly_convex_witness_on_ball(ball2):
    w = witness_strictly_convex(ball2, np.array([1.0 - 1e-4, 0.0]))
    assert w.ratio >= 0.97


def test_strictly_convex_witness_improves_toward_boundary():
    body = quartic_body()
    ratios = [witness_strictly_convex(body, np.array([1.0 - t, 0.0])).ratio
              for t in (1e-2, 1e-3, 1e-4)]
    assert ratios[0] < ratios[1] < ratios[2]
    assert ratios[2] > 0.999


def test_paraboloid_model_witness_is_a_ball():
    """For the paraboloid the normalization chain reproduces the unit ball."""

    def g(xs):
        return xs[:, 0] + xs[:, 1] ** 2

    def grad(x):
        return np.array([1.0, 2.0 * x[1]])

    def hess(x):
        return np.array([[0.0, 0.0], [0.0, 2.0]])

    parab = LevelSetBody(g, grad=grad, hess=hess, witness=np.array([-1.0, 0.0]))
    w = witness_strictly_convex(parab, np.array([-0.01, 0.0]))
    assert np.isclose(w.ratio, 1.0, atol=1e-6)


def test_recertification_with_more_directions(quartic):
    q = np.array([1.0 - 1e-2, 0.0])
    w = witness_strictly_convex(quartic, q, n_directions=2048)
    again = certify_witness(quartic, w.map, q, n_directions=8192)
    # direction sets are prefix-nested, so the radii can only widen
    assert again.r_in <= w.r_in + 1e-12
    assert again.r_out >= w.r_out - 1e-12
    assert w.ratio - again.ratio < 5e-3


# ---------------------------------------------------------------------------
# the optimizer


def test_optimize_ball_reaches_one(ball2):
    est = optimize_squeeze(ball2, np.array([0.3, -0.2]), budget=200, seed=0)
    assert est.lower >= 1.0 - 1e-4
    assert est.witness.r_out <= 1.0 + 1e-9


def test_optimize_square_center(square):
    est = optimize_squeeze(square, np.zeros(2), budget=400, seed=0)
    assert est.lower >= 1.0 / SQRT2 - 1e-9
    assert est.lower <= 1.0


def test_optimize_triangle_is_half(triangle):
    rng = np.random.default_rng(1)
    pts = [np.zeros(2)]
    while len(pts) < 4:
        p = rng.uniform(-0.8, 0.8, 2)
        if triangle.contains(p):
            pts.append(p)
    for p in pts:
        est = optimize_squeeze(triangle, p, budget=0, seed=0)
        assert np.isclose(est.lower, 0.5, atol=1e-6)


def test_optimize_never_below_explicit_witness(square, ellipse):
    for body, z in ((square, np.array([0.4, -0.3])),
                    (ellipse, np.array([0.8, 0.2]))):
        base = witness_recenter_scale(body, z).ratio
        est = optimize_squeeze(body, z, budget=0, seed=0)
        assert est.lower >= base - 1e-12


def test_optimize_monotone_in_budget(square):
    z = np.array([0.35, 0.2])
    lowers = [optimize_squeeze(square, z, budget=b, seed=3).lower
              for b in (0, 200, 600)]
    assert lowers[0] <= lowers[1] + 1e-15
    assert lowers[1] <= lowers[2] + 1e-15


def test_optimize_unbounded_slab_reports_zero():
    slab = HalfspacePolytope(np.array([[0.0, 1.0], [0.0, -1.0]]), np.ones(2))
    est = optimize_squeeze(slab, np.zeros(2), budget=100, seed=0)
    assert est.lower == 0.0
    assert est.reason != ""


def test_optimize_requires_interior_point(square):
    with pytest.raises(PointNotInterior):
        optimize_squeeze(square, np.array([3.0, 0.0]))


def test_optimize_projective_invariance(square):
    z = np.array([0.3, 0.2])
    m = np.eye(3)
    m[0, 1:] = [0.12, -0.08]
    m[1:, 1:] = [[1.1, 0.2], [-0.1, 0.9]]
    g = ProjectiveMap(m)
    image = HalfspacePolytope.from_vertices(g.apply_batch(square.vertices()))
    a = optimize_squeeze(square, z, budget=2000, seed=0).lower
    b = optimize_squeeze(image, g.apply(z), budget=2000, seed=0).lower
    assert abs(a - b) <= 0.02


def test_frankel_pipeline_certificate():
    """A polygon between B(0, r) and the shifted orthant certifies the
    composed-map lower bound r / (2 r + 3 sqrt(2))."""
    r = 0.5
    poly = HalfspacePolytope.box(np.array([-r, -r]), np.array([4.0, 4.0]))
    w = certify_witness(poly, orthant_ball_map(2), np.zeros(2))
    assert w.ratio >= orthant_ball_radius(2, r) - 1e-9
    assert w.r_out <= 1.0 + 1e-9


def test_upper_bound_is_one_on_convex(square, ball2):
    assert upper_bound_squeeze(square, np.array([0.3, 0.3])) == 1.0
    assert upper_bound_squeeze(ball2, np.zeros(2)) == 1.0


def test_upper_bound_decays_near_reflex_corner(lshape):
    t = 0.25
    p = -t * np.array([1.0, 1.0]) / SQRT2
    ub = upper_bound_squeeze(lshape, p, direction_samples=256)
    assert ub <= 2.13 * t
    est = optimize_squeeze(lshape, p, budget=200, seed=0)
    assert est.lower <= ub + 1e-9


# ---------------------------------------------------------------------------
# oracle


def test_oracle_monotone_in_samples(square):
    z = np.array([0.2, 0.1])
    a = oracle_squeeze_2d(square, z, samples=600, seed=0)
    b = oracle_squeeze_2d(square, z, samples=1200, seed=0)
    assert b >= a - 1e-15


def test_oracle_disk_center(ball2):
    v = oracle_squeeze_2d(ball2, np.zeros(2), samples=500, seed=0)
    assert v >= 1.0 - 1e-3


def test_oracle_matches_goldens(goldens):
    for key in ("square_center", "triangle_center"):
        rec = goldens[key]
        body = resolve_body(rec["body"]).body
        v = oracle_squeeze_2d(body, np.array(rec["point"]),
                              samples=rec["samples"], seed=rec["seed"])
        assert np.isclose(v, rec["value"], rtol=0, atol=1e-15)


def test_golden_file_spec_hashes(goldens):
    for rec in goldens.values():
        assert resolve_body(rec["body"]).hash == rec["spec_hash"]
