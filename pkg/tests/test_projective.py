import numpy as np
import pytest

from projsqueeze.errors import (
    CoincidentPoints,
    ImageAtInfinity,
    NotCollinear,
    OutsideBall,
    SingularMap,
)
from projsqueeze.projective import (
    ProjectiveMap,
    ball_automorphism,
    ball_to_paraboloid,
    cross_ratio,
    dehomogenize,
    orthant_ball_map,
    orthant_ball_radius,
    to_homogeneous,
)


def random_map(rng, dim, spread=0.2):
    """A projective map whose singular hyperplane misses the unit box."""
    m = np.eye(dim + 1)
    m[0, 1:] = spread * rng.uniform(-1.0, 1.0, dim)
    m[1:, 0] = spread * rng.uniform(-1.0, 1.0, dim)
    m[1:, 1:] += spread * rng.standard_normal((dim, dim))
    return ProjectiveMap(m)


def test_homogeneous_roundtrip():
    x = np.array([0.3, -1.7, 2.0])
    assert np.allclose(dehomogenize(to_homogeneous(x)), x)
    assert np.allclose(dehomogenize(-3.0 * to_homogeneous(x)), x)


def test_identity_and_compose():
    rng = np.random.default_rng(0)
    f = random_map(rng, 2)
    g = random_map(rng, 2)
    x = np.array([0.25, -0.4])
    assert np.allclose(ProjectiveMap.identity(2).apply(x), x)
    assert np.allclose(f.compose(g).apply(x), f.apply(g.apply(x)))
    assert np.allclose((f @ g).apply(x), f.apply(g.apply(x)))


def test_inverse_roundtrip():
    rng = np.random.default_rng(1)
    for _ in range(20):
        f = random_map(rng, 3)
        x = rng.uniform(-0.8, 0.8, 3)
        assert np.allclose(f.inverse().apply(f.apply(x)), x, atol=1e-10)
    assert f.compose(f.inverse()).same_as(ProjectiveMap.identity(3))


def test_canonical_matrix_ignores_scale():
    m = np.array([[1.0, 0.2, 0.0], [0.1, 2.0, 0.3], [0.0, -0.5, 1.0]])
    assert ProjectiveMap(m).same_as(ProjectiveMap(-7.5 * m))


def test_singular_matrix_rejected():
    m = np.ones((3, 3))
    with pytest.raises(SingularMap):
        ProjectiveMap(m)


def test_apply_batch_matches_apply():
    rng = np.random.default_rng(2)
    f = random_map(rng, 2)
    pts = rng.uniform(-0.9, 0.9, (40, 2))
    imgs = f.apply_batch(pts)
    for x, y in zip(pts, imgs):
        assert np.allclose(f.apply(x), y)


def test_image_at_infinity_raises():
    # divisor 1 + x vanishes at x = -1
    m = np.array([[1.0, 1.0], [0.0, 1.0]])
    f = ProjectiveMap(m)
    with pytest.raises(ImageAtInfinity):
        f.apply(np.array([-1.0]))
    with pytest.raises(ImageAtInfinity):
        f.differential(np.array([-1.0]))


def test_differential_matches_finite_differences():
    rng = np.random.default_rng(3)
    h = 1e-6
    for dim in (2, 3):
        for _ in range(10):
            f = random_map(rng, dim)
            x = rng.uniform(-0.7, 0.7, dim)
            J = f.differential(x)
            for j in range(dim):
                e = np.zeros(dim)
                e[j] = h
                col = (f.apply(x + e) - f.apply(x - e)) / (2.0 * h)
                assert np.allclose(J[:, j], col, rtol=1e-5, atol=1e-7)


def test_translation_scaling_affine():
    t = ProjectiveMap.translation(np.array([1.0, -2.0]))
    assert np.allclose(t.apply(np.zeros(2)), [1.0, -2.0])
    s = ProjectiveMap.scaling(0.5, 2)
    assert np.allclose(s.apply(np.array([2.0, 4.0])), [1.0, 2.0])
    a = ProjectiveMap.affine(np.diag([2.0, 3.0]), np.array([1.0, 0.0]))
    assert np.allclose(a.apply(np.array([1.0, 1.0])), [3.0, 3.0])


# ---------------------------------------------------------------------------
# cross ratio


def test_cross_ratio_interval_anchor():
    """Midpoint-to-halfway value on (-1, 1): the cross ratio is 3."""
    a = np.array([-1.0, 0.0])
    p = np.array([0.0, 0.0])
    q = np.array([0.5, 0.0])
    b = np.array([1.0, 0.0])
    assert np.isclose(cross_ratio(a, p, q, b), 3.0, rtol=0, atol=1e-12)
    assert np.isclose(abs(np.log(cross_ratio(a, p, q, b))), np.log(3.0))


def test_cross_ratio_log_additive_along_chord():
    rng = np.random.default_rng(4)
    u = rng.standard_normal(2)
    u /= np.linalg.norm(u)
    base = rng.uniform(-1.0, 1.0, 2)
    ts = np.sort(rng.uniform(0.1, 0.9, 3))
    a = base
    b = base + u
    p, q, r = (base + t * u for t in ts)
    left = abs(np.log(cross_ratio(a, p, q, b))) + abs(np.log(cross_ratio(a, q, r, b)))
    assert np.isclose(left, abs(np.log(cross_ratio(a, p, r, b))), atol=1e-12)


def test_cross_ratio_projective_invariance():
    rng = np.random.default_rng(5)
    for _ in range(25):
        u = rng.standard_normal(3)
        u /= np.linalg.norm(u)
        base = rng.uniform(-0.5, 0.5, 3)
        ta, tp, tq, tb = np.sort(rng.uniform(-0.5, 0.5, 4))
        pts = [base + t * u for t in (ta, tp, tq, tb)]
        before = cross_ratio(*pts)
        f = random_map(rng, 3, spread=0.15)
        after = cross_ratio(*(f.apply(x) for x in pts))
        assert np.isclose(before, after, rtol=1e-9)


def test_cross_ratio_rejects_bad_input():
    a = np.array([0.0, 0.0])
    b = np.array([1.0, 0.0])
    with pytest.raises(NotCollinear):
        cross_ratio(a, np.array([0.5, 0.2]), np.array([0.7, 0.0]), b)
    with pytest.raises(CoincidentPoints):
        cross_ratio(a, a, np.array([0.5, 0.0]), b)
    with pytest.raises(CoincidentPoints):
        cross_ratio(a, np.array([0.25, 0.0]), np.array([0.5, 0.0]), a)


# ---------------------------------------------------------------------------
# special maps


def test_ball_automorphism_centers_point_and_preserves_sphere():
    rng = np.random.default_rng(6)
    for _ in range(10):
        a = rng.uniform(-0.6, 0.6, 3)
        f = ball_automorphism(a)
        assert np.allclose(f.apply(a), np.zeros(3), atol=1e-12)
        v = rng.standard_normal(3)
        v /= np.linalg.norm(v)
        assert np.isclose(np.linalg.norm(f.apply(v)), 1.0, atol=1e-10)


def test_ball_automorphism_is_lorentz():
    # M^T J M proportional to J with J = diag(-1, I) in (w, x) coordinates
    a = np.array([0.4, -0.2])
    M = ball_automorphism(a).matrix
    J = np.diag([-1.0, 1.0, 1.0])
    G = M.T @ J @ M
    lam = G[1, 1]
    assert np.allclose(G, lam * J, atol=1e-12)


def test_ball_automorphism_outside_raises():
    with pytest.raises(OutsideBall):
        ball_automorphism(np.array([1.0, 0.0]))


def test_orthant_map_interval_anchor():
    # d = 1: x -> x / (2 + x) sends (-1, 1) to (-1, 1/3)
    f = orthant_ball_map(1)
    assert np.isclose(f.apply(np.array([-1.0]))[0], -1.0)
    assert np.isclose(f.apply(np.array([1.0]))[0], 1.0 / 3.0)
    assert np.isclose(orthant_ball_radius(1, 1.0), 1.0 / 3.0)


def test_orthant_map_sends_shifted_orthant_into_ball():
    rng = np.random.default_rng(7)
    for d in (1, 2, 3, 4):
        f = orthant_ball_map(d)
        xs = -1.0 + rng.exponential(scale=3.0, size=(200, d))
        imgs = f.apply_batch(xs)
        assert np.all(np.linalg.norm(imgs, axis=1) < 1.0)


def test_orthant_map_ball_inclusion_2d():
    """The image of B(0, r) contains the ball of the certified radius."""
    f = orthant_ball_map(2)
    finv = f.inverse()
    for r in (0.25, 1.0, 4.0):
        rho = orthant_ball_radius(2, r)
        ang = np.linspace(0.0, 2.0 * np.pi, 720, endpoint=False)
        ys = (rho - 1e-12) * np.column_stack([np.cos(ang), np.sin(ang)])
        back = finv.apply_batch(ys)
        assert np.all(np.linalg.norm(back, axis=1) < r)


def test_ball_to_paraboloid_boundary():
    f = ball_to_paraboloid(0.3, 2)
    assert np.allclose(f.apply(np.zeros(2)), [-0.3, 0.0])
    ang = np.linspace(-2.6, 2.6, 100)
    ys = np.column_stack([np.cos(ang), np.sin(ang)])
    xs = f.apply_batch(ys)
    assert np.allclose(xs[:, 0], -xs[:, 1] ** 2, atol=1e-9)
    inside = f.apply(np.array([0.2, 0.4]))
    assert inside[0] < -inside[1] ** 2
