"""Body representations: membership, ray exits, hulls, boundary normalization.

All bodies are open sets; membership is strict.  Every body answers
``contains`` and ``ray_exit`` queries; convex types additionally support
signed ray intervals so that unions can merge them.  Bodies are immutable
after construction and safe for concurrent reads.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import (
    GeometryError,
    ImageAtInfinity,
    NoUniqueProjection,
    NotStrictlyConvex,
    OriginNotInterior,
    PointNotInterior,
    SingularHyperplaneCrossing,
    Unbounded,
    UnsupportedDimension,
)
from .projective import AT_INFINITY_RTOL, ProjectiveMap

# Strict-membership margin: points closer than this to the boundary (in the
# row-normalized / unit-scale sense) count as outside.
BOUNDARY_TOL = 1e-12


def _pt(x):
    return np.atleast_1d(np.asarray(x, dtype=float))


def convex_hull_2d(points):
    """Vertices of the convex hull of 2D points, counter-clockwise.

    Andrew's monotone chain; collinear points on the hull edges are dropped.
    """
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(pts) < 3:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


class Body:
    """Common interface for all body types."""

    dim = None
    convex = True

    def contains(self, x):
        raise NotImplementedError

    def ray_exit(self, p, X):
        """Exit parameter sup{t > 0 : p + s X in body for all s in [0, t)}.

        Returns +inf when the ray never leaves.  Raises ``PointNotInterior``
        when p is not strictly inside.
        """
        p, X = _pt(p), _pt(X)
        if not self.contains(p):
            raise PointNotInterior(f"ray origin {p} is not interior")
        if np.linalg.norm(X) == 0.0:
            raise ValueError("ray direction must be nonzero")
        return float(self.ray_exit_batch(p, X[None, :])[0])

    def ray_exit_batch(self, p, dirs):
        """Exit parameters for many directions from one interior point.

        No precondition checks; callers guarantee p is interior.
        """
        raise NotImplementedError

    def interior_point(self):
        raise NotImplementedError

    def is_bounded(self):
        raise NotImplementedError

    def diameter_hint(self):
        """A finite scale comparable to the body size (exact where cheap)."""
        raise NotImplementedError


class HalfspacePolytope(Body):
    """Open polytope {x : A x < b} with unit-norm rows.

    A strictly interior witness point is required (computed as the Chebyshev
    center when not supplied) and must have slack above 1e-10.
    """

    def __init__(self, A, b, witness=None):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).ravel()
        if A.shape[0] != b.shape[0]:
            raise ValueError("A and b row counts differ")
        norms = np.linalg.norm(A, axis=1)
        if np.any(norms == 0.0):
            raise ValueError("zero row in A")
        self.A = A / norms[:, None]
        self.b = b / norms
        self.dim = A.shape[1]
        if witness is None:
            witness = self._chebyshev_center()
        witness = _pt(witness)
        slack = self.b - self.A @ witness
        if np.min(slack) <= 1e-10:
            raise GeometryError(
                f"witness point has slack {np.min(slack):.3g} <= 1e-10"
            )
        self.witness = witness
        self._vertices = None
        self._bounded = None
        self.A.setflags(write=False)
        self.b.setflags(write=False)

    def _chebyshev_center(self):
        m, d = self.A.shape
        c = np.zeros(d + 1)
        c[-1] = -1.0
        A_ub = np.hstack([self.A, np.ones((m, 1))])
        res = linprog(c, A_ub=A_ub, b_ub=self.b, bounds=[(None, None)] * d + [(0, None)],
                      method="highs")
        if res.status == 3:
            # unbounded inradius (slab, wedge); any strictly interior point does
            span = max(1.0, float(np.max(np.abs(self.b)))) * 1e3
            res = linprog(c, A_ub=A_ub, b_ub=self.b,
                          bounds=[(-span, span)] * d + [(0, None)], method="highs")
        if not res.success or res.x[-1] <= 1e-10:
            raise GeometryError("polytope has empty interior")
        return res.x[:-1]

    @classmethod
    def from_vertices(cls, points):
        """2D polygon from its vertex set (hull is taken first)."""
        points = np.asarray(points, dtype=float)
        if points.shape[1] != 2:
            raise UnsupportedDimension("from_vertices is 2D only")
        hull = convex_hull_2d(points)
        if len(hull) < 3:
            raise GeometryError("degenerate hull with fewer than 3 vertices")
        rows_a, rows_b = [], []
        n = len(hull)
        for i in range(n):
            v0, v1 = hull[i], hull[(i + 1) % n]
            e = v1 - v0
            normal = np.array([e[1], -e[0]])  # outward for CCW ordering
            normal /= np.linalg.norm(normal)
            rows_a.append(normal)
            rows_b.append(normal @ v0)
        return cls(np.array(rows_a), np.array(rows_b), witness=hull.mean(axis=0))

    @classmethod
    def box(cls, lo, hi):
        lo, hi = _pt(lo), _pt(hi)
        d = len(lo)
        A = np.vstack([np.eye(d), -np.eye(d)])
        b = np.concatenate([hi, -lo])
        return cls(A, b, witness=(lo + hi) / 2.0)

    def contains(self, x):
        x = _pt(x)
        return bool(np.all(self.b - self.A @ x > BOUNDARY_TOL))

    def contains_batch(self, xs):
        xs = np.atleast_2d(xs)
        return np.all(self.b[None, :] - xs @ self.A.T > BOUNDARY_TOL, axis=1)

    def ray_exit_batch(self, p, dirs):
        p = _pt(p)
        dirs = np.atleast_2d(dirs)
        slack = self.b - self.A @ p  # (m,)
        denom = dirs @ self.A.T      # (n, m)
        with np.errstate(divide="ignore"):
            t = np.where(denom > 0.0, slack[None, :] / denom, np.inf)
        return t.min(axis=1)

    def ray_interval(self, p, X):
        """Signed interval {t : p + t X in body}; None when empty."""
        p, X = _pt(p), _pt(X)
        slack = self.b - self.A @ p
        denom = self.A @ X
        lo, hi = -np.inf, np.inf
        for s, dn in zip(slack, denom):
            if abs(dn) < 1e-15:
                if s <= BOUNDARY_TOL:
                    return None
            elif dn > 0:
                hi = min(hi, s / dn)
            else:
                lo = max(lo, s / dn)
        if lo >= hi - BOUNDARY_TOL:
            return None
        return (lo, hi)

    def vertices(self):
        """Vertex list (2D only), ordered counter-clockwise."""
        if self.dim != 2:
            raise UnsupportedDimension("vertex enumeration is 2D only")
        if self._vertices is not None:
            return self._vertices
        m = len(self.b)
        pts = []
        for i in range(m):
            for j in range(i + 1, m):
                mat = np.array([self.A[i], self.A[j]])
                if abs(np.linalg.det(mat)) < 1e-12:
                    continue
                v = np.linalg.solve(mat, np.array([self.b[i], self.b[j]]))
                if np.all(self.A @ v <= self.b + 1e-9):
                    pts.append(v)
        if not pts:
            raise Unbounded("polytope has no vertices")
        pts = np.array(pts)
        keep = []
        for v in pts:
            if not any(np.linalg.norm(v - w) < 1e-9 for w in keep):
                keep.append(v)
        keep = np.array(keep)
        ang = np.arctan2(keep[:, 1] - self.witness[1], keep[:, 0] - self.witness[0])
        self._vertices = keep[np.argsort(ang)]
        self._vertices.setflags(write=False)
        return self._vertices

    def is_bounded(self):
        if self._bounded is None:
            if self.dim == 2:
                # bounded iff the outward normals positively span the plane,
                # i.e. the largest angular gap between them is below pi
                ang = np.sort(np.arctan2(self.A[:, 1], self.A[:, 0]))
                gaps = np.diff(np.concatenate([ang, [ang[0] + 2.0 * np.pi]]))
                self._bounded = bool(np.max(gaps) < np.pi - 1e-12)
                return self._bounded
            bounded = True
            d = self.dim
            for i in range(d):
                for sign in (1.0, -1.0):
                    c = np.zeros(d)
                    c[i] = -sign
                    res = linprog(c, A_ub=self.A, b_ub=self.b,
                                  bounds=[(None, None)] * d, method="highs")
                    if res.status == 3:  # unbounded
                        bounded = False
                        break
                if not bounded:
                    break
            self._bounded = bounded
        return self._bounded

    def interior_point(self):
        return self.witness

    def diameter_hint(self):
        if self.dim == 2 and self.is_bounded():
            v = self.vertices()
            return float(max(np.linalg.norm(a - b) for a in v for b in v))
        if not self.is_bounded():
            return np.inf
        lo, hi = [], []
        for i in range(self.dim):
            for sign, acc in ((1.0, hi), (-1.0, lo)):
                c = np.zeros(self.dim)
                c[i] = -sign
                res = linprog(c, A_ub=self.A, b_ub=self.b,
                              bounds=[(None, None)] * self.dim, method="highs")
                acc.append(sign * -res.fun if res.success else np.inf)
        return float(np.linalg.norm(np.array(hi) - np.array(lo)))


class EllipsoidBody(Body):
    """Open ellipsoid {x : (x-c)^T Q (x-c) < 1} with Q symmetric positive definite."""

    def __init__(self, center, Q):
        self.center = _pt(center)
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        if not np.allclose(Q, Q.T, atol=1e-12):
            raise ValueError("Q must be symmetric within 1e-12")
        evals = np.linalg.eigvalsh(Q)
        if evals[0] <= 0.0:
            raise ValueError(f"Q must be positive definite; min eigenvalue {evals[0]:.3g}")
        self.Q = 0.5 * (Q + Q.T)
        self.dim = len(self.center)
        self._eigmin = float(evals[0])
        self.center.setflags(write=False)
        self.Q.setflags(write=False)

    @classmethod
    def unit_ball(cls, dim):
        return cls(np.zeros(dim), np.eye(dim))

    @classmethod
    def from_semiaxes(cls, semiaxes, center=None):
        semiaxes = _pt(semiaxes)
        if center is None:
            center = np.zeros(len(semiaxes))
        return cls(center, np.diag(1.0 / semiaxes**2))

    def quadratic(self, x):
        v = _pt(x) - self.center
        return float(v @ self.Q @ v)

    def contains(self, x):
        return self.quadratic(x) < 1.0 - BOUNDARY_TOL

    def contains_batch(self, xs):
        v = np.atleast_2d(xs) - self.center[None, :]
        return np.einsum("nd,de,ne->n", v, self.Q, v) < 1.0 - BOUNDARY_TOL

    def ray_exit_batch(self, p, dirs):
        v = _pt(p) - self.center
        dirs = np.atleast_2d(dirs)
        alpha = np.einsum("nd,de,ne->n", dirs, self.Q, dirs)
        beta = dirs @ (self.Q @ v)
        gamma = float(v @ self.Q @ v) - 1.0
        disc = beta**2 - alpha * gamma
        return (-beta + np.sqrt(disc)) / alpha

    def ray_interval(self, p, X):
        v = _pt(p) - self.center
        X = _pt(X)
        alpha = float(X @ self.Q @ X)
        beta = float(X @ self.Q @ v)
        gamma = float(v @ self.Q @ v) - 1.0
        disc = beta**2 - alpha * gamma
        if disc <= 0.0:
            return None
        root = np.sqrt(disc)
        return ((-beta - root) / alpha, (-beta + root) / alpha)

    def interior_point(self):
        return self.center

    def is_bounded(self):
        return True

    def diameter_hint(self):
        return float(2.0 / np.sqrt(self._eigmin))

    def sqrt_Q(self):
        """Symmetric square root of Q (maps the body onto the unit ball)."""
        evals, vecs = np.linalg.eigh(self.Q)
        return (vecs * np.sqrt(evals)) @ vecs.T


class LevelSetBody(Body):
    """Open set {x : g(x) < 0} for a smooth convex defining function.

    ``g`` must be vectorized over an (n, d) array of points; ``grad`` and
    ``hess`` take single points.  ``box`` = (lo, hi) bounds the body and
    brackets all ray exits; omit it only for genuinely unbounded bodies.
    """

    convex = True

    def __init__(self, g, grad=None, hess=None, box=None, witness=None, name=None):
        self.g = g
        self.grad = grad
        self.hess = hess
        self.name = name
        if box is not None:
            lo, hi = _pt(box[0]), _pt(box[1])
            self.box = (lo, hi)
            self.dim = len(lo)
        else:
            self.box = None
            self.dim = None
        if witness is not None:
            witness = _pt(witness)
            if self.dim is None:
                self.dim = len(witness)
        self.witness = witness
        if witness is not None and self.g_many(witness[None, :])[0] >= 0.0:
            raise GeometryError("witness point is not inside the level set")

    def g_many(self, xs):
        return np.asarray(self.g(np.atleast_2d(xs)), dtype=float)

    def contains(self, x):
        return bool(self.g_many(_pt(x)[None, :])[0] < -BOUNDARY_TOL)

    def contains_batch(self, xs):
        return self.g_many(xs) < -BOUNDARY_TOL

    def _box_exit(self, p, dirs):
        if self.box is None:
            return np.full(len(dirs), np.inf)
        lo, hi = self.box
        slack_hi = hi[None, :] - p[None, :]
        slack_lo = p[None, :] - lo[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            t_hi = np.where(dirs > 0, slack_hi / dirs, np.inf)
            t_lo = np.where(dirs < 0, slack_lo / (-dirs), np.inf)
        return np.minimum(t_hi.min(axis=1), t_lo.min(axis=1))

    def ray_exit_batch(self, p, dirs):
        p = _pt(p)
        dirs = np.atleast_2d(dirs)
        n = len(dirs)
        cap = self._box_exit(p, dirs) * (1.0 + 1e-9) + 1e-12
        # bracket by doubling from a small step until g >= 0 or the box is left
        scale = np.where(np.isfinite(cap), cap, 1.0)
        t_hi = 1e-3 * scale
        t_lo = np.zeros(n)
        out = np.full(n, np.inf)
        active = np.ones(n, dtype=bool)
        for _ in range(64):
            if not active.any():
                break
            probe = np.minimum(t_hi, cap)
            vals = self.g_many(p[None, :] + probe[active][:, None] * dirs[active])
            crossed = vals >= 0.0
            idx = np.flatnonzero(active)
            done_rays = idx[~crossed & (probe[idx] >= cap[idx])]
            active[done_rays] = False  # never exits inside the box
            hit = idx[crossed]
            t_lo[idx[~crossed]] = probe[idx[~crossed]]
            t_hi[idx[~crossed]] = 2.0 * probe[idx[~crossed]]
            # rays that crossed move to bisection with bracket [t_lo, probe]
            if len(hit):
                lo_b = t_lo[hit].copy()
                hi_b = probe[hit].copy()
                rays = dirs[hit]
                for _ in range(60):
                    mid = 0.5 * (lo_b + hi_b)
                    inside = self.g_many(p[None, :] + mid[:, None] * rays) < 0.0
                    lo_b = np.where(inside, mid, lo_b)
                    hi_b = np.where(inside, hi_b, mid)
                    if np.max(hi_b - lo_b) <= 1e-12 * np.max(hi_b):
                        break
                out[hit] = 0.5 * (lo_b + hi_b)
                active[hit] = False
        return out

    def ray_interval(self, p, X):
        p, X = _pt(p), _pt(X)
        if not self.contains(p):
            return None
        fwd = float(self.ray_exit_batch(p, X[None, :])[0])
        bwd = float(self.ray_exit_batch(p, -X[None, :])[0])
        return (-bwd, fwd)

    def interior_point(self):
        if self.witness is None:
            raise GeometryError("level-set body has no interior witness")
        return self.witness

    def is_bounded(self):
        return self.box is not None

    def diameter_hint(self):
        if self.box is None:
            return np.inf
        lo, hi = self.box
        return float(np.linalg.norm(hi - lo))

    def convexity_certificate(self, n_samples=64, seed=0):
        """Sampled check: gradient nonzero on the boundary, Hessian PSD.

        This is a certificate, not a proof; see the module notes.
        """
        if self.grad is None or self.hess is None:
            return {"checked": 0, "ok": False, "reason": "no derivative evaluators"}
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5EED]))
        w = self.interior_point()
        dirs = rng.normal(size=(n_samples, self.dim))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        exits = self.ray_exit_batch(w, dirs)
        ok = True
        checked = 0
        for t, u in zip(exits, dirs):
            if not np.isfinite(t):
                continue
            x = w + t * u
            if np.linalg.norm(self.grad(x)) < 1e-10:
                ok = False
            if np.linalg.eigvalsh(self.hess(x))[0] < -1e-9:
                ok = False
            checked += 1
        return {"checked": checked, "ok": ok}


class UnionBody(Body):
    """Union of convex parts; used only where nonconvexity is intended."""

    convex = False

    def __init__(self, parts):
        if not parts:
            raise ValueError("union needs at least one part")
        dims = {p.dim for p in parts}
        if len(dims) != 1:
            raise ValueError("union parts have mixed dimensions")
        self.parts = tuple(parts)
        self.dim = dims.pop()

    def contains(self, x):
        return any(p.contains(x) for p in self.parts)

    def contains_batch(self, xs):
        xs = np.atleast_2d(xs)
        mask = np.zeros(len(xs), dtype=bool)
        for p in self.parts:
            mask |= p.contains_batch(xs)
        return mask

    def ray_exit_batch(self, p, dirs):
        p = _pt(p)
        dirs = np.atleast_2d(dirs)
        scale = max(1e-9, 1e-12 * self.diameter_hint())
        out = np.empty(len(dirs))
        for k, X in enumerate(dirs):
            intervals = [iv for part in self.parts
                         if (iv := part.ray_interval(p, X)) is not None]
            current = 0.0
            grew = True
            # extend through genuinely overlapping intervals only; touching
            # closures do not connect open sets
            while grew:
                grew = False
                for lo, hi in intervals:
                    if lo < current - scale and hi > current + scale:
                        current = hi
                        grew = True
            out[k] = current
        return out

    def interior_point(self):
        return self.parts[0].interior_point()

    def is_bounded(self):
        return all(p.is_bounded() for p in self.parts)

    def diameter_hint(self):
        return float(sum(p.diameter_hint() for p in self.parts))


class IntersectionBody(Body):
    """Intersection of parts; convex when every part is convex."""

    def __init__(self, parts):
        if not parts:
            raise ValueError("intersection needs at least one part")
        dims = {p.dim for p in parts}
        if len(dims) != 1:
            raise ValueError("intersection parts have mixed dimensions")
        self.parts = tuple(parts)
        self.dim = dims.pop()
        self.convex = all(p.convex for p in parts)
        self._witness = None

    def contains(self, x):
        return all(p.contains(x) for p in self.parts)

    def contains_batch(self, xs):
        xs = np.atleast_2d(xs)
        mask = np.ones(len(xs), dtype=bool)
        for p in self.parts:
            mask &= p.contains_batch(xs)
        return mask

    def ray_exit_batch(self, p, dirs):
        out = np.full(len(np.atleast_2d(dirs)), np.inf)
        for part in self.parts:
            out = np.minimum(out, part.ray_exit_batch(p, dirs))
        return out

    def set_interior_point(self, x):
        x = _pt(x)
        if not self.contains(x):
            raise PointNotInterior("interior point is not in every part")
        self._witness = x

    def interior_point(self):
        if self._witness is not None:
            return self._witness
        for p in self.parts:
            w = p.interior_point()
            if self.contains(w):
                return w
        raise GeometryError("no part witness lies in the intersection")

    def is_bounded(self):
        return any(p.is_bounded() for p in self.parts)

    def diameter_hint(self):
        return float(min(p.diameter_hint() for p in self.parts))


class TransformedBody(Body):
    """Image of a base body under a projective map.

    On construction (with ``validate=True``) the map's singular hyperplane is
    checked against sampled boundary points of the base: the dehomogenization
    divisor must keep one sign with magnitude above 1e-9.
    """

    def __init__(self, base, map, validate=True, n_boundary=256):
        self.base = base
        self.map = map
        self.dim = base.dim
        self.convex = base.convex
        self._inverse = map.inverse()
        if validate:
            self._validate(n_boundary)

    def _validate(self, n_boundary):
        from .sampling import unit_directions

        w = _pt(self.base.interior_point())
        dirs = unit_directions(self.dim, n_boundary)
        exits = self.base.ray_exit_batch(w, dirs)
        finite = np.isfinite(exits)
        pts = [w]
        if finite.any():
            pts.append(w[None, :] + (1.0 - 1e-9) * exits[finite][:, None] * dirs[finite])
        pts = np.vstack([np.atleast_2d(q) for q in pts])
        M = self.map.matrix
        dens = M[0, 0] + pts @ M[0, 1:]
        if np.min(np.abs(dens)) < 1e-9 or (np.min(dens) < 0 < np.max(dens)):
            raise SingularHyperplaneCrossing(
                "singular hyperplane of the map meets the closure of the base body"
            )

    def contains(self, x):
        try:
            pre = self._inverse.apply(x)
        except ImageAtInfinity:
            return False
        return self.base.contains(pre)

    def contains_batch(self, xs):
        xs = np.atleast_2d(xs)
        h = np.column_stack([np.ones(len(xs)), xs]) @ self._inverse.matrix.T
        wv = h[:, 0]
        ok = np.abs(wv) > AT_INFINITY_RTOL * np.linalg.norm(h, axis=1)
        mask = np.zeros(len(xs), dtype=bool)
        if ok.any():
            mask[ok] = self.base.contains_batch(h[ok, 1:] / wv[ok, None])
        return mask

    def ray_exit_batch(self, p, dirs):
        p = _pt(p)
        dirs = np.atleast_2d(dirs)
        x0 = self._inverse.apply(p)
        J = self._inverse.differential(p)
        Y = dirs @ J.T
        t_base = self.base.ray_exit_batch(x0, Y)
        M = self.map.matrix
        w0 = float(M[0, 0] + M[0, 1:] @ x0)
        wY = Y @ M[0, 1:]
        with np.errstate(divide="ignore", invalid="ignore"):
            t_sing = np.where(np.abs(wY) > 1e-300, -w0 / wY, np.inf)
        # if the divisor vanishes before the base ray exits, the image ray
        # reaches infinity first and the exit is unbounded
        wraps = (t_sing > 0) & (t_sing < t_base)
        out = np.full(len(dirs), np.inf)
        X2 = np.einsum("nd,nd->n", dirs, dirs)

        finite = np.isfinite(t_base) & ~wraps
        if finite.any():
            xs = x0[None, :] + t_base[finite][:, None] * Y[finite]
            h = np.column_stack([np.ones(len(xs)), xs]) @ M.T
            wv = h[:, 0]
            ok = np.abs(wv) > AT_INFINITY_RTOL * np.linalg.norm(h, axis=1)
            lam = np.full(len(xs), np.inf)
            if ok.any():
                ys = h[ok, 1:] / wv[ok, None]
                lv = np.einsum("nd,nd->n", ys - p[None, :], dirs[finite][ok]) / X2[finite][ok]
                lam[ok] = np.where(lv > 0, lv, np.inf)
            out[finite] = lam

        inf_mask = np.isinf(t_base) & ~wraps
        if inf_mask.any():
            h = np.column_stack([np.zeros(int(inf_mask.sum())), Y[inf_mask]]) @ M.T
            wv = h[:, 0]
            ok = np.abs(wv) > AT_INFINITY_RTOL * np.linalg.norm(h, axis=1)
            lam = np.full(len(h), np.inf)
            if ok.any():
                ys = h[ok, 1:] / wv[ok, None]
                lv = np.einsum("nd,nd->n", ys - p[None, :], dirs[inf_mask][ok]) / X2[inf_mask][ok]
                lam[ok] = np.where(lv > 0, lv, np.inf)
            out[inf_mask] = lam
        return out

    def interior_point(self):
        return self.map.apply(self.base.interior_point())

    def is_bounded(self):
        from .sampling import unit_directions

        w = _pt(self.interior_point())
        exits = self.ray_exit_batch(w, unit_directions(self.dim, 128))
        return bool(np.all(np.isfinite(exits)))

    def diameter_hint(self):
        from .sampling import unit_directions

        w = _pt(self.interior_point())
        exits = self.ray_exit_batch(w, unit_directions(self.dim, 128))
        if not np.all(np.isfinite(exits)):
            return np.inf
        return float(2.0 * exits.max())


def convex_hull(body):
    """Exact convex hull of a 2D polygon or union of 2D polygons, as half-spaces."""
    if isinstance(body, HalfspacePolytope):
        parts = [body]
    elif isinstance(body, UnionBody):
        parts = list(body.parts)
    else:
        raise UnsupportedDimension("convex_hull supports 2D polytopes and their unions")
    pts = []
    for p in parts:
        if not isinstance(p, HalfspacePolytope) or p.dim != 2:
            raise UnsupportedDimension("convex_hull supports 2D polytopes and their unions")
        pts.append(p.vertices())
    return HalfspacePolytope.from_vertices(np.vstack(pts))


def is_proper(body):
    """True iff the convex body contains no affine line."""
    if not getattr(body, "convex", True):
        raise TypeError("is_proper is defined for convex bodies only")
    if isinstance(body, EllipsoidBody) or body.is_bounded():
        return True
    if isinstance(body, HalfspacePolytope):
        # the lineality space of {Ax <= b} is the null space of A
        return int(np.linalg.matrix_rank(body.A, tol=1e-10)) == body.dim
    if isinstance(body, IntersectionBody) and any(
        is_proper(p) for p in body.parts if p.convex
    ):
        # a subset of a proper domain is proper
        return True
    # otherwise certify by sampling candidate line directions
    from .sampling import unit_directions

    w = _pt(body.interior_point())
    dirs = unit_directions(body.dim, 256)
    fwd = body.ray_exit_batch(w, dirs)
    for t, u in zip(fwd, dirs):
        if np.isinf(t) and np.isinf(body.ray_exit_batch(w, -u[None, :])[0]):
            return False
    return True


@dataclass(frozen=True)
class BoundaryFrame:
    """Data of the affine normalization at a nearest boundary point."""

    map: ProjectiveMap
    delta: float
    foot: np.ndarray = field(repr=False)
    normal: np.ndarray = field(repr=False)  # outward unit normal
    grad_norm: float = 0.0
    alpha: float = 1.0  # normal-coordinate scale, 1/depth


def _level_data(body):
    """(g, grad, hess) evaluators for bodies supporting boundary frames."""
    if isinstance(body, EllipsoidBody):
        c, Q = body.center, body.Q

        def g(x):
            v = np.atleast_2d(x) - c[None, :]
            return np.einsum("nd,de,ne->n", v, Q, v) - 1.0

        return g, (lambda x: 2.0 * Q @ (_pt(x) - c)), (lambda x: 2.0 * Q)
    if isinstance(body, LevelSetBody):
        if body.grad is None or body.hess is None:
            raise GeometryError("boundary frame needs gradient and Hessian evaluators")
        return body.g_many, body.grad, body.hess
    raise GeometryError(f"boundary frame unsupported for {type(body).__name__}")


def _nearest_boundary_point(body, q, max_iter=500):
    """Projected-gradient descent on squared distance to the boundary {g=0}."""
    g, grad, _ = _level_data(body)
    q = _pt(q)
    scale = min(body.diameter_hint(), 1e6)

    def project(x):
        # Newton steps along the gradient direction onto g = 0
        for _ in range(60):
            val = float(g(x[None, :])[0])
            gr = grad(x)
            ng2 = gr @ gr
            if ng2 < 1e-30:
                raise NoUniqueProjection("vanishing gradient while projecting")
            step = val / ng2
            x = x - step * gr
            if abs(val) < 1e-15 * max(1.0, scale):
                break
        return x

    x = project(q.copy())
    for _ in range(max_iter):
        gr = grad(x)
        n = gr / np.linalg.norm(gr)
        r = (q - x) - ((q - x) @ n) * n
        if np.linalg.norm(r) <= 1e-13 * max(1.0, np.linalg.norm(q - x), 1e-6 * scale):
            return x
        x = project(x + r)
    raise NoUniqueProjection("nearest-boundary iteration did not converge")


def _support_depth(body, foot, inward):
    """Extent of the body along the inward normal from the tangent plane at foot."""
    if isinstance(body, EllipsoidBody):
        Qi = np.linalg.inv(body.Q)
        nu = -inward  # outward
        far = body.center - (Qi @ nu) / np.sqrt(nu @ Qi @ nu)
        return float(inward @ (far - foot))
    if not body.is_bounded():
        return np.inf
    from scipy.optimize import minimize

    g, grad, _ = _level_data(body)
    x0 = _pt(body.interior_point())
    res = minimize(
        lambda x: -float(inward @ x),
        x0,
        jac=lambda x: -inward,
        constraints=[{"type": "ineq", "fun": lambda x: -float(g(x[None, :])[0]),
                      "jac": lambda x: -np.asarray(grad(x), dtype=float)}],
        method="SLSQP",
        options={"maxiter": 200, "ftol": 1e-14},
    )
    return float(inward @ (res.x - foot))


def boundary_frame(body, q):
    """Affine normalization at the boundary point nearest to q.

    The returned map N sends the foot point to the origin, the tangent plane
    to {x_1 = 0} with the body in {x_1 < 0}, rescales the normal axis so the
    body's extent there is exactly 1, and rescales tangential axes so the
    tangential Hessian of the transformed defining function is the identity.
    ``delta`` is the first coordinate of -N(q).
    """
    q = _pt(q)
    g, grad, hess = _level_data(body)
    foot = _nearest_boundary_point(body, q)
    gr = np.asarray(grad(foot), dtype=float)
    grad_norm = float(np.linalg.norm(gr))
    if grad_norm < 1e-12:
        raise NoUniqueProjection("vanishing boundary gradient")
    nu = gr / grad_norm  # outward
    d = body.dim

    # orthonormal frame with first vector nu
    basis = np.eye(d)
    idx = int(np.argmax(np.abs(nu)))
    basis[:, [0, idx]] = basis[:, [idx, 0]]
    basis[:, 0] = nu
    Qmat, _ = np.linalg.qr(basis)
    if Qmat[:, 0] @ nu < 0:
        Qmat[:, 0] *= -1.0
    R = Qmat.T  # R @ nu = e_1

    H = np.asarray(hess(foot), dtype=float)
    tang = Qmat[:, 1:]  # columns: tangent directions
    Ht = tang.T @ H @ tang
    evals, evecs = np.linalg.eigh(Ht)
    if evals[0] <= 1e-8:
        raise NotStrictlyConvex(
            f"tangential Hessian eigenvalue {evals[0]:.3g} <= 1e-8 at the foot point"
        )
    T = (evecs * np.sqrt(evals)) @ evecs.T  # sqrt(Ht): new tangential Hessian = I

    depth = _support_depth(body, foot, -nu)
    alpha = 1.0 if not np.isfinite(depth) else 1.0 / depth

    L = np.zeros((d, d))
    L[0, 0] = alpha
    if d > 1:
        L[1:, 1:] = T
    lin = L @ R
    N = ProjectiveMap.affine(lin, -lin @ foot)
    delta = -float(N.apply(q)[0])
    return BoundaryFrame(map=N, delta=delta, foot=foot, normal=nu,
                         grad_norm=grad_norm, alpha=alpha)


def normalize_boundary_frame(body, q):
    """Boundary normalization (map, delta); see ``boundary_frame`` for details."""
    fr = boundary_frame(body, q)
    return fr.map, fr.delta


def minorant_f_tilde(eps, r, xprime):
    """Piecewise convex minorant used to sandwich strictly convex boundaries.

    Equals (1-eps)|x'|^2 inside radius r and continues linearly with matched
    value and slope outside: (1-eps) r (2|x'| - r).
    """
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must be in (0, 1)")
    if r <= 0.0:
        raise ValueError("r must be positive")
    s = float(np.linalg.norm(np.atleast_1d(np.asarray(xprime, dtype=float))))
    if s <= r:
        return (1.0 - eps) * s * s
    return (1.0 - eps) * r * (2.0 * s - r)
