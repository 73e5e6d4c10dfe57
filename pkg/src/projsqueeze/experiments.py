"""Seeded experiments emitting deterministic CSV.

Each experiment is a pure function of its parameters: every random draw
comes from a SeedSequence keyed on (seed, experiment tag, row indices), so
rows can be computed in any order, on any number of threads, and the
serialized CSV is byte-identical run to run.  ``runtime_ms`` is emitted as
0 unless timing is requested, keeping the bytes reproducible.
"""

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bodies import (
    EllipsoidBody,
    HalfspacePolytope,
    IntersectionBody,
    LevelSetBody,
    convex_hull_2d,
)
from .bodyspec import builtin_body, polytope_spec_text, resolve_body, spec_hash
from .metrics import caratheodory_C, finsler_F
from .projective import ball_automorphism
from .squeezing import (
    optimize_squeeze,
    upper_bound_squeeze,
    witness_strictly_convex,
)

_TAG_GAP = 0x6A9
_TAG_POINTS = 0x901


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    return str(value)


@dataclass
class ExperimentResult:
    """Rows plus metadata; ``to_csv`` is the canonical serialization."""

    experiment: str
    columns: list
    rows: list = field(default_factory=list)
    seed: int = 0

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    def column(self, name):
        idx = self.columns.index(name)
        out = []
        for row in self.rows:
            v = row[idx]
            out.append(float(v) if isinstance(v, (int, float, np.floating,
                                                  np.integer)) else v)
        return np.array(out)

    def write(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def _run_rows(task, n_rows, workers):
    if workers is None or workers <= 1:
        return [task(i) for i in range(n_rows)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, range(n_rows)))


def _elapsed_ms(t0, timing):
    return (time.perf_counter() - t0) * 1e3 if timing else 0.0


def random_polygon(seed, index):
    """Convex hull of 5..12 uniform points in the unit square, resampled
    until the hull is a genuine polygon."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, _TAG_GAP, index]))
    while True:
        m = int(rng.integers(5, 13))
        hull = convex_hull_2d(rng.random((m, 2)))
        if len(hull) >= 3:
            return HalfspacePolytope.from_vertices(hull)


def _interior_points(body, seed, index, n_points):
    """Interior sample points, the last fifth pushed to within
    1e-3 * diameter of the boundary."""
    rng = np.random.default_rng(
        np.random.SeedSequence([seed, _TAG_POINTS, index]))
    z = body.witness
    diam = body.diameter_hint()
    n_near = max(1, n_points // 5)
    pts = []
    for j in range(n_points):
        ang = 2.0 * np.pi * rng.random()
        u = np.array([np.cos(ang), np.sin(ang)])
        t_exit = float(body.ray_exit_batch(z, u[None, :])[0])
        if j < n_points - n_near:
            frac = 0.05 + 0.9 * rng.random()
            t = frac * t_exit
        else:
            t = max(t_exit - 1e-3 * diam, 0.5 * t_exit)
        pts.append(z + t * u)
    return pts


GAP_COLUMNS = ["experiment", "spec_hash", "seed", "body_index", "point_index",
               "n_vertices", "dist_frac", "lower", "floor", "runtime_ms"]


def exp_gap_scan(n_bodies=100, n_points=25, seed=0, budget=200, workers=1,
                 timing=False):
    """Lower bounds over random polygons, tracking the running floor.

    Points include near-boundary samples at distance about 1e-3 of the
    diameter; the floor column is the running minimum of the lower bounds
    in row order.
    """

    def one_body(i):
        t0 = time.perf_counter()
        body = random_polygon(seed, i)
        text = polytope_spec_text(body.vertices())
        h = spec_hash(text)
        diam = body.diameter_hint()
        rows = []
        for j, z in enumerate(_interior_points(body, seed, i, n_points)):
            lower = optimize_squeeze(body, z, budget=budget, seed=seed).lower
            dist = float(np.min(body.b - body.A @ z)) / diam
            rows.append(["gap_scan", h, seed, i, j, len(body.vertices()),
                         dist, lower, 0.0, _elapsed_ms(t0, timing)])
            t0 = time.perf_counter()
        return rows

    per_body = _run_rows(one_body, n_bodies, workers)
    result = ExperimentResult("gap_scan", GAP_COLUMNS, seed=seed)
    floor = np.inf
    for rows in per_body:
        for row in rows:
            floor = min(floor, row[7])
            row[8] = floor
            result.rows.append(row)
    return result


DECAY_COLUMNS = ["experiment", "spec_hash", "seed", "k", "t", "F", "C",
                 "upper", "slope", "runtime_ms"]


def exp_nonconvex_decay(seed=0, workers=1, timing=False,
                        direction_samples=512):
    """Upper-bound decay toward the reflex corner of the L-shaped union.

    Points approach the reflex vertex from inside along the inward diagonal;
    the direction of interest points back at the vertex.  The slope column
    repeats the log-log fit of upper against t over the middle eight of the
    eleven points.
    """
    handle = resolve_body("lshape")
    body = handle.body
    corner = np.zeros(2)
    inward = np.array([-1.0, -1.0]) / np.sqrt(2.0)
    X = -inward
    ks = list(range(2, 13))

    def one_row(idx):
        t0 = time.perf_counter()
        k = ks[idx]
        t = 2.0 ** (-k)
        p = corner + t * inward
        F = finsler_F(body, p, X).F
        C = caratheodory_C(body, p, X)
        upper = upper_bound_squeeze(body, p,
                                    direction_samples=direction_samples)
        return ["nonconvex_decay", handle.hash, seed, k, t, F, C, upper,
                0.0, _elapsed_ms(t0, timing)]

    rows = _run_rows(one_row, len(ks), workers)
    ts = np.array([row[4] for row in rows])
    ups = np.array([row[7] for row in rows])
    mid = slice(2, 10)  # middle 8 of 11
    slope = float(np.polyfit(np.log(ts[mid]), np.log(ups[mid]), 1)[0])
    for row in rows:
        row[8] = slope
    return ExperimentResult("nonconvex_decay", DECAY_COLUMNS, rows, seed=seed)


STRICT_COLUMNS = ["experiment", "spec_hash", "seed", "t", "witness_ratio",
                  "lower", "one_minus_lower", "runtime_ms"]


def _rightmost_frame(body):
    """Boundary point of maximal first coordinate and its inward normal.

    Valid for the bodies offered here, which are symmetric about the first
    axis so the axis ray from the anchor exits at the support point.
    """
    if isinstance(body, EllipsoidBody):
        Qi = np.linalg.inv(body.Q)
        nu = np.zeros(body.dim)
        nu[0] = 1.0
        q = body.center + Qi @ nu / np.sqrt(nu @ Qi @ nu)
        return q, -nu
    z = body.witness
    e1 = np.zeros(body.dim)
    e1[0] = 1.0
    t = float(body.ray_exit_batch(z, e1[None, :])[0])
    q = z + t * e1
    grad = body.grad(q)
    return q, -grad / np.linalg.norm(grad)


def exp_strict_limit(body_ref="quartic", dists=(1e-1, 1e-2, 1e-3, 1e-4, 1e-5),
                     budget=2000, seed=0, workers=1, timing=False):
    """Squeezing lower bounds on the inward normal of a smooth boundary point."""
    handle = resolve_body(body_ref)
    body = handle.body
    if not isinstance(body, (EllipsoidBody, LevelSetBody)):
        raise TypeError("strict-limit experiment needs a smooth body")
    q_star, inward = _rightmost_frame(body)
    dists = list(dists)

    def one_row(idx):
        t0 = time.perf_counter()
        t = float(dists[idx])
        q = q_star + t * inward
        wr = witness_strictly_convex(body, q).ratio
        lower = optimize_squeeze(body, q, budget=budget, seed=seed).lower
        return ["strict_limit", handle.hash, seed, t, wr, lower, 1.0 - lower,
                _elapsed_ms(t0, timing)]

    rows = _run_rows(one_row, len(dists), workers)
    return ExperimentResult("strict_limit", STRICT_COLUMNS, rows, seed=seed)


ORBIT_COLUMNS = ["experiment", "spec_hash", "seed", "j", "a_j", "s_origin",
                 "s_cap_qj", "jK_030", "jK_060", "jK_085", "runtime_ms"]

_CAP_HALFSPACE = 0.5


def _cap_body():
    ball = builtin_body("ball2")
    half = HalfspacePolytope(np.array([[-1.0, 0.0]]),
                            np.array([-_CAP_HALFSPACE]),
                            witness=np.array([0.75, 0.0]))
    cap = IntersectionBody([ball, half])
    cap.set_interior_point(np.array([0.75, 0.0]))
    return cap


def _grid_in_disk(rho, per_side=9):
    xs = np.linspace(-rho, rho, per_side)
    pts = np.array([[x, y] for x in xs for y in xs])
    return pts[np.linalg.norm(pts, axis=1) <= rho + 1e-12]

def _first_cover_index(rho, j_max=40):
    """Smallest j whose automorphism sends the grid into the half-space cap."""
    K = _grid_in_disk(rho)
    for j in range(2, j_max + 1):
        a = np.array([1.0 - 2.0 ** (-j), 0.0])
        phi = ball_automorphism(a).inverse()
        img = phi.apply_batch(K)
        if np.all(img[:, 0] > _CAP_HALFSPACE):
            return j
    return -1


def exp_orbit(seed=0, js=tuple(range(2, 10)), budget=1500, workers=1,
              timing=False):
    """Squeezing along a boundary-bound automorphism orbit of the disk.

    The orbit points a_j approach the unit vector e1; the cap is the part of
    the disk beyond x = 1/2.  The jK columns record, per nested grid radius,
    the first j whose automorphism pulls the grid inside the cap.
    """
    handle = resolve_body("ball2")
    ball = handle.body
    cap = _cap_body()
    js = list(js)
    s0 = optimize_squeeze(ball, np.zeros(2), budget=budget, seed=seed).lower
    covers = [_first_cover_index(rho) for rho in (0.3, 0.6, 0.85)]

    def one_row(idx):
        t0 = time.perf_counter()
        j = js[idx]
        a = 1.0 - 2.0 ** (-j)
        qj = np.array([a, 0.0])
        s_cap = optimize_squeeze(cap, qj, budget=budget, seed=seed).lower
        return ["orbit", handle.hash, seed, j, a, s0, s_cap,
                covers[0], covers[1], covers[2], _elapsed_ms(t0, timing)]

    rows = _run_rows(one_row, len(js), workers)
    return ExperimentResult("orbit", ORBIT_COLUMNS, rows, seed=seed)


EXPERIMENTS = {
    "gap-scan": exp_gap_scan,
    "nonconvex-decay": exp_nonconvex_decay,
    "strict-limit": exp_strict_limit,
    "orbit": exp_orbit,
}


def run_experiment(name, **kwargs):
    if name not in EXPERIMENTS:
        raise KeyError(f"unknown experiment {name!r}; "
                       f"choose from {', '.join(sorted(EXPERIMENTS))}")
    return EXPERIMENTS[name](**kwargs)


def verify_row(result, csv_path, row_number):
    """Compare data row ``row_number`` (1-based) of a written CSV against a
    freshly computed result; returns (ok, expected_line, actual_line)."""
    lines = result.to_csv().splitlines()
    with open(csv_path, newline="") as fh:
        disk_lines = fh.read().splitlines()
    if not 1 <= row_number < len(lines):
        raise IndexError(f"row {row_number} out of range "
                         f"(result has {len(lines) - 1} data rows)")
    if row_number >= len(disk_lines):
        return False, lines[row_number], "<missing>"
    expected = lines[row_number]
    actual = disk_lines[row_number]
    return expected == actual, expected, actual
