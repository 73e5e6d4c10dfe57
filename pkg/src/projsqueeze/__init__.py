"""Projective-invariant metrics on convex domains and numerical estimation
of the projective squeezing function.

The package provides homogeneous-coordinate projective maps, convex body
representations with exact ray casting, the projective Finsler/Hilbert
metrics, certified lower bounds for the squeezing value via explicit
witnesses and derivative-free search, and seeded CSV experiments behind a
small HTTP service and CLI.
"""

__version__ = "0.1.0"

from .bodies import (
    BoundaryFrame,
    EllipsoidBody,
    HalfspacePolytope,
    IntersectionBody,
    LevelSetBody,
    TransformedBody,
    UnionBody,
    convex_hull,
    is_proper,
    minorant_f_tilde,
    normalize_boundary_frame,
)
from .bodyspec import (
    BodyHandle,
    builtin_body,
    builtin_names,
    parse_body_spec,
    resolve_body,
    spec_hash,
)
from .errors import BodySpecError, GeometryError
from .metrics import (
    MetricSample,
    caratheodory_C,
    finsler_F,
    hilbert_distance,
    integrated_distance,
    metric_sample,
)
from .projective import (
    ProjectiveMap,
    ball_automorphism,
    ball_to_paraboloid,
    cross_ratio,
    orthant_ball_map,
    orthant_ball_radius,
)
from .squeezing import (
    SqueezeEstimate,
    SqueezeWitness,
    certify_witness,
    optimize_squeeze,
    oracle_squeeze_2d,
    upper_bound_squeeze,
    witness_ball_point,
    witness_recenter_scale,
    witness_strictly_convex,
)

__all__ = [
    "__version__",
    "BodyHandle",
    "BodySpecError",
    "BoundaryFrame",
    "EllipsoidBody",
    "GeometryError",
    "HalfspacePolytope",
    "IntersectionBody",
    "LevelSetBody",
    "MetricSample",
    "ProjectiveMap",
    "SqueezeEstimate",
    "SqueezeWitness",
    "TransformedBody",
    "UnionBody",
    "ball_automorphism",
    "ball_to_paraboloid",
    "builtin_body",
    "builtin_names",
    "caratheodory_C",
    "certify_witness",
    "convex_hull",
    "cross_ratio",
    "finsler_F",
    "hilbert_distance",
    "integrated_distance",
    "is_proper",
    "metric_sample",
    "minorant_f_tilde",
    "normalize_boundary_frame",
    "optimize_squeeze",
    "oracle_squeeze_2d",
    "orthant_ball_map",
    "orthant_ball_radius",
    "parse_body_spec",
    "resolve_body",
    "spec_hash",
    "upper_bound_squeeze",
    "witness_ball_point",
    "witness_recenter_scale",
    "witness_strictly_convex",
]
