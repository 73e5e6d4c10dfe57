"""HTTP service exposing metrics, squeezing, and the experiment drivers.

All geometry runs in-process; the CLI talks to this app through an
in-process test client by default, so the service is also the single
integration point for request validation and error mapping:

* invalid body specs  -> 400 with kind ``spec_error`` and a line number
* geometric precondition violations -> 422 with kind ``precondition``
"""

import numpy as np
from fastapi import FastAPI
from fastapi.requests import Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..bodyspec import resolve_body
from ..errors import BodySpecError, GeometryError
from ..experiments import EXPERIMENTS
from ..metrics import hilbert_distance, integrated_distance, metric_sample
from ..squeezing import optimize_squeeze, upper_bound_squeeze
from .schemas import (
    ExperimentRequest,
    ExperimentResponse,
    HealthResponse,
    MetricRequest,
    MetricResponse,
    SqueezeRequest,
    SqueezeResponse,
    ValidateRequest,
    ValidateResponse,
    WitnessInfo,
)


def _clean(value):
    """Make certificate payloads JSON-safe."""
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _opt(x):
    return None if x is None else float(x)


def create_app():
    app = FastAPI(title="projsqueeze", version=__version__)

    @app.exception_handler(BodySpecError)
    async def spec_error_handler(request: Request, exc: BodySpecError):
        return JSONResponse(status_code=400, content={
            "detail": {"kind": "spec_error", "message": str(exc),
                       "line": exc.line}})

    @app.exception_handler(GeometryError)
    async def precondition_handler(request: Request, exc: GeometryError):
        return JSONResponse(status_code=422, content={
            "detail": {"kind": "precondition",
                       "error": type(exc).__name__, "message": str(exc)}})

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__)

    @app.post("/bodies/validate", response_model=ValidateResponse)
    def validate(req: ValidateRequest):
        handle = resolve_body(req.spec, allow_files=False)
        body = handle.body
        return ValidateResponse(ok=True, kind=type(body).__name__,
                                dim=body.dim, spec_hash=handle.hash,
                                bounded=body.is_bounded())

    @app.post("/metric", response_model=MetricResponse)
    def metric(req: MetricRequest):
        handle = resolve_body(req.body, allow_files=False)
        body = handle.body
        p = np.asarray(req.p, dtype=float)
        out = MetricResponse(spec_hash=handle.hash)
        if req.X is not None:
            s = metric_sample(body, p, np.asarray(req.X, dtype=float))
            out.F, out.C = float(s.F), _opt(s.C)
            out.P_plus, out.P_minus = float(s.P_plus), float(s.P_minus)
        if req.q is not None:
            q = np.asarray(req.q, dtype=float)
            out.hilbert = float(hilbert_distance(body, p, q))
            out.integrated = float(
                integrated_distance(body, p, q, quad_points=req.nodes))
        return out

    @app.post("/squeeze", response_model=SqueezeResponse)
    def squeeze(req: SqueezeRequest):
        handle = resolve_body(req.body, allow_files=False)
        body = handle.body
        z = np.asarray(req.z, dtype=float)
        est = optimize_squeeze(body, z, budget=req.budget, seed=req.seed)
        upper = None
        if not getattr(body, "convex", True) and body.dim == 2:
            upper = upper_bound_squeeze(body, z)
        witness = None
        if est.witness is not None:
            witness = WitnessInfo(matrix=est.witness.map.matrix.tolist(),
                                  r_in=float(est.witness.r_in),
                                  r_out=float(est.witness.r_out),
                                  certificate=_clean(est.witness.certificate))
        return SqueezeResponse(spec_hash=handle.hash, lower=float(est.lower),
                               upper=_opt(upper), method=est.method,
                               reason=est.reason, witness=witness)

    @app.post("/experiments/{name}", response_model=ExperimentResponse)
    def experiment(name: str, req: ExperimentRequest):
        if name not in EXPERIMENTS:
            return JSONResponse(status_code=404, content={
                "detail": {"kind": "unknown_experiment", "message":
                           f"unknown experiment {name!r}"}})
        kwargs = {"seed": req.seed, "workers": req.workers,
                  "timing": req.timing}
        if req.budget is not None:
            kwargs["budget"] = req.budget
        if name == "gap-scan":
            if req.n_bodies is not None:
                kwargs["n_bodies"] = req.n_bodies
            if req.n_points is not None:
                kwargs["n_points"] = req.n_points
        if name == "nonconvex-decay":
            kwargs.pop("budget", None)
            if req.direction_samples is not None:
                kwargs["direction_samples"] = req.direction_samples
        if name == "strict-limit":
            if req.body is not None:
                kwargs["body_ref"] = req.body
            if req.dists is not None:
                kwargs["dists"] = tuple(req.dists)
        if name == "orbit" and req.js is not None:
            kwargs["js"] = tuple(req.js)
        result = EXPERIMENTS[name](**kwargs)
        return ExperimentResponse(experiment=result.experiment,
                                  seed=result.seed, columns=result.columns,
                                  n_rows=len(result.rows),
                                  csv=result.to_csv())

    return app


app = create_app()
