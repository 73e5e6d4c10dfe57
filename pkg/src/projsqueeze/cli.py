"""Command-line interface.

Every command is a thin client of the HTTP service: by default requests go
to an in-process test client (no server needed), and ``--server URL``
points the same requests at a remote instance.  Exit codes: 0 success,
2 invalid body spec or usage, 3 geometric precondition violation.
"""

import sys

import click

from .bodyspec import resolve_body
from .errors import BodySpecError

SPEC_ERROR_EXIT = 2
PRECONDITION_EXIT = 3


class ServiceClient:
    """Posts to the in-process app or to a remote server."""

    def __init__(self, server=None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=None)
        else:
            import warnings

            with warnings.catch_warnings():
                # some starlette builds warn about their httpx test client
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import app

            self._client = TestClient(app)

    def post(self, path, payload):
        resp = self._client.post(path, json=payload)
        if resp.status_code >= 400:
            try:
                detail = resp.json().get("detail", {})
            except Exception:
                detail = {}
            message = detail.get("message") or resp.text
            kind = detail.get("kind", "error")
            click.echo(f"error ({kind}): {message}", err=True)
            if resp.status_code == 400:
                raise SystemExit(SPEC_ERROR_EXIT)
            if resp.status_code == 422:
                raise SystemExit(PRECONDITION_EXIT)
            raise SystemExit(1)
        return resp.json()


def _vector(text):
    try:
        return [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise click.UsageError(f"cannot parse vector {text!r}")


def _body_text(ref):
    """Resolve builtin names and local files before talking to the service."""
    try:
        return resolve_body(ref).text
    except BodySpecError as exc:
        click.echo(f"error (spec_error): {exc}", err=True)
        raise SystemExit(SPEC_ERROR_EXIT)


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="remote service URL (default: run in process)")
@click.pass_context
def main(ctx, server):
    """Projective metrics and squeezing estimates on convex domains."""
    ctx.obj = ServiceClient(server)


@main.command()
@click.option("--body", required=True, help="builtin name or spec file")
@click.option("--p", "p", required=True, help="base point, e.g. 0,0")
@click.option("--q", "q", default=None, help="second point for distances")
@click.option("--x", "--X", "x", default=None, help="direction for F and C")
@click.option("--dist", "show", flag_value="dist", default=None,
              help="print only the Hilbert distance")
@click.option("--f", "--F", "show", flag_value="F",
              help="print only the Finsler value")
@click.option("--c", "--C", "show", flag_value="C",
              help="print only the hull-route value")
@click.option("--nodes", default=64, show_default=True,
              help="quadrature nodes for the integrated distance")
@click.pass_obj
def metric(client, body, p, q, x, show, nodes):
    """Evaluate F, C, and distances at a point."""
    if show == "dist" and q is None:
        raise click.UsageError("--dist needs --q")
    if show in ("F", "C") and x is None:
        raise click.UsageError(f"--{show} needs --X")
    payload = {"body": _body_text(body), "p": _vector(p), "nodes": nodes}
    if q is not None:
        payload["q"] = _vector(q)
    if x is not None:
        payload["X"] = _vector(x)
    out = client.post("/metric", payload)
    labels = [("F", "F"), ("C", "C"), ("hilbert", "hilbert"),
              ("integrated", "integrated"),
              ("P_plus", "P+"), ("P_minus", "P-")]
    if show == "dist":
        click.echo(f"{out['hilbert']:.12g}")
        return
    if show in ("F", "C"):
        click.echo(f"{out[show]:.12g}")
        return
    for key, label in labels:
        if out.get(key) is not None:
            click.echo(f"{label} = {out[key]:.12g}")


@main.command()
@click.option("--body", required=True)
@click.option("--z", required=True, help="interior point, e.g. 0.3,0.2")
@click.option("--budget", default=2000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.pass_obj
def squeeze(client, body, z, budget, seed):
    """Certified lower bound for the squeezing value at z."""
    payload = {"body": _body_text(body), "z": _vector(z),
               "budget": budget, "seed": seed}
    out = client.post("/squeeze", payload)
    click.echo(f"lower = {out['lower']:.12g}")
    if out.get("upper") is not None:
        click.echo(f"upper = {out['upper']:.12g}")
    click.echo(f"method = {out['method']}")
    if out.get("reason"):
        click.echo(f"reason = {out['reason']}")
    w = out.get("witness")
    if w:
        click.echo(f"r_in = {w['r_in']:.12g}  r_out = {w['r_out']:.12g}")
        click.echo("witness matrix:")
        for row in w["matrix"]:
            click.echo("  " + "  ".join(f"{v: .12g}" for v in row))


@main.command()
@click.option("--spec", "--body", "spec", required=True,
              help="builtin name or spec file to check")
@click.pass_obj
def validate(client, spec):
    """Parse a body spec and report its kind, dimension, and hash."""
    out = client.post("/bodies/validate", {"spec": _body_text(spec)})
    click.echo(f"ok: {out['kind']} dim={out['dim']} "
               f"bounded={out['bounded']} hash={out['spec_hash']}")


def _finish_experiment(name, payload, client, out_path, verify):
    result = client.post(f"/experiments/{name}", payload)
    csv_text = result["csv"]
    if verify is not None:
        if out_path is None:
            raise click.UsageError("--verify needs --out FILE to compare against")
        lines = csv_text.splitlines()
        if not 1 <= verify < len(lines):
            raise click.UsageError(
                f"row {verify} out of range (1..{len(lines) - 1})")
        try:
            with open(out_path) as fh:
                disk = fh.read().splitlines()
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(1)
        actual = disk[verify] if verify < len(disk) else "<missing>"
        if actual == lines[verify]:
            click.echo(f"row {verify} verified")
            return
        click.echo(f"row {verify} MISMATCH", err=True)
        click.echo(f"  expected: {lines[verify]}", err=True)
        click.echo(f"  on disk:  {actual}", err=True)
        raise SystemExit(1)
    if out_path is not None:
        with open(out_path, "w", newline="") as fh:
            fh.write(csv_text)
        click.echo(f"wrote {result['n_rows']} rows to {out_path}")
    else:
        click.echo(csv_text, nl=False)


def _common_exp_options(fn):
    fn = click.option("--seed", default=0, show_default=True)(fn)
    fn = click.option("--out", "out_path", default=None,
                      type=click.Path(), help="CSV output path")(fn)
    fn = click.option("--verify", default=None, type=int, metavar="ROW",
                      help="recompute and compare data row ROW of --out")(fn)
    fn = click.option("--workers", default=1, show_default=True)(fn)
    fn = click.option("--timing", is_flag=True,
                      help="fill runtime_ms (breaks byte reproducibility)")(fn)
    return fn


@main.group()
def exp():
    """Seeded CSV experiments."""


@exp.command("gap-scan")
@_common_exp_options
@click.option("--samples", "n_bodies", default=100, show_default=True,
              help="number of random polygons")
@click.option("--points", "n_points", default=25, show_default=True,
              help="interior points per polygon")
@click.option("--budget", default=200, show_default=True)
@click.pass_obj
def exp_gap_scan_cmd(client, seed, out_path, verify, workers, timing,
                     n_bodies, n_points, budget):
    """Lower-bound floor over random polygons."""
    payload = {"seed": seed, "workers": workers, "timing": timing,
               "n_bodies": n_bodies, "n_points": n_points, "budget": budget}
    _finish_experiment("gap-scan", payload, client, out_path, verify)


@exp.command("nonconvex-decay")
@_common_exp_options
@click.option("--samples", "direction_samples", default=512, show_default=True,
              help="directions for the upper bound")
@click.pass_obj
def exp_decay_cmd(client, seed, out_path, verify, workers, timing,
                  direction_samples):
    """Upper-bound decay toward a reflex corner of the L-shaped union."""
    payload = {"seed": seed, "workers": workers, "timing": timing,
               "direction_samples": direction_samples}
    _finish_experiment("nonconvex-decay", payload, client, out_path, verify)


@exp.command("strict-limit")
@_common_exp_options
@click.option("--body", default="quartic", show_default=True,
              help="ball2, ellipse(a,b), or quartic")
@click.option("--budget", default=2000, show_default=True)
@click.pass_obj
def exp_strict_cmd(client, seed, out_path, verify, workers, timing, body,
                   budget):
    """Lower bounds on the inward normal of a smooth boundary point."""
    payload = {"seed": seed, "workers": workers, "timing": timing,
               "body": body, "budget": budget}
    _finish_experiment("strict-limit", payload, client, out_path, verify)


@exp.command("orbit")
@_common_exp_options
@click.option("--budget", default=1500, show_default=True)
@click.pass_obj
def exp_orbit_cmd(client, seed, out_path, verify, workers, timing, budget):
    """Squeezing along a boundary-bound automorphism orbit of the disk."""
    payload = {"seed": seed, "workers": workers, "timing": timing,
               "budget": budget}
    _finish_experiment("orbit", payload, client, out_path, verify)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service with uvicorn."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
