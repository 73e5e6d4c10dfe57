"""Text format and builtin catalog for convex body specifications.

A body spec is a small line-oriented text format:

    # comment
    type = polytope | ellipsoid | levelset | union | transformed
    key = value ...           scalars and vectors, whitespace separated
    [section]                 matrix rows follow, one row per line

Per type:

* ``polytope``: either a ``[A]`` section plus ``b = ...``, or a
  ``[vertices]`` section (2D only).  Optional ``witness = ...``.
* ``ellipsoid``: ``center = ...`` plus either ``semiaxes = ...`` or a
  ``[Q]`` section with the quadratic form matrix.
* ``levelset``: ``name = quartic`` or ``name = pnorm <p> <dim>``.
* ``union``: ``[parts]`` section; each row is a builtin name or
  ``box x0 y0 x1 y1``.
* ``transformed``: ``base = <builtin>`` plus a ``[map]`` section with the
  (d+1) x (d+1) homogeneous matrix.

``parse_body_spec`` raises :class:`BodySpecError` with a 1-based line
number for malformed input.  Builtin names (``ball2``, ``square``,
``triangle``, ``ellipse(a,b)``, ``quartic``, ``lshape``, ``frankelV(d)``,
...) resolve through the same path so every body has a canonical spec
text and a stable content hash.
"""

import hashlib
import os
import re

import numpy as np

from .bodies import (
    EllipsoidBody,
    HalfspacePolytope,
    LevelSetBody,
    TransformedBody,
    UnionBody,
)
from .errors import BodySpecError
from .projective import ProjectiveMap

_TYPES = ("polytope", "ellipsoid", "levelset", "union", "transformed")


def _floats(text, line):
    try:
        vals = [float(tok) for tok in text.split()]
    except ValueError:
        raise BodySpecError(f"expected numbers, got {text!r}", line=line)
    if not vals:
        raise BodySpecError("expected at least one number", line=line)
    return np.array(vals)


def _scan(text):
    """Split spec text into key/value pairs and sections, keeping line numbers."""
    keys = {}
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise BodySpecError("unterminated section header", line=lineno)
            name = line[1:-1].strip()
            if not name:
                raise BodySpecError("empty section name", line=lineno)
            if name in sections:
                raise BodySpecError(f"duplicate section [{name}]", line=lineno)
            current = []
            sections[name] = (lineno, current)
        elif "=" in line:
            key, _, val = line.partition("=")
            key = key.strip()
            if key in keys:
                raise BodySpecError(f"duplicate key {key!r}", line=lineno)
            keys[key] = (lineno, val.strip())
            current = None
        elif current is not None:
            current.append((lineno, line))
        else:
            raise BodySpecError(f"cannot parse line {line!r}", line=lineno)
    return keys, sections


def _matrix(sections, name, *, line_of_use):
    if name not in sections:
        raise BodySpecError(f"missing [{name}] section", line=line_of_use)
    start, rows = sections.pop(name)
    if not rows:
        raise BodySpecError(f"section [{name}] is empty", line=start)
    parsed = [_floats(text, ln) for ln, text in rows]
    width = len(parsed[0])
    for (ln, _), row in zip(rows, parsed):
        if len(row) != width:
            raise BodySpecError(
                f"row has {len(row)} entries, expected {width}", line=ln)
    return np.array(parsed), start


def _take(keys, name, default=None):
    if name in keys:
        return keys.pop(name)
    return (None, default)


def _check_consumed(keys, sections):
    for key, (lineno, _) in keys.items():
        raise BodySpecError(f"unknown key {key!r}", line=lineno)
    for name, (lineno, _) in sections.items():
        raise BodySpecError(f"unknown section [{name}]", line=lineno)


def _parse_polytope(keys, sections, type_line):
    wline, wtext = _take(keys, "witness")
    witness = _floats(wtext, wline) if wtext is not None else None
    if "vertices" in sections:
        V, start = _matrix(sections, "vertices", line_of_use=type_line)
        if V.shape[1] != 2:
            raise BodySpecError("[vertices] needs two columns", line=start)
        if len(V) < 3:
            raise BodySpecError("[vertices] needs at least 3 rows", line=start)
        _check_consumed(keys, sections)
        body = HalfspacePolytope.from_vertices(V)
        if witness is not None:
            body.witness = np.asarray(witness, dtype=float)
        return body
    A, astart = _matrix(sections, "A", line_of_use=type_line)
    bline, btext = _take(keys, "b")
    if btext is None:
        raise BodySpecError("polytope needs b = ...", line=type_line)
    b = _floats(btext, bline)
    if len(b) != len(A):
        raise BodySpecError(
            f"b has {len(b)} entries but [A] has {len(A)} rows", line=bline)
    _check_consumed(keys, sections)
    try:
        return HalfspacePolytope(A, b, witness=witness)
    except Exception as exc:
        raise BodySpecError(str(exc), line=astart)


def _parse_ellipsoid(keys, sections, type_line):
    cline, ctext = _take(keys, "center")
    sline, stext = _take(keys, "semiaxes")
    if stext is not None:
        semiaxes = _floats(stext, sline)
        if np.any(semiaxes <= 0):
            raise BodySpecError("semiaxes must be positive", line=sline)
        center = _floats(ctext, cline) if ctext is not None else None
        if center is not None and len(center) != len(semiaxes):
            raise BodySpecError("center/semiaxes dimension mismatch", line=cline)
        _check_consumed(keys, sections)
        return EllipsoidBody.from_semiaxes(semiaxes, center=center)
    Q, qstart = _matrix(sections, "Q", line_of_use=type_line)
    if Q.shape[0] != Q.shape[1]:
        raise BodySpecError("[Q] must be square", line=qstart)
    center = _floats(ctext, cline) if ctext is not None else np.zeros(len(Q))
    if len(center) != len(Q):
        raise BodySpecError("center/Q dimension mismatch", line=cline or qstart)
    _check_consumed(keys, sections)
    try:
        return EllipsoidBody(center, Q)
    except Exception as exc:
        raise BodySpecError(str(exc), line=qstart)


def quartic_body():
    """Smooth convex body {x^2 + y^2 + y^4 < 1}, strictly convex everywhere."""

    def g(xs):
        x, y = xs[:, 0], xs[:, 1]
        return x * x + y * y + y**4 - 1.0

    def grad(x):
        return np.array([2.0 * x[0], 2.0 * x[1] + 4.0 * x[1] ** 3])

    def hess(x):
        return np.diag([2.0, 2.0 + 12.0 * x[1] ** 2])

    box = (np.array([-1.1, -1.1]), np.array([1.1, 1.1]))
    return LevelSetBody(g, grad=grad, hess=hess, box=box,
                        witness=np.zeros(2), name="quartic")


def pnorm_body(p, dim):
    """Unit ball of the p-norm for even integer p >= 2."""
    p = int(p)
    if p < 2 or p % 2 != 0:
        raise ValueError("pnorm exponent must be an even integer >= 2")

    def g(xs):
        return np.sum(xs**p, axis=1) - 1.0

    def grad(x):
        return p * x ** (p - 1)

    def hess(x):
        return np.diag(p * (p - 1) * x ** (p - 2))

    lim = 1.1 * np.ones(dim)
    return LevelSetBody(g, grad=grad, hess=hess, box=(-lim, lim),
                        witness=np.zeros(dim), name=f"pnorm{p}_{dim}d")


def _parse_levelset(keys, sections, type_line):
    nline, ntext = _take(keys, "name")
    if ntext is None:
        raise BodySpecError("levelset needs name = ...", line=type_line)
    toks = ntext.split()
    _check_consumed(keys, sections)
    if toks[0] == "quartic":
        if len(toks) != 1:
            raise BodySpecError("quartic takes no parameters", line=nline)
        return quartic_body()
    if toks[0] == "pnorm":
        if len(toks) != 3:
            raise BodySpecError("usage: name = pnorm <p> <dim>", line=nline)
        try:
            p, dim = int(toks[1]), int(toks[2])
        except ValueError:
            raise BodySpecError("pnorm parameters must be integers", line=nline)
        try:
            return pnorm_body(p, dim)
        except ValueError as exc:
            raise BodySpecError(str(exc), line=nline)
    raise BodySpecError(f"unknown levelset {toks[0]!r}", line=nline)


def _parse_part(text, line):
    toks = text.split()
    if toks[0] == "box":
        if len(toks) != 5:
            raise BodySpecError("usage: box x0 y0 x1 y1", line=line)
        vals = _floats(" ".join(toks[1:]), line)
        lo, hi = vals[:2], vals[2:]
        if np.any(hi <= lo):
            raise BodySpecError("box upper corner must exceed lower", line=line)
        return HalfspacePolytope.box(lo, hi)
    try:
        return builtin_body(text.strip())
    except KeyError:
        raise BodySpecError(f"unknown part {toks[0]!r}", line=line)


def _parse_union(keys, sections, type_line):
    rows, start = _matrix_rows(sections, "parts", line_of_use=type_line)
    parts = [_parse_part(text, ln) for ln, text in rows]
    if len(parts) < 2:
        raise BodySpecError("union needs at least two parts", line=start)
    _check_consumed(keys, sections)
    return UnionBody(parts)


def _matrix_rows(sections, name, *, line_of_use):
    if name not in sections:
        raise BodySpecError(f"missing [{name}] section", line=line_of_use)
    start, rows = sections.pop(name)
    if not rows:
        raise BodySpecError(f"section [{name}] is empty", line=start)
    return rows, start


def _parse_transformed(keys, sections, type_line):
    bline, btext = _take(keys, "base")
    if btext is None:
        raise BodySpecError("transformed needs base = <builtin>", line=type_line)
    try:
        base = builtin_body(btext)
    except KeyError:
        raise BodySpecError(f"unknown base body {btext!r}", line=bline)
    M, mstart = _matrix(sections, "map", line_of_use=type_line)
    n = base.dim + 1
    if M.shape != (n, n):
        raise BodySpecError(f"[map] must be {n}x{n} for this base", line=mstart)
    _check_consumed(keys, sections)
    try:
        return TransformedBody(base, ProjectiveMap(M))
    except Exception as exc:
        raise BodySpecError(str(exc), line=mstart)


def parse_body_spec(text):
    """Parse spec text into a Body; raises BodySpecError with line numbers."""
    keys, sections = _scan(text)
    tline, ttext = _take(keys, "type")
    if ttext is None:
        raise BodySpecError("missing type = ... declaration", line=1)
    if ttext not in _TYPES:
        raise BodySpecError(
            f"unknown type {ttext!r}, expected one of {', '.join(_TYPES)}",
            line=tline)
    parser = {
        "polytope": _parse_polytope,
        "ellipsoid": _parse_ellipsoid,
        "levelset": _parse_levelset,
        "union": _parse_union,
        "transformed": _parse_transformed,
    }[ttext]
    return parser(keys, sections, tline)


def _fmt(vals):
    return " ".join(repr(float(v)) for v in np.atleast_1d(vals))


def polytope_spec_text(A_or_vertices, b=None, witness=None):
    """Render a polytope as canonical spec text (used for content hashing)."""
    lines = ["type = polytope"]
    if b is None:
        lines.append("[vertices]")
        lines += [_fmt(row) for row in A_or_vertices]
    else:
        lines.append("[A]")
        lines += [_fmt(row) for row in A_or_vertices]
        lines.append(f"b = {_fmt(b)}")
    if witness is not None:
        lines.append(f"witness = {_fmt(witness)}")
    return "\n".join(lines) + "\n"


_SQRT3_2 = np.sqrt(3.0) / 2.0

_BUILTIN_TEXT = {
    "ball2": "type = ellipsoid\ncenter = 0 0\nsemiaxes = 1 1\n",
    "ball3": "type = ellipsoid\ncenter = 0 0 0\nsemiaxes = 1 1 1\n",
    "square": polytope_spec_text(
        np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]),
        np.ones(4), witness=np.zeros(2)),
    "triangle": polytope_spec_text(
        np.array([[0.0, 1.0], [-_SQRT3_2, -0.5], [_SQRT3_2, -0.5]])),
    "quartic": "type = levelset\nname = quartic\n",
    "lshape": "type = union\n[parts]\nbox -1 -1 0 1\nbox -1 -1 1 0\n",
}

_BUILTIN_PAT = re.compile(
    r"^(ellipse|frankelV|pnorm)\s*\(\s*([^)]*)\s*\)$")


def _builtin_text(name):
    name = name.strip()
    if name in _BUILTIN_TEXT:
        return _BUILTIN_TEXT[name]
    if name == "ellipse":
        name = "ellipse(2,1)"
    m = _BUILTIN_PAT.match(name)
    if m is None:
        raise KeyError(name)
    kind, argtext = m.group(1), m.group(2)
    args = [a.strip() for a in argtext.split(",")] if argtext.strip() else []
    if kind == "ellipse":
        if len(args) != 2:
            raise KeyError(name)
        a, b = float(args[0]), float(args[1])
        if a <= 0 or b <= 0:
            raise KeyError(name)
        return f"type = ellipsoid\ncenter = 0 0\nsemiaxes = {a!r} {b!r}\n"
    if kind == "frankelV":
        d = int(args[0]) if len(args) == 1 else None
        if d is None or not 1 <= d <= 10:
            raise KeyError(name)
        # the orthant truncated to (0, 10)^d; the cone itself is unbounded
        A = np.vstack([np.eye(d), -np.eye(d)])
        b = np.concatenate([10.0 * np.ones(d), np.zeros(d)])
        return polytope_spec_text(A, b, witness=5.0 * np.ones(d))
    if kind == "pnorm":
        if len(args) != 2:
            raise KeyError(name)
        return f"type = levelset\nname = pnorm {int(args[0])} {int(args[1])}\n"
    raise KeyError(name)


def builtin_names():
    return sorted(_BUILTIN_TEXT) + ["ellipse(a,b)", "frankelV(d)", "pnorm(p,d)"]


def builtin_body(name):
    """Construct a builtin body by name; raises KeyError for unknown names."""
    return parse_body_spec(_builtin_text(name))


def spec_hash(text):
    """12-hex content hash of a spec text, recorded in every CSV row."""
    return hashlib.sha256(text.encode()).hexdigest()[:12]


class BodyHandle:
    """A resolved body together with its spec text and hash."""

    __slots__ = ("name", "text", "hash", "body")

    def __init__(self, name, text, body):
        self.name = name
        self.text = text
        self.hash = spec_hash(text)
        self.body = body

    def __repr__(self):
        return f"BodyHandle({self.name!r}, hash={self.hash})"


def resolve_body(ref, allow_files=True):
    """Resolve a builtin name, spec file path, or raw spec text to a BodyHandle.

    Lookup order: builtin catalog, then the filesystem (unless
    ``allow_files=False``, as in the service, which never reads paths sent
    by clients), then (if the string contains a newline or ``type =``)
    inline spec text.
    """
    try:
        text = _builtin_text(ref)
        return BodyHandle(ref, text, parse_body_spec(text))
    except KeyError:
        pass
    if allow_files and os.path.exists(ref) and os.path.isfile(ref):
        with open(ref) as fh:
            text = fh.read()
        return BodyHandle(os.path.basename(ref), text, parse_body_spec(text))
    if "\n" in ref or "type" in ref:
        return BodyHandle("<inline>", ref, parse_body_spec(ref))
    raise BodySpecError(
        f"unknown body {ref!r}: not a builtin ({', '.join(builtin_names())}) "
        "and no such file")
