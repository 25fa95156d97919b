"""Scene documents: a versioned JSON schema, canonical serialization and the
preset gallery.

Numbers are written as strings ("3", "-7/4") when exact and as JSON numbers
when they are floats; parsing accepts both, plus decimal strings, which
become floats.  ``dumps(loads(text)) == text`` for any canonical ``text``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .conics import Conic, DualPencil, Pencil, conic_parametrization, intersect_line_conic, pencil_through_points
from .dualbill import (
    AngularSymmetry,
    DegenerateAngular,
    DualBilliardStructure,
    DualMultibilliard,
    Exotic,
    ExoticKind,
    PencilDefined,
    VertexSpec,
)
from .errors import ParseError
from .pencilint import DEFAULT_MU, admissible_vertices
from .projbill import (
    Billiard,
    BoundaryPiece,
    CentralField,
    ConicArc,
    DualPencilField,
    ExoticField,
    NormalField,
    OrientedState,
    ParallelField,
    Segment,
    TangentField,
    admissible_line,
    exotic_admissible_lines,
)
from .projgeom import Line, Point, ProjMap, join, meet, transform
from .scalars import format_scalar, parse_scalar

FORMAT = "conicbilliards-scene"
VERSION = 1
F = Fraction

PENCIL_KINDS = ("conics", "points", "lines", "tangential-forms")
BACKENDS = ("rational", "float")


# ---------------------------------------------------------------- model


@dataclass(frozen=True)
class PencilDecl:
    """How a scene declares its pencil.

    ``conics`` and ``points`` give a pencil of point conics; ``lines`` and
    ``tangential-forms`` give a dual pencil (of tangential forms).
    """

    kind: str
    items: tuple

    @property
    def dual(self) -> bool:
        return self.kind in ("lines", "tangential-forms")

    @property
    def pencil(self) -> Pencil:
        if self.kind in ("conics", "tangential-forms"):
            return Pencil(*self.items)
        if self.kind == "points":
            return pencil_through_points(*self.items)
        return DualPencil.tangent_to_lines(*self.items).pencil

    @property
    def lines(self):
        return self.items if self.kind == "lines" else None


@dataclass
class Scene:
    name: str
    description: str = ""
    backend: str = "rational"
    eps: float = 1e-9
    delta: float = 1e-6
    mu: object = DEFAULT_MU
    pencil: PencilDecl | None = None
    billiard: Billiard | None = None
    multibilliard: DualMultibilliard | None = None
    states: list = field(default_factory=list)
    steps: int = 200
    seed: int = 0
    integral: str = "auto"
    expected_degree: object = None

    def __post_init__(self):
        if (self.billiard is None) == (self.multibilliard is None):
            raise ParseError("a scene holds exactly one of billiard and multibilliard")
        if self.backend not in BACKENDS:
            raise ParseError(f"unknown backend {self.backend!r}", "backend")


# ---------------------------------------------------------------- emission


def _s(x):
    if isinstance(x, float):
        return x
    return format_scalar(x)


def _vec(h):
    return [_s(x) for x in h]


def _mat(q):
    return [_vec(row) for row in q]


def _emit_field(f, scene: Scene):
    if isinstance(f, DualPencilField):
        if scene.pencil is not None and scene.pencil.dual and scene.pencil.pencil.same_span(f.pencil):
            return {"type": "dual-pencil"}
        return {"type": "dual-pencil", "forms": [_mat(f.pencil.c0.q), _mat(f.pencil.c1.q)]}
    if isinstance(f, ExoticField):
        return {"type": "exotic", "kind": str(f.kind), "normalization": _mat(f.normalization.m)}
    if isinstance(f, CentralField):
        return {"type": "central", "focus": _vec(f.focus.h)}
    if isinstance(f, ParallelField):
        return {"type": "parallel", "direction": _vec(f.direction)}
    if isinstance(f, TangentField):
        return {"type": "tangent", "conic": _mat(f.s.q), "branch": f.branch}
    if isinstance(f, NormalField):
        return {"type": "normal", "metric": f.metric}
    raise TypeError(type(f).__name__)


def _opt_point(P):
    return None if P is None else _vec(P.h)


def _emit_piece(p: BoundaryPiece, scene: Scene):
    g = p.geometry
    if isinstance(g, ConicArc):
        out = {"type": "arc", "conic": _mat(g.conic.q), "start": _opt_point(g.start),
               "end": _opt_point(g.end), "via": _opt_point(g.via)}
    else:
        out = {"type": "segment", "start": _vec(g.start.h), "end": _vec(g.end.h)}
    out["field"] = _emit_field(p.field, scene)
    if p.name:
        out["name"] = p.name
    return out


def _emit_curve(s: DualBilliardStructure, scene: Scene):
    if isinstance(s.kind, Exotic):
        st = {"type": "exotic", "kind": str(s.kind.kind), "normalization": _mat(s.kind.normalization.m)}
    elif scene.pencil is not None and scene.pencil.pencil.same_span(s.kind.pencil):
        st = {"type": "pencil"}
    else:
        st = {"type": "pencil", "conics": [_mat(s.kind.pencil.c0.q), _mat(s.kind.pencil.c1.q)]}
    return {"carrier": _mat(s.carrier.q), "structure": st}


def _emit_vertex(v: VertexSpec):
    if isinstance(v.action, AngularSymmetry):
        return {"center": _vec(v.center.h), "axis": _vec(v.action.axis.xi)}
    return {"center": _vec(v.center.h), "conic": _mat(v.action.s.q)}


def _emit_pencil(d: PencilDecl):
    if d.kind in ("conics", "tangential-forms"):
        items = [_mat(c.q) for c in d.items]
    elif d.kind == "points":
        items = [_vec(P.h) for P in d.items]
    else:
        items = [_vec(L.xi) for L in d.items]
    return {"kind": d.kind, "items": items}


def scene_to_dict(scene: Scene) -> dict:
    out = {
        "format": FORMAT,
        "version": VERSION,
        "name": scene.name,
        "description": scene.description,
        "backend": scene.backend,
        "eps": float(scene.eps),
        "delta": float(scene.delta),
        "mu": _s(scene.mu),
        "integral": scene.integral,
        "expected_degree": scene.expected_degree,
        "pencil": None if scene.pencil is None else _emit_pencil(scene.pencil),
        "simulation": {
            "steps": scene.steps,
            "seed": scene.seed,
            "states": [{"position": _vec(s.position), "direction": _vec(s.direction)} for s in scene.states],
        },
    }
    if scene.billiard is not None:
        out["billiard"] = {"pieces": [_emit_piece(p, scene) for p in scene.billiard.pieces]}
    else:
        mb = scene.multibilliard
        out["multibilliard"] = {"curves": [_emit_curve(s, scene) for s in mb.curves],
                                "vertices": [_emit_vertex(v) for v in mb.vertices]}
    return out


def dumps(scene: Scene) -> str:
    return json.dumps(scene_to_dict(scene), sort_keys=True, indent=2) + "\n"


def save(scene: Scene, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(scene))


# ---------------------------------------------------------------- parsing


class _Reader:
    """Walks the decoded document, tracking a path for error messages."""

    def __init__(self, doc):
        self.doc = doc

    @staticmethod
    def get(obj, key, path, required=True, default=None):
        if not isinstance(obj, dict):
            raise ParseError("expected an object", path or "<root>")
        if key not in obj:
            if required:
                raise ParseError(f"missing key {key!r}", path or "<root>")
            return default
        return obj[key]

    @staticmethod
    def scalar(x, path):
        try:
            return parse_scalar(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad number {x!r}: {exc}", path) from None

    def vec(self, x, n, path):
        if not isinstance(x, list) or len(x) not in n:
            raise ParseError(f"expected a list of {' or '.join(map(str, n))} numbers", path)
        return tuple(self.scalar(c, f"{path}[{k}]") for k, c in enumerate(x))

    def point(self, x, path):
        try:
            return Point(*self.vec(x, (2, 3), path))
        except ParseError:
            raise
        except Exception as exc:
            raise ParseError(str(exc), path) from None

    def opt_point(self, x, path):
        return None if x is None else self.point(x, path)

    def line(self, x, path):
        try:
            return Line(*self.vec(x, (3,), path))
        except ParseError:
            raise
        except Exception as exc:
            raise ParseError(str(exc), path) from None

    def matrix(self, x, path):
        if not isinstance(x, list) or len(x) != 3:
            raise ParseError("expected a 3x3 matrix", path)
        return tuple(self.vec(r, (3,), f"{path}[{k}]") for k, r in enumerate(x))

    def conic(self, x, path):
        try:
            return Conic(self.matrix(x, path))
        except ParseError:
            raise
        except Exception as exc:
            raise ParseError(str(exc), path) from None

    def projmap(self, x, path):
        try:
            return ProjMap(self.matrix(x, path))
        except ParseError:
            raise
        except Exception as exc:
            raise ParseError(str(exc), path) from None


def _wrap(path, fn, *args):
    try:
        return fn(*args)
    except ParseError:
        raise
    except Exception as exc:
        raise ParseError(str(exc), path) from None


def _parse_pencil(r: _Reader, d, path) -> PencilDecl:
    kind = r.get(d, "kind", path)
    items = r.get(d, "items", path)
    if kind not in PENCIL_KINDS:
        raise ParseError(f"unknown pencil kind {kind!r}", f"{path}.kind")
    n = 2 if kind in ("conics", "tangential-forms") else 4
    if not isinstance(items, list) or len(items) != n:
        raise ParseError(f"a {kind} pencil needs {n} items", f"{path}.items")
    ip = f"{path}.items"
    if kind in ("conics", "tangential-forms"):
        parsed = tuple(r.conic(x, f"{ip}[{k}]") for k, x in enumerate(items))
    elif kind == "points":
        parsed = tuple(r.point(x, f"{ip}[{k}]") for k, x in enumerate(items))
    else:
        parsed = tuple(r.line(x, f"{ip}[{k}]") for k, x in enumerate(items))
    decl = PencilDecl(kind, parsed)
    _wrap(path, lambda: decl.pencil)
    return decl


def _parse_field(r: _Reader, d, path, decl):
    t = r.get(d, "type", path)
    if t == "dual-pencil":
        forms = r.get(d, "forms", path, required=False)
        if forms is None:
            if decl is None or not decl.dual:
                raise ParseError("field refers to the scene dual pencil, but none is declared", path)
            return DualPencilField(decl.pencil)
        if not isinstance(forms, list) or len(forms) != 2:
            raise ParseError("expected two tangential forms", f"{path}.forms")
        c0, c1 = (r.conic(x, f"{path}.forms[{k}]") for k, x in enumerate(forms))
        return DualPencilField(_wrap(path, Pencil, c0, c1))
    if t == "exotic":
        kind = _wrap(f"{path}.kind", ExoticKind.parse, str(r.get(d, "kind", path)))
        return ExoticField(kind, r.projmap(r.get(d, "normalization", path), f"{path}.normalization"))
    if t == "central":
        return CentralField(r.point(r.get(d, "focus", path), f"{path}.focus"))
    if t == "parallel":
        return ParallelField(r.vec(r.get(d, "direction", path), (2,), f"{path}.direction"))
    if t == "tangent":
        branch = r.get(d, "branch", path, required=False)
        if branch not in (None, 1, -1):
            raise ParseError("branch must be 1, -1 or null", f"{path}.branch")
        return TangentField(r.conic(r.get(d, "conic", path), f"{path}.conic"), branch)
    if t == "normal":
        return _wrap(f"{path}.metric", NormalField, r.get(d, "metric", path, False, "euclidean"))
    raise ParseError(f"unknown field type {t!r}", f"{path}.type")


def _parse_piece(r: _Reader, d, path, decl):
    t = r.get(d, "type", path)
    fld = _parse_field(r, r.get(d, "field", path), f"{path}.field", decl)
    if t == "arc":
        g = ConicArc(r.conic(r.get(d, "conic", path), f"{path}.conic"),
                     r.opt_point(d.get("start"), f"{path}.start"),
                     r.opt_point(d.get("end"), f"{path}.end"),
                     r.opt_point(d.get("via"), f"{path}.via"))
        if (g.start is None) != (g.end is None) or (g.start is not None and g.via is None):
            raise ParseError("an arc needs start, end and via, or none of them", path)
    elif t == "segment":
        g = Segment(r.point(r.get(d, "start", path), f"{path}.start"), r.point(r.get(d, "end", path), f"{path}.end"))
    else:
        raise ParseError(f"unknown piece type {t!r}", f"{path}.type")
    return _wrap(path, BoundaryPiece, g, fld, d.get("name", ""))


def _parse_curve(r: _Reader, d, path, decl):
    carrier = r.conic(r.get(d, "carrier", path), f"{path}.carrier")
    st = r.get(d, "structure", path)
    t = r.get(st, "type", f"{path}.structure")
    if t == "exotic":
        kind = _wrap(f"{path}.structure.kind", ExoticKind.parse, str(r.get(st, "kind", f"{path}.structure")))
        n = r.projmap(r.get(st, "normalization", f"{path}.structure"), f"{path}.structure.normalization")
        return _wrap(path, DualBilliardStructure, carrier, Exotic(kind, n))
    if t != "pencil":
        raise ParseError(f"unknown structure type {t!r}", f"{path}.structure.type")
    conics = st.get("conics")
    if conics is None:
        if decl is None:
            raise ParseError("curve refers to the scene pencil, but none is declared", path)
        pencil = decl.pencil
    else:
        if not isinstance(conics, list) or len(conics) != 2:
            raise ParseError("expected two conics", f"{path}.structure.conics")
        pencil = _wrap(path, Pencil, *(r.conic(x, f"{path}.structure.conics[{k}]") for k, x in enumerate(conics)))
    return _wrap(path, DualBilliardStructure, carrier, PencilDefined(pencil))


def _parse_vertex(r: _Reader, d, path):
    center = r.point(r.get(d, "center", path), f"{path}.center")
    if "axis" in d:
        action = AngularSymmetry(r.line(d["axis"], f"{path}.axis"))
    elif "conic" in d:
        action = DegenerateAngular(r.conic(d["conic"], f"{path}.conic"))
    else:
        raise ParseError("a vertex needs an axis or a conic", path)
    return _wrap(path, VertexSpec, center, action)


def _list(r, obj, key, path):
    v = r.get(obj, key, path)
    if not isinstance(v, list):
        raise ParseError("expected a list", f"{path}.{key}" if path else key)
    return v


def scene_from_dict(doc) -> Scene:
    r = _Reader(doc)
    if not isinstance(doc, dict):
        raise ParseError("a scene document is a JSON object", "<root>")
    if r.get(doc, "format", "") != FORMAT:
        raise ParseError(f"format must be {FORMAT!r}", "format")
    if r.get(doc, "version", "") != VERSION:
        raise ParseError(f"unsupported version {doc.get('version')!r}", "version")
    has_b, has_m = "billiard" in doc, "multibilliard" in doc
    if has_b == has_m:
        raise ParseError("exactly one of 'billiard' and 'multibilliard' is required", "<root>")
    pd = doc.get("pencil")
    decl = None if pd is None else _parse_pencil(r, pd, "pencil")
    billiard = multibilliard = None
    if has_b:
        pieces = [_parse_piece(r, p, f"billiard.pieces[{k}]", decl)
                  for k, p in enumerate(_list(r, doc["billiard"], "pieces", "billiard"))]
        if not pieces:
            raise ParseError("a billiard needs at least one piece", "billiard.pieces")
        billiard = Billiard(pieces)
    else:
        m = doc["multibilliard"]
        curves = [_parse_curve(r, c, f"multibilliard.curves[{k}]", decl)
                  for k, c in enumerate(_list(r, m, "curves", "multibilliard"))]
        vertices = [_parse_vertex(r, v, f"multibilliard.vertices[{k}]")
                    for k, v in enumerate(r.get(m, "vertices", "multibilliard", False, []))]
        multibilliard = DualMultibilliard(curves, vertices, None if decl is None else decl.pencil)
    sim = doc.get("simulation") or {}
    states = []
    for k, s in enumerate(sim.get("states", [])):
        p = f"simulation.states[{k}]"
        pos = r.vec(r.get(s, "position", p), (2,), f"{p}.position")
        dirn = r.vec(r.get(s, "direction", p), (2,), f"{p}.direction")
        states.append(_wrap(p, OrientedState, pos, dirn))
    for key in ("steps", "seed"):
        if key in sim and (not isinstance(sim[key], int) or isinstance(sim[key], bool)):
            raise ParseError("expected an integer", f"simulation.{key}")
    backend = doc.get("backend", "rational")
    if backend not in BACKENDS:
        raise ParseError(f"unknown backend {backend!r}", "backend")
    tol = {}
    for key, default in (("eps", 1e-9), ("delta", 1e-6)):
        v = doc.get(key, default)
        if isinstance(v, bool) or not isinstance(v, (int, float)) or v <= 0:
            raise ParseError("expected a positive number", key)
        tol[key] = float(v)
    expected = doc.get("expected_degree")
    if expected is not None and not isinstance(expected, (int, str)):
        raise ParseError("expected an integer, a string or null", "expected_degree")
    return Scene(
        name=str(doc.get("name", "")),
        description=str(doc.get("description", "")),
        backend=backend,
        eps=tol["eps"],
        delta=tol["delta"],
        mu=r.scalar(doc.get("mu", format_scalar(DEFAULT_MU)), "mu"),
        pencil=decl,
        billiard=billiard,
        multibilliard=multibilliard,
        states=states,
        steps=sim.get("steps", 200),
        seed=sim.get("seed", 0),
        integral=str(doc.get("integral", "auto")),
        expected_degree=expected,
    )


def loads(text: str) -> Scene:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return scene_from_dict(doc)


def load(path) -> Scene:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


# ---------------------------------------------------------------- presets


# Sends the unit circle x^2 + y^2 = 1 to the exotic carrier x2 = x1^2.
DISK_TO_CHART = ProjMap(((F(1), F(0), F(0)), (F(0), F(-1), F(1)), (F(0), F(1), F(1))))
UNIT_CIRCLE = Conic(((F(1), F(0), F(0)), (F(0), F(1), F(0)), (F(0), F(0), F(-1))))


def _state(x, y, dx, dy):
    return OrientedState((x, y), (dx, dy))


def type_a_square() -> Scene:
    pts = (Point(1, 1), Point(-1, 1), Point(-1, -1), Point(1, -1))
    decl = PencilDecl("points", pts)
    circle = Conic(((F(1), F(0), F(0)), (F(0), F(1), F(0)), (F(0), F(0), F(-2))))
    mb = DualMultibilliard([DualBilliardStructure(circle, PencilDefined(decl.pencil))], [], decl.pencil)
    return Scene("type-a-square", "Pencil of conics through the vertices of a square, one carrier.",
                 pencil=decl, multibilliard=mb, expected_degree=2)


def confocal_ellipses() -> Scene:
    E = Conic(((F(1, 25), F(0), F(0)), (F(0), F(1, 16), F(0)), (F(0), F(0), F(-1))))
    decl = PencilDecl("tangential-forms", (Conic(la.adjugate3(E.q)), NormalField().isotropic_form()))
    b = Billiard([BoundaryPiece(ConicArc(E), NormalField(), "ellipse")])
    return Scene("confocal-ellipses", "Euclidean billiard in the ellipse x^2/25 + y^2/16 = 1.",
                 pencil=decl, billiard=b, states=[_state(F(3, 10), F(1, 10), F(3, 5), F(4, 5))], expected_degree=2)


def _square_lines():
    # a: x = -1, b: y = -1, c: x = 1, d: y = 1
    return (Line(1, 0, 1), Line(0, 1, 1), Line(1, 0, -1), Line(0, 1, -1))


def figd4_triangle() -> Scene:
    decl = PencilDecl("lines", _square_lines())
    forms = Pencil(Conic(((1, 0, 0), (0, 1, 0), (0, 0, -1))), Conic(((0, 1, 0), (1, 0, 0), (0, 0, 0))))
    gamma = Conic(la.adjugate3(forms.member(F(7, 25)).q))
    O, A, B = Point(0, 0), Point(0, F(24, 25)), Point(F(-3, 5), F(3, 5))
    param = conic_parametrization(gamma, A)
    via = next(P for P in (param(F(k, 4)) for k in range(-20, 21))
               if P.is_finite() and P.chart()[0] < 0 and P.chart()[1] > -P.chart()[0])
    field_ = DualPencilField(decl.pencil)
    b = Billiard([
        BoundaryPiece(Segment(O, A), ParallelField((F(1), F(0))), "k_ac"),
        BoundaryPiece(ConicArc(gamma, A, B, via), field_, "gamma"),
        BoundaryPiece(Segment(B, O), ParallelField((F(1), F(1))), "m2"),
    ])
    return Scene("figd4-triangle", "Arc of a conic tangent to the sides of a square, closed by pieces of k_ac and m2.",
                 pencil=decl, billiard=b, states=[_state(F(-1, 10), F(1, 2), F(3, 10), F(7, 10))], expected_degree=4)


FIG12_CORNERS = (Point(4, -5), Point(5, -3), Point(1, 2), Point(-2, -5))
FIG12_LAMBDA = F(-1, 3)


def _real_point(P: Point) -> Point:
    return Point(*(float(x) for x in P.normalized().h))


def _arc_midpoint(conic: Conic, P: Point, Q: Point) -> Point:
    """The point of the conic on the perpendicular bisector of PQ closest to
    the chord (the midpoint of the shorter arc)."""
    (px, py), (qx, qy) = P.chart(), Q.chart()
    mx, my = (px + qx) / 2, (py + qy) / 2
    L = join(Point(mx, my), Point(mx - (qy - py), my + (qx - px)))
    cands = [_real_point(X) for X in intersect_line_conic(L, conic) if X.is_real()]
    return min(cands, key=lambda X: (X.chart()[0] - mx) ** 2 + (X.chart()[1] - my) ** 2)


def fig12_billiard(corners=FIG12_CORNERS, lam=FIG12_LAMBDA):
    """Quadrilateral region bounded by k_bd, k_ad, m2 and an arc of the
    dual-pencil member ``lam`` for the tangent lines through consecutive
    ``corners`` (ab, bc, cd, da).  Returns (lines, billiard)."""
    ab, bc, cd, da = corners
    lines = (join(da, ab), join(ab, bc), join(bc, cd), join(cd, da))
    dp = DualPencil.tangent_to_lines(*lines).pencil
    gamma = Conic(la.adjugate3(dp.member(lam).q))
    first, second, third = (admissible_line(dp, lines, lab) for lab in ("k_bd", "k_ad", "m2"))
    v12, v23 = meet(first.line, second.line), meet(second.line, third.line)
    p1 = _real_point(intersect_line_conic(first.line, gamma)[0])
    p3 = _real_point(intersect_line_conic(third.line, gamma)[0])
    b = Billiard([
        BoundaryPiece(Segment(p1, v12), first.field, "k_bd"),
        BoundaryPiece(Segment(v12, v23), second.field, "k_ad"),
        BoundaryPiece(Segment(v23, p3), third.field, "m2"),
        BoundaryPiece(ConicArc(gamma, p3, p1, _arc_midpoint(gamma, p3, p1)), DualPencilField(dp), "gamma"),
    ])
    return lines, b


def fig12_quadrilateral() -> Scene:
    lines, b = fig12_billiard()
    return Scene("fig12-quadrilateral",
                 "Arc of a conic inscribed in a convex quadrilateral, closed by pieces of k_bd, k_ad and m2.",
                 pencil=PencilDecl("lines", lines), billiard=b,
                 states=[_state(F(1), F(-26, 5), F(3, 5), F(4, 5))], expected_degree=12)


def semi_euclidean_focus_line() -> Scene:
    E = Conic(((F(1, 25), F(0), F(0)), (F(0), F(1, 16), F(0)), (F(0), F(0), F(-1))))
    A, B = Point(-3, F(16, 5)), Point(-3, F(-16, 5))
    b = Billiard([
        BoundaryPiece(ConicArc(E, A, B, Point(-5, 0)), NormalField(), "ellipse"),
        BoundaryPiece(Segment(B, A), CentralField(Point(3, 0)), "focal line"),
    ])
    return Scene("semi-euclidean-focus-line",
                 "Ellipse cut by the line through one focus, with reflection law through the other focus.",
                 billiard=b, states=[_state(F(-4), F(3, 10), F(3, 5), F(4, 5))], expected_degree=4)


def _disk_line(kind: ExoticKind, index: int = 0):
    e = exotic_admissible_lines(kind)[index]
    inv = DISK_TO_CHART.inverse()
    line = transform(inv, e.line).normalized()
    focus = transform(inv, e.field.focus).normalized()
    f = CentralField(focus) if focus.is_finite() else ParallelField((focus.h[0], focus.h[1]))
    return line, f


def exotic_scene(kind: ExoticKind) -> Scene:
    """The exotic field on the unit circle, cut by admissible lines when the
    kind has real ones."""
    arc_field = ExoticField(kind, DISK_TO_CHART)
    tag = kind.tag
    if tag in ("2a1", "2a2", "2b2"):
        # the line x = 0 with the horizontal field
        line, f = _disk_line(kind)
        pieces = [BoundaryPiece(Segment(Point(0, -1), Point(0, 1)), f, "x=0"),
                  BoundaryPiece(ConicArc(UNIT_CIRCLE, Point(0, 1), Point(0, -1), Point(1, 0)), arc_field, "circle")]
        state = _state(F(3, 10), F(1, 10), F(3, 5), F(4, 5))
    elif tag in ("2b1", "2c1"):
        # the diameter y = 0 with the vertical field
        line, f = _disk_line(kind)
        pieces = [BoundaryPiece(Segment(Point(1, 0), Point(-1, 0)), f, "y=0"),
                  BoundaryPiece(ConicArc(UNIT_CIRCLE, Point(-1, 0), Point(1, 0), Point(0, 1)), arc_field, "circle")]
        state = _state(F(1, 10), F(3, 10), F(3, 5), F(4, 5))
    elif tag == "2c2":
        l0, f0 = _disk_line(kind, 0)
        l2, f2 = _disk_line(kind, 2)
        corner = meet(l0, l2)
        pieces = [BoundaryPiece(Segment(corner, Point(1, 0)), f0, "y=0"),
                  BoundaryPiece(ConicArc(UNIT_CIRCLE, Point(1, 0), Point(0, -1), Point(F(3, 5), F(-4, 5))),
                                arc_field, "circle"),
                  BoundaryPiece(Segment(Point(0, -1), corner), f2, "2x+y+1=0")]
        state = _state(F(3, 10), F(-3, 10), F(3, 5), F(4, 5))
    else:
        pieces = [BoundaryPiece(ConicArc(UNIT_CIRCLE), arc_field, "circle")]
        state = _state(F(1, 5), F(1, 10), F(3, 5), F(4, 5))
    b = Billiard(pieces)
    degree = kind.degree if tag != "2a2" else 4 * kind.N + 4
    return Scene(str(kind), f"Exotic projective billiard of kind {kind} in the unit disk.",
                 billiard=b, states=[state], expected_degree=degree)


def type_b_invalid() -> Scene:
    """Type b pencil with a quasi-global vertex at C next to the skew K_AB."""
    x2 = Conic(((1, 0, 0), (0, 0, F(-1, 2)), (0, F(-1, 2), 0)))
    pair = Conic(((0, 0, 0), (0, 1, F(-1, 2)), (0, F(-1, 2), 0)))
    decl = PencilDecl("conics", (x2, pair))
    p = decl.pencil
    cat = admissible_vertices(p)
    skew = next(e for e in cat if getattr(e, "label", "") == "K_AB" and getattr(e, "flavor", "") == "skew"
                and hasattr(e, "spec"))
    quasi = next(e for e in cat if getattr(e, "case", "") == "b4")(x2)
    mb = DualMultibilliard([DualBilliardStructure(x2, PencilDefined(p))], [quasi.spec, skew.spec], p)
    return Scene("type-b-invalid", "Type b pencil: a quasi-global vertex combined with a skew vertex.",
                 pencil=decl, multibilliard=mb, expected_degree=None)


EXOTIC_PRESETS = ("2a1-N1", "2a1-N2", "2a1-N3", "2a2-N1", "2a2-N2", "2b1", "2b2", "2c1", "2c2", "2d")

_BUILDERS = {
    "type-a-square": type_a_square,
    "confocal-ellipses": confocal_ellipses,
    "figd4-triangle": figd4_triangle,
    "fig12-quadrilateral": fig12_quadrilateral,
    "semi-euclidean-focus-line": semi_euclidean_focus_line,
    "type-b-invalid": type_b_invalid,
}


def preset_names() -> list:
    return list(_BUILDERS) + list(EXOTIC_PRESETS)


def preset(name: str) -> Scene:
    if name in _BUILDERS:
        return _BUILDERS[name]()
    if name in EXOTIC_PRESETS:
        return exotic_scene(ExoticKind.parse(name))
    raise KeyError(f"unknown preset {name!r}")


__all__ = [
    "DISK_TO_CHART",
    "FORMAT",
    "PencilDecl",
    "Scene",
    "VERSION",
    "dumps",
    "fig12_billiard",
    "load",
    "loads",
    "preset",
    "preset_names",
    "save",
    "scene_from_dict",
    "scene_to_dict",
]
