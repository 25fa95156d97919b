"""Projective billiards: boundary pieces with transversal line fields,
reflection, orbit tracing, and the moment-vector duality with dual
multibilliards.

A state is a position in the affine chart x3 = 1 and a direction.  Its
moment vector M = (x1, x2, 1) x (v1, v2, 0) = (-v2, v1, Delta) is the line
of motion in homogeneous line coordinates; integrals of the billiard are
rational functions of M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .conics import Conic, Pencil, classify_pencil, tangent_line
from .dualbill import (
    AngularSymmetry,
    DegenerateAngular,
    DualBilliardStructure,
    DualMultibilliard,
    Exotic,
    ExoticKind,
    PencilDefined,
    VertexSpec,
    canonical_integral,
    exotic_admissible_vertices,
)
from .errors import (
    BasePointOfStructure,
    CornerHit,
    DegenerateQuadrilateral,
    NoRealTangent,
    TangentialIncidence,
    UnsupportedFieldKind,
)
from .pencilint import (
    DEFAULT_MU,
    VertexCatalogEntry,
    VertexFamily,
    admissible_vertices,
    ordered_pair_integral,
    validate_pencil_multibilliard,
)
from .polynomials import FactoredIntegral, HomPoly, RationalIntegral
from .projgeom import (
    INF,
    Line,
    Point,
    ProjMap,
    divide_root,
    involution_fixing_point_swapping_roots,
    join,
    meet,
    quadratic_preserved,
    transform,
)
from .scalars import EPS, is_exact, is_real_approx, is_zero, sqrt_any

F = Fraction

# x2 = x1^2 as a symmetric form
EXOTIC_CONIC = Conic(((F(1), F(0), F(0)), (F(0), F(0), F(-1, 2)), (F(0), F(-1, 2), F(0))))

# moment coordinates -> dual chart (z, w, t) = (M1 / 2, M3, M2)
MOMENT_TO_CHART = ProjMap(((F(1, 2), F(0), F(0)), (F(0), F(0), F(1)), (F(0), F(1), F(0))))


# ---------------------------------------------------------------- pieces


@dataclass(frozen=True)
class ConicArc:
    """An arc of a regular conic from ``start`` to ``end`` through ``via``.

    With ``start`` left as None the whole conic is used.
    """

    conic: Conic
    start: Point | None = None
    end: Point | None = None
    via: Point | None = None

    @property
    def closed(self) -> bool:
        return self.start is None

    def endpoints(self) -> list:
        return [] if self.closed else [self.start, self.end]

    def _param(self, X: Point):
        """Homogeneous coordinate of X in the pencil of lines through ``start``,
        with the tangent at ``start`` as the origin."""
        S = self.start
        ell0 = tangent_line(self.conic, S).xi
        ell1 = la.cross(S.h, _off_line_point(Line(ell0)).h)
        if X == S:
            return (0, 1)
        xi = la.cross(S.h, X.h)
        # xi ~ y * ell0 + x * ell1, solved on the best-conditioned minor
        i, j = max(((0, 1), (0, 2), (1, 2)),
                   key=lambda ij: abs(ell0[ij[0]] * ell1[ij[1]] - ell0[ij[1]] * ell1[ij[0]]))
        d = ell0[i] * ell1[j] - ell0[j] * ell1[i]
        y = (xi[i] * ell1[j] - xi[j] * ell1[i]) / d
        x = (ell0[i] * xi[j] - ell0[j] * xi[i]) / d
        return (x, y)

    def contains(self, X: Point) -> bool:
        if self.closed:
            return True
        if X == self.start or X == self.end:
            return True
        a, b, c, d = (self._param(P) for P in (self.start, self.end, self.via, X))

        def det(p, q):
            return p[0] * q[1] - p[1] * q[0]

        cr = det(a, c) * det(b, d) * det(a, d) * det(b, c)
        return float(cr) > 0


def _off_line_point(L: Line) -> Point:
    for e in (Point(1, 0, 0), Point(0, 1, 0), Point(0, 0, 1)):
        if not L.contains(e):
            return e
    raise ValueError("degenerate line")


@dataclass(frozen=True)
class Segment:
    start: Point
    end: Point

    @property
    def line(self) -> Line:
        return join(self.start, self.end)

    def endpoints(self) -> list:
        return [self.start, self.end]

    def contains(self, X: Point, eps: float = EPS) -> bool:
        if not self.line.contains(X, eps):
            return False
        a, b, x = (P.chart() for P in (self.start, self.end, X))
        d = (b[0] - a[0], b[1] - a[1])
        s = ((x[0] - a[0]) * d[0] + (x[1] - a[1]) * d[1]) / (d[0] ** 2 + d[1] ** 2)
        return -eps <= s <= 1 + eps


# ---------------------------------------------------------------- fields


@dataclass(frozen=True)
class DualPencilField:
    """Reflection swaps the tangent lines from the hit point to every
    member of a dual pencil; ``pencil`` holds the tangential forms."""

    pencil: Pencil

    @classmethod
    def from_caustic(cls, carrier: Conic, caustic: Conic) -> "DualPencilField":
        return cls(Pencil(Conic(la.adjugate3(carrier.q)), Conic(la.adjugate3(caustic.q))))


@dataclass(frozen=True)
class ExoticField:
    """Exotic field on the conic x2 = x1^2 of the chart reached by
    ``normalization`` (a map from the plane to that chart)."""

    kind: ExoticKind
    normalization: ProjMap = field(default_factory=ProjMap.identity)

    @property
    def carrier(self) -> Conic:
        return transform(self.normalization.inverse(), EXOTIC_CONIC)


@dataclass(frozen=True)
class CentralField:
    focus: Point


@dataclass(frozen=True)
class ParallelField:
    direction: tuple

    @property
    def focus(self) -> Point:
        return Point(self.direction[0], self.direction[1], 0)


@dataclass(frozen=True)
class TangentField:
    """Lines tangent to ``s``.  On a line already tangent to ``s`` the other
    tangent is meant; otherwise ``branch`` (+1 or -1) selects by the sign of
    det(segment direction, tangency point - hit point)."""

    s: Conic
    branch: int | None = None


@dataclass(frozen=True)
class NormalField:
    metric: str = "euclidean"

    def __post_init__(self):
        if self.metric not in ("euclidean", "pseudo-euclidean"):
            raise ValueError(f"unknown metric {self.metric!r}")

    @property
    def sign(self) -> int:
        return 1 if self.metric == "euclidean" else -1

    def isotropic_form(self) -> Conic:
        return Conic(((F(1), F(0), F(0)), (F(0), F(self.sign), F(0)), (F(0), F(0), F(0))))


ARC_FIELDS = (DualPencilField, ExoticField, NormalField)
SEGMENT_FIELDS = (CentralField, ParallelField, TangentField, NormalField)


@dataclass(frozen=True)
class BoundaryPiece:
    geometry: object
    field: object
    name: str = ""

    def __post_init__(self):
        if isinstance(self.geometry, ConicArc):
            if not isinstance(self.field, ARC_FIELDS):
                raise TypeError(f"{type(self.field).__name__} cannot sit on a conic arc")
            if isinstance(self.field, ExoticField) and self.field.carrier != self.geometry.conic:
                raise ValueError("exotic field normalization does not match the arc's conic")
        elif isinstance(self.geometry, Segment):
            if not isinstance(self.field, SEGMENT_FIELDS):
                raise TypeError(f"{type(self.field).__name__} cannot sit on a segment")
        else:
            raise TypeError("geometry must be ConicArc or Segment")

    @property
    def is_arc(self) -> bool:
        return isinstance(self.geometry, ConicArc)

    def tangent_at(self, Q: Point) -> Line:
        if self.is_arc:
            return tangent_line(self.geometry.conic, Q)
        return self.geometry.line

    def endpoints(self) -> list:
        return self.geometry.endpoints()


@dataclass
class Billiard:
    pieces: list
    interior: Point | None = None

    def corners(self) -> list:
        out = []
        for p in self.pieces:
            out.extend(p.endpoints())
        return out


# ---------------------------------------------------------------- transversal lines


def transversal_line(piece: BoundaryPiece, Q: Point, eps: float = EPS) -> Line:
    f = piece.field
    T = piece.tangent_at(Q)
    if isinstance(f, CentralField) or isinstance(f, ParallelField):
        focus = f.focus
        if focus == Q:
            raise BasePointOfStructure("hit point coincides with the center")
        N = join(Q, focus)
    elif isinstance(f, NormalField):
        a, b = T.xi[0], T.xi[1]
        N = join(Q, Point(a, f.sign * b, 0 * a))
    elif isinstance(f, DualPencilField):
        N = _dual_pencil_transversal(f, T, Q, eps)
    elif isinstance(f, ExoticField):
        N = _exotic_transversal(f, Q, eps)
    elif isinstance(f, TangentField):
        N = _tangent_transversal(piece, f, Q, eps)
    else:
        raise UnsupportedFieldKind(type(f).__name__)
    if N == T:
        raise BasePointOfStructure("the field line is tangent to the boundary")
    return N


def _line_pencil_chart(T: Line, Q: Point):
    """Two lines spanning the pencil through Q, the first being T."""
    return T.xi, la.cross(Q.h, _off_line_point(T).h)


def _restriction(g, l0, l1):
    return (la.quad_form(g, l1), 2 * la.bilinear(g, l0, l1), la.quad_form(g, l0))


def _dual_pencil_transversal(f: DualPencilField, T: Line, Q: Point, eps):
    l0, l1 = _line_pencil_chart(T, Q)
    exact = all(is_exact(x) for x in (*l0, *l1))
    if not exact:
        l0, l1 = la.normalize(l0), la.normalize(l1)
    quads = []
    for lam in (F(1), F(-1), F(2), F(1, 3), INF, F(0)):
        m = f.pencil.member(lam).q
        q = _restriction(m, l0, l1)
        tol = 0.0 if exact else eps * max(abs(x) for row in m for x in row)
        if is_zero(q[2], tol):
            # the tangent line itself is tangent to this member
            continue
        quads.append(q)
        if len(quads) == 2:
            break
    if not quads:
        raise BasePointOfStructure("tangent line is common to the dual pencil")
    try:
        g = involution_fixing_point_swapping_roots(0, quads[0], eps)
    except Exception as exc:
        raise BasePointOfStructure(str(exc)) from exc
    if len(quads) > 1 and not quadratic_preserved(g, quads[1], 1e-6):
        raise BasePointOfStructure("caustics disagree at this point")
    x, y = divide_root(g.fixed_points(), (F(0) if is_exact(g.a) else 0.0, F(1) if is_exact(g.a) else 1.0))
    return Line(tuple(y * a + x * b for a, b in zip(l0, l1)))


def exotic_vector(kind: ExoticKind, x1):
    x2 = x1 * x1
    tag = kind.tag
    if tag in ("2a1", "2a2"):
        rho = kind.rho if is_exact(x1) else float(kind.rho)
        return (rho, 2 * (rho - 2) * x1)
    if tag == "2b1":
        return (5 * x1 + 3, 2 * (x2 - x1))
    if tag == "2b2":
        return (3 * x1, 2 * x2 - 4)
    if tag == "2c1":
        return (x2, x1 * x2 - 1)
    if tag == "2c2":
        return (2 * x1 + 1, x2 - x1)
    return (7 * x1 + 4, 2 * x2 - 4 * x1)


def _exotic_transversal(f: ExoticField, Q: Point, eps):
    n = f.normalization
    Qn = transform(n, Q)
    h = Qn.h
    if is_zero(h[2], 0.0 if is_exact(h[2]) else eps * max(abs(x) for x in h)):
        raise BasePointOfStructure("point at infinity of the exotic conic")
    x1 = h[0] / h[2]
    v = exotic_vector(f.kind, x1)
    tangency = v[1] - 2 * x1 * v[0]
    if is_zero(tangency, 0.0 if is_exact(tangency) else eps * max(1.0, abs(v[0]), abs(v[1]))):
        raise BasePointOfStructure("exotic field is singular or tangent here")
    zero = 0 * v[0]
    line_chart = join(Point(x1, x1 * x1, 1 + zero), Point(v[0], v[1], zero))
    return transform(n.inverse(), line_chart)


def exotic_base_points(f: ExoticField) -> list:
    """Real points of the conic where the exotic field is singular or
    tangent (the point at infinity of the chart conic included)."""
    import sympy

    x = sympy.Symbol("x")
    vals = [F(k) for k in range(4)]
    dets = [exotic_vector(f.kind, t)[1] - 2 * t * exotic_vector(f.kind, t)[0] for t in vals]
    poly = sympy.interpolate([(sympy.Rational(t.numerator, t.denominator), sympy.Rational(d.numerator, d.denominator))
                              for t, d in zip(vals, dets)], x)
    inv = f.normalization.inverse()
    out = [transform(inv, Point(0, 1, 0))]
    for r in sympy.Poly(poly, x).real_roots():
        t = F(int(r.p), int(r.q)) if r.is_Rational else float(r)
        out.append(transform(inv, Point(t, t * t, 1)))
    return out


def _tangent_transversal(piece, f: TangentField, Q: Point, eps):
    s = f.s
    ell = piece.tangent_at(Q)
    l0, l1 = _line_pencil_chart(ell, Q)
    dual = la.adjugate3(s.q)
    q = _restriction(dual, l0, l1)
    exact = all(is_exact(x) for x in q)
    scale = max(abs(x) for x in q)
    if is_zero(q[2], 0.0 if exact else eps * scale):
        if is_zero(q[1], 0.0 if exact else eps * scale):
            raise BasePointOfStructure("hit point is the tangency point of the segment line")
        x, y = (-q[1], q[0])
        return Line(tuple(y * a + x * b for a, b in zip(l0, l1)))
    disc = q[1] * q[1] - 4 * q[0] * q[2]
    if (exact and disc < 0) or (not exact and float(disc) < -eps * scale * scale):
        raise NoRealTangent("both tangents from the hit point are complex")
    if f.branch is None:
        raise ValueError("a branch is required on a line that is not tangent to the conic")
    r = sqrt_any(disc if exact else max(float(disc), 0.0))
    cands = []
    d = piece.geometry.end.chart()
    a0 = piece.geometry.start.chart()
    e = (d[0] - a0[0], d[1] - a0[1])
    qc = Q.chart()
    for x, y in ((-q[1] + r, 2 * q[0]), (-q[1] - r, 2 * q[0])):
        L = Line(tuple(y * a + x * b for a, b in zip(l0, l1)))
        T = Point(la.matvec(dual, L.xi))
        tc = T.chart()
        side = e[0] * (tc[1] - qc[1]) - e[1] * (tc[0] - qc[0])
        cands.append((1 if float(side) > 0 else -1, L))
    for sgn, L in cands:
        if sgn == f.branch:
            return L
    raise NoRealTangent("no tangent on the requested branch")


# ---------------------------------------------------------------- reflection


def _dir(L: Line):
    return L.direction()


def reflect(piece: BoundaryPiece, Q: Point, v_in, eps: float = EPS):
    """Decompose v_in along (tangent, transversal) and flip the transversal part."""
    for C in piece.endpoints():
        if C == Q:
            raise CornerHit(f"hit at corner {C}")
    T = _dir(piece.tangent_at(Q))
    N = _dir(transversal_line(piece, Q, eps))
    det = T[0] * N[1] - T[1] * N[0]
    exact = all(is_exact(x) for x in (*T, *N, *v_in))
    if is_zero(det, 0.0 if exact else eps * math.hypot(*map(float, T)) * math.hypot(*map(float, N))):
        raise TangentialIncidence("transversal line is tangent to the boundary")
    alpha = (v_in[0] * N[1] - v_in[1] * N[0]) / det
    beta = (T[0] * v_in[1] - T[1] * v_in[0]) / det
    nb = beta * math.hypot(float(N[0]), float(N[1])) if not exact else beta
    if is_zero(nb, 0.0 if exact else eps * math.hypot(float(v_in[0]), float(v_in[1]))):
        raise TangentialIncidence("incoming direction is tangent to the boundary")
    return (alpha * T[0] - beta * N[0], alpha * T[1] - beta * N[1])


def harmonicity(piece: BoundaryPiece, Q: Point, v_in, v_out):
    """Cross-ratio of (tangent, transversal; incoming, outgoing) in the pencil at Q."""
    from .projgeom import cross_ratio

    T = _dir(piece.tangent_at(Q))
    N = _dir(transversal_line(piece, Q))
    return cross_ratio(tuple(T), tuple(N), tuple(v_in), tuple(v_out))


# ---------------------------------------------------------------- states and orbits


@dataclass(frozen=True)
class OrientedState:
    position: tuple
    direction: tuple

    def __post_init__(self):
        if all(is_zero(x, 0.0) for x in self.direction):
            raise ValueError("direction must be nonzero")


def moment(s: OrientedState) -> tuple:
    (x1, x2), (v1, v2) = s.position, s.direction
    return (-v2, v1, x1 * v2 - x2 * v1)


@dataclass
class Orbit:
    states: list
    pieces: list
    event: str | None = None
    detail: str = ""

    @property
    def bounces(self) -> int:
        return len(self.states) - 1


def _ray_hits(piece: BoundaryPiece, pos, v, tmin):
    x, y = pos
    if piece.is_arc:
        q = piece.geometry.conic.q
        Q = (x, y, 1.0)
        V = (v[0], v[1], 0.0)
        qf = [[float(c) for c in row] for row in q]
        a = la.quad_form(qf, V)
        b = 2 * la.bilinear(qf, Q, V)
        c = la.quad_form(qf, Q)
        roots = []
        if abs(a) <= 1e-300:
            if abs(b) > 1e-300:
                roots = [-c / b]
        else:
            disc = b * b - 4 * a * c
            if disc < 0:
                return []
            sq = math.sqrt(disc)
            r1 = (-b - math.copysign(sq, b)) / (2 * a)
            roots = [r1, c / (a * r1)] if r1 != 0 else [0.0, -b / a]
        out = []
        for t in roots:
            if t > tmin:
                t = _polish(a, b, c, t)
                P = Point(x + t * v[0], y + t * v[1], 1.0)
                if piece.geometry.contains(P):
                    out.append((t, P))
        return out
    xi = [float(c) for c in piece.geometry.line.xi]
    den = xi[0] * v[0] + xi[1] * v[1]
    if abs(den) <= 1e-300:
        return []
    t = -(xi[0] * x + xi[1] * y + xi[2]) / den
    if t <= tmin:
        return []
    P = Point(x + t * v[0], y + t * v[1], 1.0)
    return [(t, P)] if piece.geometry.contains(P, 1e-12) else []


def _polish(a, b, c, t):
    for _ in range(2):
        d = 2 * a * t + b
        if d == 0:
            break
        t = t - (a * t * t + b * t + c) / d
    return t


def structure_base_points(piece: BoundaryPiece) -> list:
    """Real points of the piece where its field is undefined."""
    f = piece.field
    if isinstance(f, DualPencilField):
        C = piece.geometry.conic
        adj = la.adjugate3(C.q)
        out = []
        try:
            pts = classify_pencil(f.pencil).base_points
        except Exception:
            return []
        for L, _ in pts:
            h = la.normalize(L.h)
            if not all(is_real_approx(complex(x), 1e-9) for x in h):
                continue
            hr = tuple(complex(x).real for x in h)
            if abs(la.quad_form([[float(c) for c in r] for r in adj], hr)) > 1e-7 * max(1.0, max(abs(c) for c in hr)) ** 2:
                continue
            T = la.matvec([[float(c) for c in r] for r in adj], hr)
            if max(abs(c) for c in T) > 0 and abs(T[2]) > 1e-12 * max(abs(c) for c in T):
                out.append((T[0] / T[2], T[1] / T[2]))
        return out
    if isinstance(f, ExoticField):
        return [P.chart() for P in exotic_base_points(f) if P.is_finite()]
    if isinstance(f, CentralField) and f.focus.is_finite():
        return [tuple(float(c) for c in f.focus.chart())]
    return []


def trace_orbit(b: Billiard, s0: OrientedState, n: int, eps: float = 1e-9, delta: float = 1e-6) -> Orbit:
    pos = tuple(float(c) for c in s0.position)
    v = tuple(float(c) for c in s0.direction)
    states = [OrientedState(pos, v)]
    hit_pieces = []
    base = [(k, bp) for k, p in enumerate(b.pieces) for bp in structure_base_points(p)]
    corners = [tuple(float(c) for c in C.chart()) for C in b.corners() if C.is_finite()]
    for _ in range(n):
        scale = max(1.0, abs(pos[0]), abs(pos[1])) / max(math.hypot(*v), 1e-300)
        tmin = 1e-9 * scale
        hits = []
        for k, piece in enumerate(b.pieces):
            for t, P in _ray_hits(piece, pos, v, tmin):
                hits.append((t, k, P))
        if not hits:
            return Orbit(states, hit_pieces, "Escape", "no boundary ahead")
        hits.sort(key=lambda h: h[0])
        t, k, P = hits[0]
        hp = P.chart()
        if len(hits) > 1 and hits[1][0] - t <= eps * max(1.0, t) and hits[1][1] != k:
            return Orbit(states, hit_pieces, "CornerHit", f"simultaneous hit near {hp}")
        for c in corners:
            if math.hypot(hp[0] - c[0], hp[1] - c[1]) <= delta:
                return Orbit(states, hit_pieces, "CornerHit", f"corner {c}")
        for kk, bp in base:
            if kk == k and math.hypot(hp[0] - bp[0], hp[1] - bp[1]) <= delta:
                return Orbit(states, hit_pieces, "BasePointApproach", f"base point {bp}")
        try:
            v = reflect(b.pieces[k], P, v, eps)
        except TangentialIncidence as exc:
            return Orbit(states, hit_pieces, "TangentialIncidence", str(exc))
        except BasePointOfStructure as exc:
            return Orbit(states, hit_pieces, "BasePointApproach", str(exc))
        except CornerHit as exc:
            return Orbit(states, hit_pieces, "CornerHit", str(exc))
        nv = math.hypot(*v)
        v = (v[0] / nv, v[1] / nv)
        pos = (float(hp[0]), float(hp[1]))
        states.append(OrientedState(pos, v))
        hit_pieces.append(k)
    return Orbit(states, hit_pieces)


def integral_along(R: RationalIntegral, orbit: Orbit) -> list:
    return [R(moment(s)) for s in orbit.states]


def relative_drift(values: list) -> float:
    v0 = values[0]
    return max(abs(v - v0) for v in values) / max(abs(v0), 1e-300)


# ---------------------------------------------------------------- duality


def segment_field_vertex(line: Line, f) -> VertexSpec:
    """The vertex dual to a line equipped with a segment field."""
    center = Point(line.xi)
    if isinstance(f, (CentralField, ParallelField)):
        return VertexSpec(center, AngularSymmetry(Line(f.focus.h)))
    if isinstance(f, NormalField):
        a, b = line.xi[0], line.xi[1]
        return VertexSpec(center, AngularSymmetry(Line(a, f.sign * b, 0 * a)))
    if isinstance(f, TangentField):
        return VertexSpec(center, DegenerateAngular(Conic(la.adjugate3(f.s.q))))
    raise UnsupportedFieldKind(type(f).__name__)


def arc_dual_structure(piece: BoundaryPiece) -> DualBilliardStructure:
    C = piece.geometry.conic
    dual = Conic(la.adjugate3(C.q))
    f = piece.field
    if isinstance(f, DualPencilField):
        return DualBilliardStructure(dual, PencilDefined(f.pencil))
    if isinstance(f, NormalField):
        return DualBilliardStructure(dual, PencilDefined(Pencil(dual, f.isotropic_form())))
    if isinstance(f, ExoticField):
        # lines transform by the inverse transpose of the point map
        n_lines = la.transpose(la.adjugate3(f.normalization.m))
        return DualBilliardStructure.exotic(f.kind, MOMENT_TO_CHART @ ProjMap(n_lines))
    raise UnsupportedFieldKind(type(f).__name__)


def dualize(b: Billiard) -> DualMultibilliard:
    curves, vertices = [], []
    for piece in b.pieces:
        if piece.is_arc:
            s = arc_dual_structure(piece)
            if not any(_same_structure(s, c) for c in curves):
                curves.append(s)
        else:
            v = segment_field_vertex(piece.geometry.line, piece.field)
            if v not in vertices:
                vertices.append(v)
    return DualMultibilliard(curves, vertices)


def _same_structure(s1, s2) -> bool:
    if s1.carrier != s2.carrier or type(s1.kind) is not type(s2.kind):
        return False
    if isinstance(s1.kind, PencilDefined):
        return s1.kind.pencil.same_span(s2.kind.pencil)
    return s1.kind.kind == s2.kind.kind and s1.kind.normalization == s2.kind.normalization


def vertex_line(v: VertexSpec):
    """Inverse of segment_field_vertex: (line, field)."""
    line = Line(v.center.h)
    if isinstance(v.action, AngularSymmetry):
        focus = Point(v.action.axis.xi)
        if focus.is_finite():
            return line, CentralField(focus)
        return line, ParallelField((focus.h[0], focus.h[1]))
    return line, TangentField(Conic(la.adjugate3(v.action.s.q)))


# ---------------------------------------------------------------- integrals


def _vars():
    M1, M2, M3 = (HomPoly.variable(i) for i in range(3))
    # v1 = M2, v2 = -M1, Delta = M3
    return M2, -M1, M3


def tabulated_psi(kind: ExoticKind, squared: bool = True) -> FactoredIntegral:
    """The exotic integrals written in (v1, v2, Delta), as functions of M."""
    v1, v2, D = _vars()
    base = 4 * v1 * D - v2 * v2
    tag = kind.tag
    if tag == "2a1":
        den = [(v1, 2)] + [(4 * v1 * D - v2 * v2 * c, 2) for c in kind.coefficients]
        return FactoredIntegral([(base, 2 * kind.N + 1)], den, 4 * kind.N + 2)
    if tag == "2a2":
        den = [(v1, 1), (v2, 1)] + [(4 * v1 * D - v2 * v2 * c, 1) for c in kind.coefficients]
        R = FactoredIntegral([(base, kind.N + 1)], den, 2 * kind.N + 2)
        return R.squared() if squared else R
    if tag == "2b1":
        return FactoredIntegral([(base, 2)], [(4 * v1 * D + 3 * v2 * v2, 1), (2 * v1 + v2, 1), (2 * D + v2, 1)], 4)
    if tag == "2b2":
        den = [(v2 * v2 + 4 * D * D + 4 * v1 * D + 4 * v1 * v1, 1), (v2 * v2 + 4 * v1 * v1, 1)]
        return FactoredIntegral([(base, 2)], den, 4)
    if tag == "2c1":
        return FactoredIntegral([(base, 3)], [(v1**3 + D**3 + v1 * v2 * D, 2)], 6)
    if tag == "2c2":
        cub = v2**3 + 2 * v2 * v2 * v1 + (v1 * v1 + 2 * v2 * v2 + 5 * v1 * v2) * D + v1 * D * D
        return FactoredIntegral([(base, 3)], [(cub, 2)], 6)
    cub = 8 * v1 * v2 * v2 + 2 * v2**3 + (4 * v1 * v1 + 5 * v2 * v2 + 28 * v1 * v2) * D + 16 * v1 * D * D
    return FactoredIntegral([(base, 3)], [(v1 * D + 2 * v2 * v2, 1), (2 * v1 + v2, 1), (cub, 1)], 6)


def psi_integral(piece: BoundaryPiece, squared: bool = True) -> RationalIntegral:
    """Integral of the piece's field as a rational function of the moment."""
    f = piece.field
    if isinstance(f, ExoticField):
        R = tabulated_psi(f.kind, squared)
        return R.compose_linear(la.transpose(la.adjugate3(f.normalization.m)))
    if isinstance(f, (DualPencilField, NormalField)):
        return canonical_integral(arc_dual_structure(piece))
    raise UnsupportedFieldKind(f"{type(f).__name__} carries no integral of its own")


@dataclass(frozen=True)
class ChiCoefficients:
    ab_cd: object
    bc_ad: object
    ac_bd: object

    def as_tuple(self):
        return (self.ab_cd, self.bc_ad, self.ac_bd)


def _quadrilateral_points(a: Line, b: Line, c: Line, d: Line) -> dict:
    ls = {"a": a, "b": b, "c": c, "d": d}
    if len({a, b, c, d}) < 4:
        raise DegenerateQuadrilateral("lines must be distinct")
    names = "abcd"
    for i in range(4):
        for j in range(i + 1, 4):
            for k in range(j + 1, 4):
                P = meet(ls[names[i]], ls[names[j]])
                if ls[names[k]].contains(P):
                    raise DegenerateQuadrilateral("three of the lines are concurrent")
    return {e + f: meet(ls[e], ls[f]) for i, e in enumerate(names) for f in names[i + 1:]}


# Lines at infinity tried in turn; the first keeps the usual chart x3 = 1.
_CHI_CHARTS = ((0, 0, 1), (1, 1, 1), (1, -2, 3), (2, 3, -5), (-3, 5, 7), (5, -7, 11))


def chi_closed_form(a: Line, b: Line, c: Line, d: Line, chart=None):
    """Chi triple from signed lengths along a and b, measured from the
    corner ab.  Everything is kept homogeneous, so the triple matches the
    representatives used by ``chi_forms``.

    Lengths are taken in the affine chart whose line at infinity is
    ``chart``; by default the usual chart is used unless it sends a corner
    to infinity, in which case the next chart avoiding all corners is.
    Returns None when no tried chart works."""
    pts = _quadrilateral_points(a, b, c, d)
    for ell in ((chart,) if chart is not None else _CHI_CHARTS):
        out = _chi_in_chart(pts, tuple(F(x) for x in ell))
        if out is not None:
            return out
    return None


def _chi_in_chart(pts: dict, ell):
    y = {k: la.dot(ell, P.h) for k, P in pts.items()}
    if any(is_zero(v, 0.0) for v in y.values()):
        return None

    def signed(P0, P1):
        # an affine coordinate along the line through P0, P1
        for u in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
            if not is_zero(la.dot(u, P0.h) * la.dot(ell, P1.h) - la.dot(u, P1.h) * la.dot(ell, P0.h), 0.0):
                break

        def det(P, Q):
            return la.dot(u, P.h) * la.dot(ell, Q.h) - la.dot(u, Q.h) * la.dot(ell, P.h)

        return det

    ab, ac, ad, bc, bd = (pts[k] for k in ("ab", "ac", "ad", "bc", "bd"))
    da, db = signed(ab, ad), signed(ab, bc)
    num = da(ab, ac) * y["ad"] * db(ab, bd) * y["bc"]
    den = da(ad, ab) * y["ac"] * db(bc, ab) * y["bd"]
    if is_zero(num, 0.0) or is_zero(den, 0.0):
        return None
    # (num - den, -num, den) is the relation for representatives normalized
    # to the chart; rescale to the stored ones
    return ChiCoefficients(
        (num - den) * y["bc"] * y["ad"] * y["ac"] * y["bd"],
        -num * y["ab"] * y["cd"] * y["ac"] * y["bd"],
        den * y["ab"] * y["cd"] * y["bc"] * y["ad"],
    )


def chi_forms(a: Line, b: Line, c: Line, d: Line) -> tuple:
    """The three quadratic forms <r(em), M><r(fn), M> as HomPolys in M."""
    pts = _quadrilateral_points(a, b, c, d)

    def lin(P):
        return HomPoly.linear(P.h)

    return (lin(pts["ab"]) * lin(pts["cd"]), lin(pts["bc"]) * lin(pts["ad"]), lin(pts["ac"]) * lin(pts["bd"]))


def chi_nullspace(a: Line, b: Line, c: Line, d: Line) -> ChiCoefficients:
    forms = chi_forms(a, b, c, d)
    monos = sorted({m for f in forms for m in f.terms})
    rows = [[f.terms.get(m, 0) for f in forms] for m in monos]
    ns = la.nullspace(rows)
    if len(ns) != 1:
        raise DegenerateQuadrilateral("the quadratic forms do not satisfy a unique relation")
    return ChiCoefficients(*ns[0])


def chi_coefficients(a: Line, b: Line, c: Line, d: Line) -> ChiCoefficients:
    """Closed form, cross-checked against the nullspace solve; falls back
    to the nullspace when the closed form degenerates."""
    null = chi_nullspace(a, b, c, d)
    closed = chi_closed_form(a, b, c, d)
    if closed is None:
        return null
    if not la.proportional(closed.as_tuple(), null.as_tuple(), 1e-9):
        raise DegenerateQuadrilateral("closed form and nullspace disagree")
    return closed


def degree12_billiard_integral(a: Line, b: Line, c: Line, d: Line, mu=DEFAULT_MU) -> RationalIntegral:
    chi = chi_coefficients(a, b, c, d)
    forms = chi_forms(a, b, c, d)
    return ordered_pair_integral([f * k for f, k in zip(forms, chi.as_tuple())], mu)


# ---------------------------------------------------------------- catalogs


@dataclass(frozen=True)
class AdmissibleLine:
    line: Line
    field: object
    flavor: str
    case: str
    label: str
    real: bool = True


@dataclass(frozen=True)
class AdmissibleLineFamily:
    case: str
    flavor: str
    label: str
    vertex_family: VertexFamily

    def __call__(self, param) -> AdmissibleLine:
        """``param`` is a line (for families of lines) or a dual-pencil
        member given by its parameter or its point conic."""
        if isinstance(param, Line):
            param = Point(param.xi)
        elif isinstance(param, Conic):
            param = Conic(la.adjugate3(param.q))
        return _line_entry(self.vertex_family(param))


_PAIR_OF_M = {"M1": ("AB", "CD"), "M2": ("AD", "BC"), "M3": ("AC", "BD")}
_M_OF_PAIR = {
    frozenset({frozenset("ab"), frozenset("cd")}): "m1",
    frozenset({frozenset("bc"), frozenset("ad")}): "m2",
    frozenset({frozenset("ac"), frozenset("bd")}): "m3",
}


def _line_label(label: str, names: dict | None = None) -> str:
    """Lower-case label; with ``names`` (base-point letter -> a..d) the
    labels follow the caller's naming of the four tangent lines."""
    if not names:
        return label.lower()
    if label.startswith("K_"):
        return "k_" + "".join(sorted(names[label[2]] + names[label[3]]))
    if label in _PAIR_OF_M:
        key = frozenset(frozenset(names[x] + names[y]) for x, y in _PAIR_OF_M[label])
        return _M_OF_PAIR[key]
    return label.lower()


def _line_entry(e: VertexCatalogEntry, names=None) -> AdmissibleLine:
    line, f = vertex_line(e.spec)
    return AdmissibleLine(line, f, e.flavor, e.case, _line_label(e.label, names), e.real)


def _base_point_names(dp: Pencil, lines) -> dict:
    pts = classify_pencil(dp).points
    names = {}
    for letter, P in pts.items():
        for name, L in zip("abcd", lines):
            if P == Point(L.xi):
                names[letter] = name
    if len(names) != 4 or len(set(names.values())) != 4:
        raise ValueError("the lines are not the four common tangents of the dual pencil")
    return names


def admissible_lines(dp: Pencil, lines=None) -> list:
    """Admissible lines of a dual pencil, given by its tangential forms.

    For a dual pencil of conics tangent to four lines, passing those lines
    as ``lines`` = (a, b, c, d) names the catalog entries m1..m3, k_ef
    after them.
    """
    names = _base_point_names(dp, lines) if lines is not None else None
    out = []
    for e in admissible_vertices(dp):
        if isinstance(e, VertexCatalogEntry):
            out.append(_line_entry(e, names))
        else:
            out.append(AdmissibleLineFamily(e.case, e.flavor, _line_label(e.label), e))
    return out


def admissible_line(dp: Pencil, lines, label: str) -> AdmissibleLine:
    for e in admissible_lines(dp, lines):
        if isinstance(e, AdmissibleLine) and e.label == label:
            return e
    raise KeyError(label)


def exotic_admissible_lines(kind: ExoticKind) -> list:
    """Admissible lines for the exotic field on x2 = x1^2."""
    out = []
    for ev in exotic_admissible_vertices(kind):
        # chart vertex (z, w, t) -> moment M = (2 z, t, w)
        z, w, t = ev.spec.center.h
        line = Line(2 * z, t, w)
        ax = ev.spec.action.axis.xi
        # the axis is a line of the chart; its dual point in the plane
        focus = Point(la.matvec(la.transpose(MOMENT_TO_CHART.m), ax))
        f = CentralField(focus) if focus.is_finite() else ParallelField((focus.h[0], focus.h[1]))
        out.append(AdmissibleLine(line, f, "admissible", kind.tag, str(line), ev.real))
    return out


@dataclass
class BilliardReport:
    valid: bool
    kind: str
    predicted_min_degree: object
    violated_conditions: list = field(default_factory=list)
    messages: list = field(default_factory=list)
    dual_report: object = None


def validate_billiard(b: Billiard) -> BilliardReport:
    arcs = [p for p in b.pieces if p.is_arc]
    if not arcs:
        return BilliardReport(False, "none", None, [1], ["the boundary has no conic arc"])
    mb = dualize(b)
    exotic = [s for s in mb.curves if isinstance(s.kind, Exotic)]
    if exotic:
        if len(mb.curves) > 1:
            return BilliardReport(False, "exotic", None, [1], ["an exotic arc must be the only conic"])
        s = exotic[0]
        from .dualbill import structure_vertices

        allowed = [ev.spec for ev in structure_vertices(s)]
        bad = [v for v in mb.vertices if v not in allowed]
        if bad:
            return BilliardReport(False, "exotic", None, [2], [f"{len(bad)} segment line(s) are not admissible"])
        kind = s.kind.kind
        degree = kind.degree
        if kind.tag == "2a2" and mb.vertices:
            degree = 4 * kind.N + 4
        return BilliardReport(True, "exotic", degree)
    rep = validate_pencil_multibilliard(mb)
    return BilliardReport(rep.is_pencil_type, "dual-pencil", rep.predicted_min_degree,
                          rep.violated_conditions, rep.messages, rep)
