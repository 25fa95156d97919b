"""Dual billiard structures on conics and their rational integrals.

A dual billiard structure on a conic assigns to each point P an involution
of the tangent line at P fixing P.  Two families are implemented: the
structures defined by a pencil of conics (the involution swaps the two
intersection points with every member) and the exotic families, which live
in the chart where the conic is the parabola w = z^2.  Chart coordinates are
homogeneous (z, w, t).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .conics import (
    Conic,
    LineChart,
    Pencil,
    conic_parametrization,
    find_rational_point,
    line_conic_restriction,
    points_on_line,
    tangent_line,
)
from .errors import (
    BasePointOfStructure,
    EvaluationOnExceptionalLine,
    NoSuchInvolution,
    DegenerateQuadratic,
    VerificationFailed,
)
from .polynomials import HomPoly, RationalIntegral, values_equal
from .projgeom import (
    INF,
    Line,
    MobiusMap,
    Point,
    ProjMap,
    involution_fixing_point_swapping_roots,
    quadratic_preserved,
    transform,
)
from .scalars import EPS, QuadraticNumber, is_exact, is_zero

F = Fraction

PARABOLA = Conic(((F(-1), F(0), F(0)), (F(0), F(0), F(1, 2)), (F(0), F(1, 2), F(0))))

EXOTIC_TAGS = ("2a1", "2a2", "2b1", "2b2", "2c1", "2c2", "2d")


@dataclass(frozen=True)
class ExoticKind:
    tag: str
    N: int = 1

    def __post_init__(self):
        if self.tag not in EXOTIC_TAGS:
            raise ValueError(f"unknown exotic kind {self.tag!r}")
        if self.tag in ("2a1", "2a2") and self.N < 1:
            raise ValueError("N must be at least 1")
        if self.tag not in ("2a1", "2a2"):
            object.__setattr__(self, "N", 1)

    @property
    def rho(self) -> Fraction:
        if self.tag == "2a1":
            return 2 - F(2, 2 * self.N + 1)
        if self.tag == "2a2":
            return 2 - F(1, self.N + 1)
        raise AttributeError("rho is defined for 2a kinds only")

    @property
    def coefficients(self) -> list:
        """The constants c_j of the 2a integrals."""
        N = self.N
        if self.tag == "2a1":
            return [F(-4 * j * (2 * N + 1 - j), (2 * N + 1 - 2 * j) ** 2) for j in range(1, N + 1)]
        if self.tag == "2a2":
            return [F(-j * (2 * N + 2 - j), (N + 1 - j) ** 2) for j in range(1, N + 1)]
        return []

    @property
    def degree(self) -> int:
        return {"2a1": 4 * self.N + 2, "2a2": 2 * self.N + 2, "2b1": 4, "2b2": 4}.get(self.tag, 6)

    @classmethod
    def parse(cls, text: str) -> "ExoticKind":
        """Accepts '2c2', '2a1-N2', '2a1(N=2)' or '2a1:2'."""
        s = text.strip().replace(" ", "")
        for sep in ("-N", "(N=", ":"):
            if sep in s:
                tag, n = s.split(sep, 1)
                return cls(tag, int(n.rstrip(")")))
        return cls(s)

    def __str__(self):
        return f"{self.tag}-N{self.N}" if self.tag in ("2a1", "2a2") else self.tag


def _pole_free(kind: ExoticKind, z0) -> bool:
    t = kind.tag
    if t in ("2a1", "2a2"):
        return z0 != 0
    if t in ("2b1", "2c2", "2d"):
        return z0 != 0 and z0 != 1
    if t == "2b2":
        return z0 * z0 + 1 != 0
    if t == "2c1":
        return z0 * z0 * z0 != 1
    return True


def _f(kind: ExoticKind, z):
    t = kind.tag
    if t == "2b1":
        return (5 * z - 3) / (2 * z * (z - 1))
    if t == "2b2":
        return 3 * z / (z * z + 1)
    if t == "2c1":
        return 4 * z * z / (z * z * z - 1)
    if t == "2c2":
        return (8 * z - 4) / (3 * z * (z - 1))
    if t == "2d":
        return (7 * z - 4) / (3 * z * (z - 1))
    raise ValueError(t)


def exotic_tangent_mobius(kind: ExoticKind, z0) -> MobiusMap:
    """The involution of the tangent line at (z0, z0^2) in the coordinate
    u = z - z0 along the line."""
    if not _pole_free(kind, z0):
        raise BasePointOfStructure(f"z0={z0} is singular for {kind}")
    if kind.tag in ("2a1", "2a2"):
        rho = kind.rho
        eta = ((rho - 1, -(rho - 2)), (rho, -(rho - 1)))
        to_zeta = ((1, z0), (0, z0))
        from_zeta = ((z0, -z0), (0, 1))
        return MobiusMap.from_matrix(la.matmul(from_zeta, la.matmul(eta, to_zeta)))
    return MobiusMap(-1, 0, _f(kind, z0), 1)


def exotic_chart_integral(kind: ExoticKind) -> RationalIntegral:
    """The integral of the exotic kind in homogeneous chart coordinates."""
    z, w, t = (HomPoly.variable(i) for i in range(3))
    base = w * t - z * z
    tag = kind.tag
    if tag == "2a1":
        den = t * t
        for c in kind.coefficients:
            den = den * (w * t - z * z * c) ** 2
        return RationalIntegral(base ** (2 * kind.N + 1), den, kind.degree)
    if tag == "2a2":
        den = z * t
        for c in kind.coefficients:
            den = den * (w * t - z * z * c)
        return RationalIntegral(base ** (kind.N + 1), den, kind.degree)
    if tag == "2b1":
        return RationalIntegral(base**2, (w * t + 3 * z * z) * (z - t) * (z - w), 4)
    if tag == "2b2":
        return RationalIntegral(base**2, (z * z + w * w + w * t + t * t) * (z * z + t * t), 4)
    if tag == "2c1":
        return RationalIntegral(base**3, (t**3 + w**3 - 2 * z * w * t) ** 2, 6)
    if tag == "2c2":
        cubic = 8 * z**3 - 8 * z * z * w - 8 * z * z * t - w * w * t - w * t * t + 10 * z * w * t
        return RationalIntegral(base**3, cubic**2, 6)
    cubic = w * t * t + 8 * z * z * t + 4 * w * w * t + 5 * w * z * z - 14 * z * w * t - 4 * z**3
    return RationalIntegral(base**3, (w * t + 8 * z * z) * (z - t) * cubic, 6)


# ---------------------------------------------------------------- structures


@dataclass(frozen=True)
class PencilDefined:
    pencil: Pencil


@dataclass(frozen=True)
class Exotic:
    kind: ExoticKind
    normalization: ProjMap = field(default_factory=ProjMap.identity)


class DualBilliardStructure:
    """A conic carrying a pencil-type or exotic family of tangent involutions."""

    def __init__(self, carrier: Conic, kind):
        self.carrier = carrier
        self.kind = kind
        if isinstance(kind, PencilDefined):
            if kind.pencil.parameter_of(carrier) is None:
                raise ValueError("carrier is not a member of the pencil")
        elif isinstance(kind, Exotic):
            if transform(kind.normalization, carrier) != PARABOLA:
                raise ValueError("normalization does not send the carrier to w = z^2")
        else:
            raise TypeError("kind must be PencilDefined or Exotic")

    @classmethod
    def pencil_defined(cls, pencil: Pencil, lam) -> "DualBilliardStructure":
        return cls(pencil.member(lam), PencilDefined(pencil))

    @classmethod
    def exotic(cls, kind: ExoticKind, normalization: ProjMap | None = None) -> "DualBilliardStructure":
        n = normalization or ProjMap.identity()
        return cls(transform(n.inverse(), PARABOLA), Exotic(kind, n))

    @property
    def carrier_parameter(self):
        return self.kind.pencil.parameter_of(self.carrier)

    def __repr__(self):
        return f"DualBilliardStructure({self.carrier}, {self.kind})"


class LineInvolution:
    """An involution of a projective line given in a LineChart coordinate."""

    __slots__ = ("chart", "mobius")

    def __init__(self, chart: LineChart, mobius: MobiusMap):
        self.chart, self.mobius = chart, mobius

    def __call__(self, X: Point) -> Point:
        return self.chart.point(self.mobius.apply_pair(self.chart.coordinate_pair(X)))

    apply = __call__

    @property
    def line(self) -> Line:
        return self.chart.line


_AUX = [F(0), F(1), F(-1), F(2), F(-2), F(3), F(1, 2), F(-1, 2), F(5), F(-3), INF]


def tangent_involution(s: DualBilliardStructure, P: Point, eps: float = EPS) -> LineInvolution:
    if not s.carrier.contains(P, eps):
        raise ValueError(f"{P} is not on the carrier")
    if isinstance(s.kind, Exotic):
        return _exotic_involution(s, P)
    return _pencil_involution(s, P, eps)


def _unit(v):
    m = max(abs(x) for x in v)
    return tuple(x / m for x in v)


def _pencil_involution(s, P, eps):
    pencil = s.kind.pencil
    L = tangent_line(s.carrier, P)
    if all(is_exact(x) for x in P.h):
        p1 = next(X for X in points_on_line(L) if X != P)
    else:
        # well-scaled chart: unit representative of P and the point of L orthogonal to it
        P = Point(_unit(P.h))
        p1 = Point(_unit(la.cross(_unit(L.xi), P.h)))
    chart = LineChart(P, p1)
    lam_c = pencil.parameter_of(s.carrier)
    quads = []
    for lam in _AUX:
        if lam is INF and lam_c is INF:
            continue
        if lam is not INF and lam_c is not INF and lam == lam_c:
            continue
        member = pencil.member(lam)
        q = line_conic_restriction(member, P, p1)
        # q[2] is the member evaluated at P, so its natural size is |C| |P|^2
        size = max(abs(x) for row in member.q for x in row) * max(abs(x) for x in P.h) ** 2
        if is_zero(q[2], 0.0 if is_exact(q[2]) else eps * max(1.0, size)):
            raise BasePointOfStructure(f"{P} is a base point of the pencil")
        quads.append(q)
        if len(quads) == 3:
            break
    try:
        g = involution_fixing_point_swapping_roots(0, quads[0], eps)
    except (NoSuchInvolution, DegenerateQuadratic) as exc:
        raise BasePointOfStructure(str(exc)) from exc
    for q in quads[1:]:
        if not quadratic_preserved(g, q, eps * 1e3):
            raise VerificationFailed("tangent involution does not respect every member")
    return LineInvolution(chart, g)


def _exotic_involution(s, P):
    n = s.kind.normalization
    Pn = transform(n, P)
    if is_zero(Pn.h[2], 0.0 if is_exact(Pn.h[2]) else EPS):
        raise BasePointOfStructure("the point at infinity of the parabola is a base point")
    z0 = Pn.h[0] / Pn.h[2]
    g = exotic_tangent_mobius(s.kind.kind, z0)
    one = F(1) if is_exact(z0) else 1.0
    zero = F(0) if is_exact(z0) else 0.0
    # common scaling of both preimages keeps the chart parameter u = z - z0
    adj = la.adjugate3(n.m)
    p0 = Point(la.matvec(adj, (z0, z0 * z0, one)))
    p1 = Point(la.matvec(adj, (one, 2 * z0, zero)))
    return LineInvolution(LineChart(p0, p1), g)


def canonical_integral(s: DualBilliardStructure) -> RationalIntegral:
    if isinstance(s.kind, Exotic):
        return exotic_chart_integral(s.kind.kind).compose_linear(s.kind.normalization.m)
    pencil = s.kind.pencil
    lam = pencil.parameter_of(s.carrier)
    if lam is INF:
        return RationalIntegral(pencil.c1.polynomial(), pencil.c0.polynomial(), 2)
    return RationalIntegral(s.carrier.polynomial(), pencil.c1.polynomial(), 2)


def pencil_parameter_function(pencil: Pencil) -> RationalIntegral:
    """The quadratic function whose value at a point of member(lam) is lam."""
    return RationalIntegral(-pencil.c0.polynomial(), pencil.c1.polynomial(), 2)


# ---------------------------------------------------------------- vertices


@dataclass(frozen=True)
class AngularSymmetry:
    axis: Line


@dataclass(frozen=True)
class DegenerateAngular:
    s: Conic


@dataclass(frozen=True)
class VertexSpec:
    center: Point
    action: object

    def __post_init__(self):
        if isinstance(self.action, AngularSymmetry):
            if self.action.axis.contains(self.center):
                raise ValueError("center lies on the axis")
        elif isinstance(self.action, DegenerateAngular):
            if not self.action.s.contains(self.center):
                raise ValueError("center must lie on the conic")
            if not self.action.s.is_regular():
                raise ValueError("conic must be regular")
        else:
            raise TypeError("action must be AngularSymmetry or DegenerateAngular")

    @property
    def is_quasi_global(self) -> bool:
        return isinstance(self.action, DegenerateAngular)


def angular_symmetry(center: Point, axis: Line) -> ProjMap:
    """The involution fixing the axis pointwise and the center."""
    A, l = center.h, axis.xi
    la_ = la.dot(l, A)
    m = tuple(tuple((la_ if i == j else 0) - 2 * A[i] * l[j] for j in range(3)) for i in range(3))
    return ProjMap(m)


def conic_angular_symmetry(center: Point, s: Conic) -> ProjMap:
    """Angular symmetry whose axis is the polar of the center."""
    return angular_symmetry(center, s.polar(center))


class DegenerateAngularMap:
    """Birational involution fixing the conic s pointwise and every line
    through the center A: Y -> S(Y, Y) A - S(A, Y) Y."""

    def __init__(self, center: Point, s: Conic):
        self.center, self.s = center, s

    def __call__(self, Y: Point, eps: float = EPS) -> Point:
        q, A = self.s.q, self.center.h
        yy = la.quad_form(q, Y.h)
        ay = la.bilinear(q, A, Y.h)
        exact = is_exact(ay) and is_exact(yy)
        scale = max(abs(x) for x in Y.h) * max(abs(x) for x in A) * max(abs(x) for x in la.flatten(q))
        if is_zero(ay, 0.0 if exact else eps * scale):
            if Y == self.center:
                return self.center
            raise EvaluationOnExceptionalLine("point on the tangent line at the center")
        return Point(tuple(yy * a - ay * y for a, y in zip(A, Y.h)))

    apply = __call__

    def exceptional_line(self) -> Line:
        return self.s.polar(self.center)

    def chart_normal_form(self):
        """(N, g): a ProjMap N sending the center to [0:1:0] and the tangent
        at the center to t = 0, and coefficients g = (g2, g1, g0) with s
        becoming w = g2 z^2 + g1 z + g0; there the map reads
        (z, w) -> (z, 2 g(z) - w)."""
        A = self.center
        L = self.exceptional_line()
        B = next(X for X in points_on_line(L) if X != A)
        for C in (Point(1, 0, 0), Point(0, 1, 0), Point(0, 0, 1)):
            if not L.contains(C):
                break
        # columns of the inverse map: [1:0:0] -> B, [0:1:0] -> A, [0:0:1] -> C
        inv = la.transpose((B.h, A.h, C.h))
        N = ProjMap(inv).inverse()
        qn = transform(N, self.s).q
        # qn: a z^2 + 2 d z t + f t^2 + 2 e w t (no w^2, no z w)
        e2 = 2 * qn[1][2]
        return N, (-qn[0][0] / e2, -2 * qn[0][2] / e2, -qn[2][2] / e2)


def vertex_map(v: VertexSpec):
    if isinstance(v.action, AngularSymmetry):
        return angular_symmetry(v.center, v.action.axis)
    return DegenerateAngularMap(v.center, v.action.s)


def apply_vertex_map(vm, P: Point) -> Point:
    if isinstance(vm, ProjMap):
        return transform(vm, P)
    return vm(P)


@dataclass(frozen=True)
class ExoticVertex:
    spec: VertexSpec
    real: bool


def _omega():
    return QuadraticNumber(F(-1, 2), F(1, 2), -3)


def exotic_admissible_vertices(kind: ExoticKind) -> list:
    """Admissible vertices in the chart where the carrier is w = z^2."""
    tag = kind.tag
    centers = []
    if tag in ("2a1", "2a2", "2b2"):
        centers = [(Point(1, 0, 0), True)]
    elif tag == "2b1":
        centers = [(Point(0, -1, 1), True)]
    elif tag == "2c1":
        om = _omega()
        centers = [
            (Point(0, -1, 1), True),
            (Point(F(0), -om, F(1)), False),
            (Point(F(0), -(om * om), F(1)), False),
        ]
    elif tag == "2c2":
        centers = [(Point(0, -1, 1), True), (Point(1, 0, 1), True), (Point(1, 1, 0), True)]
    return [ExoticVertex(VertexSpec(c, AngularSymmetry(PARABOLA.polar(c))), real) for c, real in centers]


def structure_vertices(s: DualBilliardStructure) -> list:
    """Exotic admissible vertices carried back to the structure's plane."""
    n = s.kind.normalization
    inv = n.inverse()
    out = []
    for ev in exotic_admissible_vertices(s.kind.kind):
        c = transform(inv, ev.spec.center)
        ax = transform(inv, ev.spec.action.axis)
        out.append(ExoticVertex(VertexSpec(c, AngularSymmetry(ax)), ev.real))
    return out


@dataclass
class DualMultibilliard:
    curves: list
    vertices: list = field(default_factory=list)
    pencil: Pencil | None = None


# ---------------------------------------------------------------- invariance


@dataclass
class ComponentReport:
    name: str
    samples: int = 0
    failures: int = 0
    max_deviation: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failures == 0 and self.samples > 0


@dataclass
class InvarianceReport:
    components: list

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.components)

    @property
    def max_deviation(self) -> float:
        return max((c.max_deviation for c in self.components), default=0.0)

    def summary(self) -> str:
        lines = []
        for c in self.components:
            status = "ok" if c.ok else "FAIL"
            lines.append(f"{c.name}: {c.samples} samples, {c.failures} failures, max deviation {c.max_deviation:.3g} [{status}]")
        return "\n".join(lines)


def random_rational(rng: random.Random, height: int = 40) -> Fraction:
    return F(rng.randint(-height, height), rng.randint(1, height))


def carrier_parametrization(s: DualBilliardStructure):
    """A rational parametrization t -> point of the carrier."""
    if isinstance(s.kind, Exotic):
        adj = la.adjugate3(s.kind.normalization.m)
        return lambda z: Point(la.matvec(adj, (z, z * z, F(1))))
    P0 = None
    try:
        from .conics import classify_pencil

        for P, _ in classify_pencil(s.kind.pencil).base_points:
            if all(isinstance(x, Fraction) for x in P.h):
                P0 = P
                break
    except Exception:
        P0 = None
    if P0 is None:
        P0 = find_rational_point(s.carrier)
    if P0 is None:
        raise ValueError("no rational point found on the carrier")
    return conic_parametrization(s.carrier, P0)


def _to_float_point(P: Point) -> tuple:
    return tuple(complex(x) if isinstance(x, complex) or (isinstance(x, QuadraticNumber) and not x.is_real()) else float(x) for x in P.h)


def _compare(R, X, Y, backend, eps):
    if backend == "float":
        hx, hy = _to_float_point(X), _to_float_point(Y)
    else:
        hx, hy = X.h, Y.h
    px, py = R.pair(hx), R.pair(hy)
    for n, d in (px, py):
        if is_zero(d, 0.0 if is_exact(d) else eps * max(1.0, abs(n))):
            return None
    return values_equal(px, py, eps)


def check_invariance(
    R: RationalIntegral,
    mb: DualMultibilliard,
    samples: int = 100,
    seed: int = 0,
    backend: str = "rational",
    eps: float = EPS,
    max_attempts: int | None = None,
) -> InvarianceReport:
    """Sample R at tangent-line points and vertex-line points and compare
    with its values at the involution images."""
    rng = random.Random(seed)
    comps = []
    attempts_cap = max_attempts or samples * 20
    for k, s in enumerate(mb.curves):
        comp = ComponentReport(f"curve[{k}]")
        param = carrier_parametrization(s)
        attempts = 0
        while comp.samples < samples and attempts < attempts_cap:
            attempts += 1
            try:
                P = param(random_rational(rng))
                inv = tangent_involution(s, P)
                X = inv.chart.point(random_rational(rng))
                if X == P:
                    continue
                Y = inv(X)
            except (BasePointOfStructure, ZeroDivisionError, EvaluationOnExceptionalLine):
                continue
            res = _compare(R, X, Y, backend, eps)
            if res is None:
                continue
            comp.samples += 1
            if not res[0]:
                comp.failures += 1
            comp.max_deviation = max(comp.max_deviation, float(res[1]))
        comps.append(comp)
    for k, v in enumerate(mb.vertices):
        comp = ComponentReport(f"vertex[{k}]")
        vm = vertex_map(v)
        attempts = 0
        while comp.samples < samples and attempts < attempts_cap:
            attempts += 1
            X = Point(random_rational(rng), random_rational(rng), F(1))
            try:
                Y = apply_vertex_map(vm, X)
            except (EvaluationOnExceptionalLine, ValueError):
                continue
            res = _compare(R, X, Y, backend, eps)
            if res is None:
                continue
            comp.samples += 1
            if not res[0]:
                comp.failures += 1
            comp.max_deviation = max(comp.max_deviation, float(res[1]))
        comps.append(comp)
    return InvarianceReport(comps)
