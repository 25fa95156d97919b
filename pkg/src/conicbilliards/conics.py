"""Conics as symmetric forms, pencils of conics and their classification."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .errors import (
    AllMembersSingular,
    BasePoint,
    ContainedLine,
    DegenerateTriple,
    DegeneratePencil,
    SingularConic,
    SingularPointOfConic,
)
from .polynomials import HomPoly
from .projgeom import INF, Line, Point, join, to_pair
from .scalars import EPS, is_exact, is_real_approx, is_zero, sqrt_any


def _sym(m):
    m = tuple(tuple(Fraction(x) if isinstance(x, int) else x for x in row) for row in m)
    for i in range(3):
        for j in range(i + 1, 3):
            if not (m[i][j] == m[j][i] if is_exact(m[i][j]) else abs(m[i][j] - m[j][i]) <= EPS):
                raise ValueError("conic matrix must be symmetric")
    return m


class Conic:
    """A conic {h : h^T q h = 0} given by a symmetric 3x3 matrix up to scale."""

    __slots__ = ("q",)

    def __init__(self, q):
        q = _sym(q)
        if la.is_zero_vector(la.flatten(q), 0.0):
            raise ValueError("zero matrix is not a conic")
        self.q = q

    @classmethod
    def from_coefficients(cls, a, b, c, d, e, f):
        """a x^2 + b x y + c y^2 + d x t + e y t + f t^2."""
        h = Fraction(1, 2)
        return cls(((a, b * h, d * h), (b * h, c, e * h), (d * h, e * h, f)))

    @classmethod
    def line_pair(cls, L: Line, M: Line):
        u, v = L.xi, M.xi
        h = Fraction(1, 2)
        return cls(tuple(tuple(h * (u[i] * v[j] + u[j] * v[i]) for j in range(3)) for i in range(3)))

    @classmethod
    def double_line(cls, L: Line):
        return cls(la.outer(L.xi, L.xi))

    def form(self, h):
        return la.quad_form(self.q, tuple(h))

    def __call__(self, P: Point):
        return self.form(P.h)

    def polynomial(self) -> HomPoly:
        return HomPoly.quadratic(self.q)

    def contains(self, P: Point, eps: float = EPS) -> bool:
        v = self.form(P.h)
        if is_exact(v):
            return v == 0
        scale = max(abs(x) for x in la.flatten(self.q)) * max(abs(x) for x in P.h) ** 2
        return abs(v) <= eps * scale

    def det(self):
        return la.det3(self.q)

    def is_regular(self) -> bool:
        return not is_zero(self.det(), 0.0 if is_exact(self.det()) else EPS * self._scale() ** 3)

    def _scale(self):
        return max(abs(x) for x in la.flatten(self.q))

    def rank(self) -> int:
        return matrix_rank(self.q)

    def polar(self, P: Point) -> Line:
        return Line(la.matvec(self.q, P.h))

    def dual(self) -> "Conic":
        return dual_conic(self)

    def __eq__(self, other):
        return isinstance(other, Conic) and la.proportional(la.flatten(self.q), la.flatten(other.q))

    def __hash__(self):
        return hash(la.normalize(la.flatten(self.q)))

    def __repr__(self):
        return f"Conic({self.q})"


def matrix_rank(q) -> int:
    if not is_zero(la.det3(q), 0.0 if is_exact(la.det3(q)) else EPS):
        return 3
    if not la.is_zero_vector(la.flatten(la.adjugate3(q)), 0.0 if all(is_exact(x) for x in la.flatten(q)) else EPS):
        return 2
    if not la.is_zero_vector(la.flatten(q), 0.0):
        return 1
    return 0


def kernel_point(q) -> Point:
    """Singular point of a rank-2 conic matrix (any nonzero adjugate row)."""
    adj = la.adjugate3(q)
    row = max(adj, key=lambda r: max(abs(x) for x in r))
    return Point(row).normalized()


def tangent_line(c: Conic, P: Point) -> Line:
    g = la.matvec(c.q, P.h)
    if la.is_zero_vector(g, 0.0 if all(is_exact(x) for x in g) else EPS):
        raise SingularPointOfConic(f"{P} is a singular point of the conic")
    return Line(g)


def dual_conic(c: Conic) -> Conic:
    if not c.is_regular():
        raise SingularConic("dual of a singular conic")
    return Conic(la.adjugate3(c.q))


# ---------------------------------------------------------------- lines


class LineChart:
    """Parametrization z -> P0 + z * P1 of a projective line (z = INF gives P1)."""

    __slots__ = ("p0", "p1")

    def __init__(self, p0: Point, p1: Point):
        if p0 == p1:
            raise DegenerateTriple("chart points coincide")
        self.p0, self.p1 = p0, p1

    @property
    def line(self) -> Line:
        return join(self.p0, self.p1)

    def point(self, z) -> Point:
        x, y = to_pair(z)
        return Point(tuple(y * a + x * b for a, b in zip(self.p0.h, self.p1.h)))

    def coordinate_pair(self, X: Point):
        """Homogeneous coordinate (x, y) with X ~ y*P0 + x*P1."""
        a, b, h = self.p0.h, self.p1.h, X.h
        best = None
        for i in range(3):
            for j in range(i + 1, 3):
                d = a[i] * b[j] - a[j] * b[i]
                if best is None or abs(d) > abs(best[0]):
                    best = (d, i, j)
        d, i, j = best
        y = (h[i] * b[j] - h[j] * b[i]) / d
        x = (a[i] * h[j] - a[j] * h[i]) / d
        return (x, y)

    def coordinate(self, X: Point):
        from .projgeom import from_pair

        return from_pair(self.coordinate_pair(X))


def points_on_line(L: Line):
    """Two distinct points spanning L."""
    cands = []
    for i in range(3):
        e = [Fraction(0)] * 3
        e[i] = Fraction(1)
        v = la.cross(L.xi, e)
        if not la.is_zero_vector(v, 0.0):
            cands.append(v)
    cands.sort(key=lambda v: -max(abs(x) for x in v))
    p0 = Point(cands[0])
    for v in cands[1:]:
        if Point(v) != p0:
            return p0, Point(v)
    raise DegenerateTriple("cannot span line")


def line_conic_restriction(c: Conic, p0: Point, p1: Point):
    """Coefficients (a, b, c) of the quadratic a z^2 + b z + c whose roots
    parametrize the intersection of the conic with the line P0 + z P1."""
    a = la.quad_form(c.q, p1.h)
    b = 2 * la.bilinear(c.q, p0.h, p1.h)
    cc = la.quad_form(c.q, p0.h)
    if all(is_exact(x) for x in (a, b, cc)) and a == b == cc == 0:
        raise ContainedLine("the line lies on the conic")
    return (a, b, cc)


def solve_quadratic(q):
    """Homogeneous roots (x, y) of a x^2 + b x y + c y^2, exact when possible."""
    a, b, c = q
    if is_zero(a, 0.0):
        if is_zero(b, 0.0):
            return [(Fraction(1), Fraction(0)), (Fraction(1), Fraction(0))]
        return [(Fraction(1), Fraction(0)), (-c, b)]
    disc = b * b - 4 * a * c
    s = sqrt_any(disc)
    return [(-b + s, 2 * a), (-b - s, 2 * a)]


def intersect_line_conic(L: Line, c: Conic):
    p0, p1 = points_on_line(L)
    chart = LineChart(p0, p1)
    roots = solve_quadratic(line_conic_restriction(c, p0, p1))
    return [chart.point(r).normalized() for r in roots]


def split_line_pair(q) -> tuple[Line, Line]:
    """Split a rank-2 conic matrix into its two lines."""
    V = kernel_point(q)
    i = max(range(3), key=lambda k: abs(V.h[k]))
    others = [k for k in range(3) if k != i]
    e = []
    for k in others:
        v = [Fraction(0)] * 3
        v[k] = Fraction(1)
        e.append(Point(v))
    chart = LineChart(e[0], e[1])
    roots = solve_quadratic(line_conic_restriction(Conic(q), e[0], e[1]))
    X1, X2 = chart.point(roots[0]), chart.point(roots[1])
    return join(V, X1), join(V, X2)


def double_line_of(q) -> Line:
    row = max(q, key=lambda r: max(abs(x) for x in r))
    return Line(row)


def conic_through(points=(), tangencies=()):
    """The conic through the points and tangent to each (point, line) pair.

    Each tangency also imposes incidence of its point.  Raises
    DegeneratePencil when the conditions do not determine a unique conic.
    """
    rows = []

    def row_for(P):
        x, y, t = P.h
        return [x * x, 2 * x * y, y * y, 2 * x * t, 2 * y * t, t * t]

    for P in points:
        rows.append(row_for(P))
    for P, L in tangencies:
        rows.append(row_for(P))
        x, y, t = P.h
        # q P = (a x + b y + d t, b x + c y + e t, d x + e y + f t), cross L = 0
        g = [
            [x, y, 0, t, 0, 0],
            [0, x, y, 0, t, 0],
            [0, 0, 0, x, y, t],
        ]
        l = L.xi
        rows.append([g[1][k] * l[2] - g[2][k] * l[1] for k in range(6)])
        rows.append([g[2][k] * l[0] - g[0][k] * l[2] for k in range(6)])
        rows.append([g[0][k] * l[1] - g[1][k] * l[0] for k in range(6)])
    ns = la.nullspace(rows)
    if len(ns) != 1:
        raise DegeneratePencil(f"conditions leave a {len(ns)}-dimensional family")
    a, b, c, d, e, f = ns[0]
    return Conic(((a, b, d), (b, c, e), (d, e, f)))


def conic_parametrization(c: Conic, P0: Point):
    """Rational parametrization t -> point of a regular conic through P0."""
    if not c.contains(P0):
        raise ValueError("base point not on conic")
    basis = [Point(1, 0, 0), Point(0, 1, 0), Point(0, 0, 1)]
    others = [B for B in basis if not la.proportional(B.h, P0.h)]
    # two points U, V with P0, U, V independent
    U, V = None, None
    for i in range(len(others)):
        for j in range(i + 1, len(others)):
            if not is_zero(la.det3((P0.h, others[i].h, others[j].h)), 0.0):
                U, V = others[i], others[j]
                break
        if U is not None:
            break

    def point(t) -> Point:
        x, y = to_pair(t)
        R = tuple(y * u + x * v for u, v in zip(U.h, V.h))
        rr = la.quad_form(c.q, R)
        pr = la.bilinear(c.q, P0.h, R)
        X = tuple(rr * p - 2 * pr * r for p, r in zip(P0.h, R))
        if la.is_zero_vector(X, 0.0):
            return P0
        return Point(X)

    return point


def find_rational_point(c: Conic, bound: int = 12):
    """Search for a rational point on c along small rational lines."""
    exact = all(is_exact(x) for x in la.flatten(c.q))
    lines = [Line(0, 0, 1)]
    vals = sorted({Fraction(p, q) for q in range(1, 4) for p in range(-bound, bound + 1)}, key=abs)
    for k in vals:
        lines.append(Line(1, 0, -k))
        lines.append(Line(0, 1, -k))
    for L in lines:
        try:
            p0, p1 = points_on_line(L)
            q = line_conic_restriction(c, p0, p1)
        except ContainedLine:
            return points_on_line(L)[0]
        for r in solve_quadratic(q):
            if not exact or all(isinstance(x, Fraction) for x in r):
                return LineChart(p0, p1).point(r)
    return None


# ---------------------------------------------------------------- pencils


class Pencil:
    """member(lam) = c0 + lam * c1, with member(INF) = c1."""

    __slots__ = ("c0", "c1")

    def __init__(self, c0: Conic, c1: Conic):
        if c0 == c1:
            raise DegeneratePencil("generators are proportional")
        self.c0, self.c1 = c0, c1

    def member(self, lam) -> Conic:
        if lam is INF:
            return self.c1
        x, y = to_pair(lam)
        return Conic(tuple(tuple(y * a + x * b for a, b in zip(r0, r1)) for r0, r1 in zip(self.c0.q, self.c1.q)))

    def member_pair(self, pair) -> Conic:
        x, y = pair
        return Conic(tuple(tuple(y * a + x * b for a, b in zip(r0, r1)) for r0, r1 in zip(self.c0.q, self.c1.q)))

    def same_span(self, other: "Pencil") -> bool:
        """True iff both pencils consist of the same conics."""
        rows = [la.flatten(self.c0.q), la.flatten(self.c1.q)]
        for c in (other.c0, other.c1):
            ns = la.nullspace([[rows[0][k], rows[1][k], la.flatten(c.q)[k]] for k in range(9)])
            if not ns:
                return False
        return True

    def parameter_of(self, c: Conic):
        """lam with member(lam) = c, or None if c is not in the pencil."""
        a, b, v = la.flatten(self.c0.q), la.flatten(self.c1.q), la.flatten(c.q)
        ns = la.nullspace([[a[k], b[k], v[k]] for k in range(9)])
        if len(ns) != 1:
            return None
        s, t, u = ns[0]
        if is_zero(u, 0.0):
            return None
        s, t = -s / u, -t / u
        if is_zero(s, 0.0):
            return INF
        return t / s

    def __repr__(self):
        return f"Pencil({self.c0}, {self.c1})"


def pencil_through_points(A, B, C, D) -> Pencil:
    return Pencil(Conic.line_pair(join(A, B), join(C, D)), Conic.line_pair(join(A, C), join(B, D)))


def member_through(p: Pencil, P: Point, eps: float = EPS):
    v0, v1 = p.c0(P), p.c1(P)
    exact = is_exact(v0) and is_exact(v1)
    tol = 0.0 if exact else eps * max(1.0, abs(v0), abs(v1))
    if is_zero(v1, tol):
        if is_zero(v0, tol):
            raise BasePoint(f"{P} is a base point of the pencil")
        return INF
    return -v0 / v1


def det_cubic(p: Pencil):
    """Coefficients (d0, d1, d2, d3) of det(c0 + lam c1) = sum d_k lam^k."""
    pts = [0, 1, -1, 2]
    exact = all(is_exact(x) for x in la.flatten(p.c0.q) + la.flatten(p.c1.q))
    vals = []
    for t in pts:
        t = Fraction(t) if exact else float(t)
        m = tuple(tuple(a + t * b for a, b in zip(r0, r1)) for r0, r1 in zip(p.c0.q, p.c1.q))
        vals.append(la.det3(m))
    # Newton-free exact interpolation on 0, 1, -1, 2
    f0, f1, fm, f2 = vals
    d0 = f0
    s = (f1 + fm) / 2 - f0  # d2
    o = (f1 - fm) / 2  # d1 + d3
    # f2 = d0 + 2 d1 + 4 d2 + 8 d3
    d3 = (f2 - d0 - 4 * s - 2 * o) / 6
    d1 = o - d3
    return (d0, d1, s, d3)


def singular_parameters(p: Pencil, eps: float = EPS):
    """Roots of det(c0 + lam c1) with multiplicities, INF included.

    Rational roots are exact; irrational ones are numerical approximations.
    """
    import sympy

    d = det_cubic(p)
    exact = all(is_exact(x) for x in d)
    if (exact and all(x == 0 for x in d)) or (not exact and max(abs(x) for x in d) <= eps):
        raise AllMembersSingular("every member of the pencil is singular")
    deg = max(k for k in range(4) if not is_zero(d[k], 0.0 if exact else eps))
    out = []
    if deg < 3:
        out.append((INF, 3 - deg))
    lam = sympy.Symbol("lam")
    if exact and all(isinstance(x, Fraction) for x in d):
        poly = sympy.Poly(sum(sympy.Rational(x.numerator, x.denominator) * lam**k for k, x in enumerate(d)), lam)
        _, factors = poly.factor_list()
        for f, mult in factors:
            if f.degree() == 1:
                a, b = f.all_coeffs()
                r = -sympy.Rational(b) / sympy.Rational(a)
                out.append((Fraction(int(r.p), int(r.q)), mult))
            else:
                for r in f.nroots(n=30):
                    out.append((_num(r), mult))
    else:
        poly = sympy.Poly(sum(complex(x) * lam**k for k, x in enumerate(d)), lam)
        roots = [complex(r) for r in poly.nroots(n=30)]
        used = [False] * len(roots)
        for i, r in enumerate(roots):
            if used[i]:
                continue
            mult = 1
            for j in range(i + 1, len(roots)):
                if not used[j] and abs(roots[j] - r) <= 1e-5 * max(1.0, abs(r)):
                    used[j] = True
                    mult += 1
            out.append((r.real if abs(r.imag) <= eps * max(1.0, abs(r)) else r, mult))
    return out


def _num(r):
    c = complex(r)
    return c.real if abs(c.imag) <= 1e-25 * max(1.0, abs(c)) else c


@dataclass
class PencilType:
    """Type tag plus named base data.

    ``points`` maps names (A, B, C, D, M, ...) to points, ``lines`` maps
    names (L, L_A, L_C, AB, ...) to lines, and ``base_points`` lists
    (point, multiplicity) pairs.
    """

    tag: str
    base_points: list
    points: dict = field(default_factory=dict)
    lines: dict = field(default_factory=dict)
    singular: list = field(default_factory=list)

    @property
    def multiplicities(self):
        return sorted((m for _, m in self.base_points), reverse=True)

    def real_flags(self):
        return [(P, m, P.is_real() if all(is_exact(x) for x in P.h) else all(is_real_approx(x) for x in _real_normalized(P)))
                for P, m in self.base_points]


def _real_normalized(P: Point):
    return la.normalize(P.h)


def _regular_member(p: Pencil, avoid):
    for k in [0, 1, -1, 2, 3, -2, 5, 7]:
        lam = Fraction(k)
        if any(not (a is INF) and abs(complex(a) - k) < 1e-12 for a in avoid):
            continue
        m = p.member(lam)
        if m.is_regular():
            return m
    raise DegeneratePencil("no regular member found")


def classify_pencil(p: Pencil) -> PencilType:
    """Type a-e from the singular members, plus the base data."""
    _check_common_component(p)
    roots = singular_parameters(p)
    mults = sorted((m for _, m in roots), reverse=True)
    if mults == [1, 1, 1]:
        return _base_data_a(p, roots)
    multiple = next(lam for lam, m in roots if m > 1)
    rank = p.member(multiple).rank()
    if rank == 0:
        raise DegeneratePencil("generators are proportional")
    if mults == [2, 1]:
        simple = next(lam for lam, m in roots if m == 1)
        if rank == 2:
            return _base_data_b(p, multiple, simple, roots)
        return _base_data_c(p, multiple, simple, roots)
    if rank == 2:
        return _base_data_d(p, multiple, roots)
    return _base_data_e(p, multiple, roots)


def _check_common_component(p: Pencil):
    if not all(is_exact(x) for x in la.flatten(p.c0.q) + la.flatten(p.c1.q)):
        return
    if not all(isinstance(x, Fraction) for x in la.flatten(p.c0.q) + la.flatten(p.c1.q)):
        return
    from .polynomials import poly_gcd

    g = poly_gcd(p.c0.polynomial(), p.c1.polynomial())
    if g.degree() >= 1:
        raise DegeneratePencil("the generating conics share a component")


def _other_point(points, P):
    for X in points:
        if X != P:
            return X
    return P


def _base_data_a(p, roots):
    exact_roots = [lam for lam, _ in roots if lam is INF or is_exact(lam)]
    lam = exact_roots[0] if exact_roots else roots[0][0]
    gamma = p.member(lam)
    l1, l2 = split_line_pair(gamma.q)
    reg = _regular_member(p, [r for r, _ in roots])
    A, B = intersect_line_conic(l1, reg)
    C, D = intersect_line_conic(l2, reg)
    return PencilType(
        "a",
        [(A, 1), (B, 1), (C, 1), (D, 1)],
        points={"A": A, "B": B, "C": C, "D": D},
        singular=roots,
    )


def _base_data_b(p, lam2, lam1, roots):
    C = kernel_point(p.member(lam2).q)
    gamma1 = p.member(lam1).q
    M = kernel_point(gamma1)
    L = join(C, M)
    la_, lb = split_line_pair(gamma1)
    AB = lb if la_ == L else la_
    reg = _regular_member(p, [r for r, _ in roots])
    A, B = intersect_line_conic(AB, reg)
    return PencilType(
        "b",
        [(A, 1), (B, 1), (C, 2)],
        points={"A": A, "B": B, "C": C, "M": M},
        lines={"L": L, "AB": AB},
        singular=roots,
    )


def _base_data_c(p, lam2, lam1, roots):
    AC = double_line_of(p.member(lam2).q)
    M = kernel_point(p.member(lam1).q)
    reg = _regular_member(p, [r for r, _ in roots])
    A, C = intersect_line_conic(AC, reg)
    return PencilType(
        "c",
        [(A, 2), (C, 2)],
        points={"A": A, "C": C, "M": M},
        lines={"L_A": join(M, A), "L_C": join(M, C), "AC": AC},
        singular=roots,
    )


def _base_data_d(p, lam3, roots):
    q = p.member(lam3).q
    A = kernel_point(q)
    reg = _regular_member(p, [r for r, _ in roots])
    L = tangent_line(reg, A)
    l1, l2 = split_line_pair(q)
    AB = l2 if l1 == L else l1
    B = _other_point(intersect_line_conic(AB, reg), A)
    return PencilType(
        "d",
        [(A, 3), (B, 1)],
        points={"A": A, "B": B},
        lines={"L": L, "AB": AB},
        singular=roots,
    )


def _base_data_e(p, lam3, roots):
    L = double_line_of(p.member(lam3).q)
    reg = _regular_member(p, [r for r, _ in roots])
    A = intersect_line_conic(L, reg)[0]
    return PencilType("e", [(A, 4)], points={"A": A}, lines={"L": L}, singular=roots)


class DualPencil:
    """The family of duals of the members of a pencil.

    ``pencil`` lives in the dual plane: a line with coefficient vector xi is
    tangent to the curve ``conic(lam)`` iff xi^T member(lam) xi = 0.
    """

    __slots__ = ("pencil",)

    def __init__(self, pencil: Pencil):
        self.pencil = pencil

    @classmethod
    def tangent_to_lines(cls, a: Line, b: Line, c: Line, d: Line) -> "DualPencil":
        return cls(pencil_through_points(Point(a.xi), Point(b.xi), Point(c.xi), Point(d.xi)))

    def tangential_form(self, lam) -> Conic:
        return self.pencil.member(lam)

    def conic(self, lam) -> Conic:
        return Conic(la.adjugate3(self.pencil.member(lam).q))

    def parameter_of_conic(self, c: Conic):
        return self.pencil.parameter_of(Conic(la.adjugate3(c.q)))

    def __repr__(self):
        return f"DualPencil({self.pencil})"


def dual_pencil(p: Pencil) -> DualPencil:
    return DualPencil(p)
