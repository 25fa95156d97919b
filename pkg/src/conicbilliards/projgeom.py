"""Projective-plane primitives over exact or floating scalars.

Points and lines are homogeneous triples compared up to scale.  Values on a
projective line are scalars or :data:`INF`; internally they are handled as
homogeneous pairs ``(x, y)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg as la
from .errors import (
    DegenerateQuadratic,
    DegenerateTriple,
    NoSuchInvolution,
    SingularMap,
    UndefinedCrossRatio,
)
from .scalars import EPS, is_exact, is_zero


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def to_pair(z):
    """P^1 value -> homogeneous pair."""
    if z is INF:
        return (Fraction(1), Fraction(0))
    if isinstance(z, tuple):
        return z
    return (z, Fraction(1) if is_exact(z) else 1.0)


def from_pair(p, eps: float = EPS):
    """Homogeneous pair -> P^1 value (a scalar or INF)."""
    x, y = p
    if is_zero(y, 0.0 if is_exact(y) else eps * max(1.0, abs(x))):
        return INF
    return x / y


def _pdet(p, q):
    return p[0] * q[1] - p[1] * q[0]


def _coerce(x):
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    return x


def _triple(h):
    h = tuple(_coerce(x) for x in h)
    if len(h) != 3:
        raise ValueError("homogeneous triple expected")
    if la.is_zero_vector(h, 0.0):
        raise ValueError("the zero triple is not a projective element")
    return h


def _hash_key(h):
    if all(is_exact(x) for x in h):
        return la.normalize(h)
    n = la.normalize(h)
    return tuple(round(complex(x).real, 6) + 1j * round(complex(x).imag, 6) for x in n)


def _normalize_triple(h):
    if is_exact(h[2]):
        if h[2] != 0:
            return tuple(x / h[2] for x in h)
        return la.normalize(h)
    m = max(abs(x) for x in h)
    if abs(h[2]) > EPS * m:
        return tuple(x / h[2] for x in h)
    return la.normalize(h)


@dataclass(frozen=True, eq=False)
class Point:
    h: tuple

    def __init__(self, *coords):
        if len(coords) == 1:
            coords = tuple(coords[0])
        if len(coords) == 2:
            coords = (coords[0], coords[1], 1)
        object.__setattr__(self, "h", _triple(coords))

    @classmethod
    def affine(cls, x, y):
        return cls(x, y, 1)

    def __eq__(self, other):
        return isinstance(other, Point) and la.proportional(self.h, other.h)

    def __hash__(self):
        return hash(("P", _hash_key(self.h)))

    def __iter__(self):
        return iter(self.h)

    def normalized(self) -> "Point":
        """Representative scaled to x3 = 1 when finite, else to a unit entry."""
        return Point(_normalize_triple(self.h))

    def is_finite(self, eps: float = EPS) -> bool:
        return not is_zero(self.h[2], eps * max(abs(x) for x in self.h))

    def chart(self):
        """Affine coordinates (x1, x2) in the chart x3 = 1."""
        return (self.h[0] / self.h[2], self.h[1] / self.h[2])

    def is_real(self) -> bool:
        from .scalars import conj

        return la.proportional(self.h, tuple(conj(x) for x in self.h))

    def __repr__(self):
        return "Point" + repr(tuple(self.h))


@dataclass(frozen=True, eq=False)
class Line:
    xi: tuple

    def __init__(self, *coeffs):
        if len(coeffs) == 1:
            coeffs = tuple(coeffs[0])
        object.__setattr__(self, "xi", _triple(coeffs))

    def __eq__(self, other):
        return isinstance(other, Line) and la.proportional(self.xi, other.xi)

    def __hash__(self):
        return hash(("L", _hash_key(self.xi)))

    def __iter__(self):
        return iter(self.xi)

    def __call__(self, P: Point):
        """Value of the linear functional at a representative of P."""
        return la.dot(self.xi, P.h)

    def contains(self, P: Point, eps: float = EPS) -> bool:
        v = la.dot(self.xi, P.h)
        if is_exact(v):
            return v == 0
        scale = max(abs(x) for x in self.xi) * max(abs(x) for x in P.h)
        return abs(v) <= eps * scale

    def is_real(self) -> bool:
        from .scalars import conj

        return la.proportional(self.xi, tuple(conj(x) for x in self.xi))

    def normalized(self) -> "Line":
        return Line(_normalize_triple(self.xi))

    def direction(self):
        """Affine direction vector of the line in the chart x3 = 1."""
        return (self.xi[1], -self.xi[0])

    def __repr__(self):
        return "Line" + repr(tuple(self.xi))


def join(P: Point, Q: Point) -> Line:
    if P == Q:
        raise DegenerateTriple("join of coincident points")
    return Line(la.cross(P.h, Q.h))


def meet(L: Line, M: Line) -> Point:
    if L == M:
        raise DegenerateTriple("meet of coincident lines")
    return Point(la.cross(L.xi, M.xi))


def collinear(P: Point, Q: Point, R: Point, eps: float = EPS) -> bool:
    d = la.det3((P.h, Q.h, R.h))
    if is_exact(d):
        return d == 0
    return abs(d) <= eps * max(1.0, max(abs(x) for v in (P.h, Q.h, R.h) for x in v) ** 3)


def concurrent(K: Line, L: Line, M: Line, eps: float = EPS) -> bool:
    return collinear(Point(K.xi), Point(L.xi), Point(M.xi), eps)


# ---------------------------------------------------------------- maps


class ProjMap:
    """Invertible 3x3 matrix acting on the projective plane."""

    __slots__ = ("m",)

    def __init__(self, m):
        m = tuple(tuple(_coerce(x) for x in row) for row in m)
        if is_zero(la.det3(m), 0.0):
            raise SingularMap("matrix is not invertible")
        self.m = m

    @classmethod
    def identity(cls):
        return cls(la.identity(3))

    @classmethod
    def diag(cls, a, b, c):
        z = Fraction(0)
        return cls(((a, z, z), (z, b, z), (z, z, c)))

    def __call__(self, e):
        return transform(self, e)

    def __matmul__(self, other: "ProjMap") -> "ProjMap":
        return ProjMap(la.matmul(self.m, other.m))

    def inverse(self) -> "ProjMap":
        return ProjMap(la.adjugate3(self.m))

    def is_involution(self) -> bool:
        sq = la.matmul(self.m, self.m)
        return la.proportional(la.flatten(sq), la.flatten(la.identity(3)))

    def is_identity(self) -> bool:
        return la.proportional(la.flatten(self.m), la.flatten(la.identity(3)))

    def __eq__(self, other):
        return isinstance(other, ProjMap) and la.proportional(la.flatten(self.m), la.flatten(other.m))

    def __hash__(self):
        return hash(_hash_key(la.flatten(self.m)))

    def __repr__(self):
        return f"ProjMap({self.m})"


def transform(m: ProjMap, e):
    """Push e forward by m: points covariantly, lines and conics contragrediently."""
    from .conics import Conic

    if isinstance(e, Point):
        return Point(la.matvec(m.m, e.h))
    inv = la.adjugate3(m.m)
    if isinstance(e, Line):
        return Line(la.matvec(la.transpose(inv), e.xi))
    if isinstance(e, Conic):
        return Conic(la.matmul(la.transpose(inv), la.matmul(e.q, inv)))
    raise TypeError(f"cannot transform {type(e).__name__}")


def orthogonal_polar_dual(e):
    """Point [a:b:c] <-> line with coefficients (a, b, c)."""
    if isinstance(e, Point):
        return Line(e.h)
    if isinstance(e, Line):
        return Point(e.xi)
    raise TypeError(f"cannot dualize {type(e).__name__}")


class MobiusMap:
    """Fractional-linear map z -> (a z + b)/(c z + d) on a projective line."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        a, b, c, d = (_coerce(x) for x in (a, b, c, d))
        if is_zero(a * d - b * c, 0.0):
            raise SingularMap("degenerate fractional-linear map")
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @classmethod
    def from_matrix(cls, m):
        return cls(m[0][0], m[0][1], m[1][0], m[1][1])

    @property
    def matrix(self):
        return ((self.a, self.b), (self.c, self.d))

    def apply_pair(self, p):
        x, y = p
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def __call__(self, z):
        return from_pair(self.apply_pair(to_pair(z)))

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        return MobiusMap.from_matrix(la.matmul(self.matrix, other.matrix))

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def trace(self):
        return self.a + self.d

    def is_identity(self, eps: float = EPS) -> bool:
        return la.proportional((self.a, self.b, self.c, self.d), (1, 0, 0, 1), eps)

    def is_involution(self, eps: float = EPS) -> bool:
        sq = self @ self
        return sq.is_identity(eps)

    def fixed_points(self):
        """Homogeneous fixed points as roots of c x^2 + (d - a) x y - b y^2."""
        return (self.c, self.d - self.a, -self.b)

    def __eq__(self, other):
        return isinstance(other, MobiusMap) and la.proportional(
            (self.a, self.b, self.c, self.d), (other.a, other.b, other.c, other.d)
        )

    def __hash__(self):
        return hash(_hash_key((self.a, self.b, self.c, self.d)))

    def normalized(self) -> "MobiusMap":
        return MobiusMap(*la.normalize((self.a, self.b, self.c, self.d)))

    def __repr__(self):
        return f"MobiusMap({self.a}, {self.b}, {self.c}, {self.d})"


# ---------------------------------------------------------------- P^1 tools


def cross_ratio(a, b, c, d):
    """((a-c)(b-d)) / ((a-d)(b-c)) with the usual conventions at INF."""
    pa, pb, pc, pd = (to_pair(x) for x in (a, b, c, d))
    pts = [pa, pb, pc, pd]
    distinct = []
    for p in pts:
        if not any(la.proportional(p, q) for q in distinct):
            distinct.append(p)
    if len(distinct) < 3:
        raise UndefinedCrossRatio("fewer than three distinct arguments")
    num = _pdet(pa, pc) * _pdet(pb, pd)
    den = _pdet(pa, pd) * _pdet(pb, pc)
    return from_pair((num, den))


def harmonic_conjugate(a, b, c):
    """The d with cross_ratio(a, b, c, d) = -1."""
    pa, pb, pc = (to_pair(x) for x in (a, b, c))
    if la.proportional(pa, pb) or la.proportional(pc, pa) or la.proportional(pc, pb):
        raise DegenerateTriple("harmonic conjugate needs a != b and c distinct from both")
    ac, bc = _pdet(pa, pc), _pdet(pb, pc)
    return from_pair((ac * pb[0] + bc * pa[0], ac * pb[1] + bc * pa[1]))


def involution_form(z0, q):
    """Symmetric bilinear form (A, B, C) whose null pairs A zz' + B(z+z') + C = 0
    define the involution fixing z0 and pairing the roots of q = (a, b, c).

    Homogeneous version: pairs [x:y], [x':y'] with
    A x x' + B (x y' + y x') + C y y' = 0.
    """
    a, b, c = (_coerce(x) for x in q)
    if is_zero(a, 0.0) and is_zero(b, 0.0) and is_zero(c, 0.0):
        raise DegenerateQuadratic("zero quadratic")
    x0, y0 = to_pair(z0)
    # pairing the roots: A c - B b + C a = 0 ; fixing z0: A x0^2 + 2B x0 y0 + C y0^2 = 0
    return la.cross((c, -b, a), (x0 * x0, 2 * x0 * y0, y0 * y0))


def involution_fixing_point_swapping_roots(z0, q, eps: float = EPS) -> MobiusMap:
    """Involution of the projective line fixing z0 and swapping the roots of
    q(z) = a z^2 + b z + c (a pair of points at INF when a = 0 is allowed).

    Pure linear algebra on coefficients: complex root pairs never need to be
    extracted.
    """
    a, b, c = (_coerce(x) for x in q)
    A, B, C = involution_form(z0, (a, b, c))
    x0, y0 = to_pair(z0)
    qz0 = a * x0 * x0 + b * x0 * y0 + c * y0 * y0
    tol = 0.0 if all(is_exact(x) for x in (a, b, c, x0, y0)) else eps
    if la.is_zero_vector((A, B, C), tol * max(1.0, max(abs(x) for x in (a, b, c)) ** 2)):
        raise DegenerateQuadratic("z0 is a double root of q")
    if is_zero(A * C - B * B, tol * max(1.0, max(abs(x) for x in (A, B, C)) ** 2)):
        if is_zero(qz0, tol):
            raise NoSuchInvolution("z0 coincides with exactly one root of q")
        raise NoSuchInvolution("degenerate pairing")
    return MobiusMap(-B, -C, A, B)


def quadratic_preserved(g: MobiusMap, q, eps: float = EPS) -> bool:
    """True iff q o g is proportional to q as binary quadratic forms."""
    a, b, c = q
    # substitute x -> g.a x + g.b y, y -> g.c x + g.d y
    p, r, s, t = g.a, g.b, g.c, g.d
    na = a * p * p + b * p * s + c * s * s
    nb = 2 * a * p * r + b * (p * t + r * s) + 2 * c * s * t
    nc = a * r * r + b * r * t + c * t * t
    return la.proportional((na, nb, nc), (a, b, c), eps)


def mobius_from_three(src, dst) -> MobiusMap:
    """The fractional-linear map sending three P^1 values to three others."""

    def to_standard(z1, z2, z3):
        # map z1 -> 0, z2 -> INF, z3 -> 1
        p1, p2, p3 = (to_pair(z) for z in (z1, z2, z3))
        # m(z) = k * det(z, p1) / det(z, p2)
        # rows: [p1[1], -p1[0]] and [p2[1], -p2[0]]
        n1 = (p1[1], -p1[0])
        n2 = (p2[1], -p2[0])
        k_num = n2[0] * p3[0] + n2[1] * p3[1]
        k_den = n1[0] * p3[0] + n1[1] * p3[1]
        return MobiusMap(k_num * n1[0], k_num * n1[1], k_den * n2[0], k_den * n2[1])

    s = to_standard(*src)
    t = to_standard(*dst)
    return t.inverse() @ s


def divide_root(quad, root):
    """Given binary quadratic (a, b, c) vanishing at root=[x0:y0], return the
    other root as a homogeneous pair."""
    a, b, c = quad
    x0, y0 = to_pair(root)
    # a x^2 + b x y + c y^2 = (y0 x - x0 y)(u x + v y)
    if not is_zero(y0, 0.0):
        u = a / y0
        v = (b + x0 * u) / y0
    else:
        v = -c / x0
        u = -b / x0
    return (-v, u)
