import random
from fractions import Fraction as F

import pytest
import sympy

from conicbilliards import linalg as la
from conicbilliards.conics import (
    Conic,
    LineChart,
    Pencil,
    classify_pencil,
    dual_conic,
    dual_pencil,
    line_conic_restriction,
    member_through,
    pencil_through_points,
    singular_parameters,
    tangent_line,
)
from conicbilliards.errors import (
    AllMembersSingular,
    BasePoint,
    ContainedLine,
    DegeneratePencil,
    SingularConic,
    SingularPointOfConic,
)
from conicbilliards.projgeom import INF, Line, Point, transform
from conicbilliards.sampling import random_pencil, random_point, random_projmap

UNIT_CIRCLE = Conic(((1, 0, 0), (0, 1, 0), (0, 0, -1)))
# w = z^2 in coordinates (z, w, t)
PARABOLA = Conic.from_coefficients(1, 0, 0, 0, -1, 0)
ORIGIN_CIRCLES = Pencil(Conic(((1, 0, 0), (0, 1, 0), (0, 0, 0))), Conic(((0, 0, 0), (0, 0, 0), (0, 0, -1))))


def proportional(u, v):
    return la.proportional(tuple(u), tuple(v), 0)


def test_restriction_tangent_line_of_circle():
    assert proportional(line_conic_restriction(UNIT_CIRCLE, Point(1, 0), Point(0, 1, 0)), (1, 0, 0))


def test_restriction_parabola_chord():
    q = line_conic_restriction(PARABOLA, Point(0, -1), Point(1, 2, 0))
    z, w = sympy.symbols("z w")
    oracle = sympy.Poly(sympy.expand((z**2 - w).subs(w, 2 * z - 1)), z).all_coeffs()
    assert proportional(q, [F(int(c)) for c in oracle])
    assert proportional(q, (1, -2, 1))


@pytest.mark.parametrize("lam", [F(2), F(5, 3), F(-1)])
def test_restriction_circle_family(lam):
    q = line_conic_restriction(ORIGIN_CIRCLES.member(lam), Point(1, 0), Point(0, 1, 0))
    assert proportional(q, (1, 0, 1 - lam))


def test_restriction_contained_line():
    pair = Conic.line_pair(Line(1, 0, 0), Line(0, 1, 0))
    with pytest.raises(ContainedLine):
        line_conic_restriction(pair, Point(0, 0), Point(0, 1, 0))


def test_tangent_lines():
    assert tangent_line(PARABOLA, Point(1, 1)) == Line(2, -1, -1)
    assert tangent_line(PARABOLA, Point(0, 1, 0)) == Line(0, 0, 1)
    assert tangent_line(UNIT_CIRCLE, Point(0, 1)) == Line(0, 1, -1)


def test_tangent_at_singular_point():
    pair = Conic.line_pair(Line(1, 0, 0), Line(0, 1, 0))
    with pytest.raises(SingularPointOfConic):
        tangent_line(pair, Point(0, 0))


def test_member_through_examples():
    assert member_through(ORIGIN_CIRCLES, Point(1, 0)) == 1
    p = Pencil(PARABOLA, Conic(((0, 0, 0), (0, 0, 0), (0, 0, 1))))
    assert member_through(p, Point(2, 4)) == 0


def test_member_through_base_point():
    p = pencil_through_points(Point(1, 0), Point(0, 1), Point(-1, 0), Point(0, -1))
    with pytest.raises(BasePoint):
        member_through(p, Point(1, 0))


def test_member_through_round_trip():
    rng = random.Random(3)
    p = random_pencil(rng, "a")
    hits = 0
    while hits < 100:
        P = random_point(rng)
        try:
            lam = member_through(p, P)
        except BasePoint:
            continue
        assert p.member(lam).contains(P, 0)
        hits += 1


def test_singular_parameters_two_ellipses():
    p = Pencil(UNIT_CIRCLE, Conic(((F(1, 4), 0, 0), (0, 4, 0), (0, 0, -1))))
    roots = singular_parameters(p)
    assert sorted(m for _, m in roots) == [1, 1, 1]
    lam = sympy.Symbol("lam")
    m = sympy.Matrix(3, 3, lambda i, j: sympy.nsimplify(p.c0.q[i][j]) + lam * sympy.nsimplify(p.c1.q[i][j]))
    oracle = sorted(sympy.solve(m.det(), lam))
    assert sorted(r for r, _ in roots) == [F(int(r.p), int(r.q)) for r in oracle]
    for r, _ in roots:
        assert p.member(r).det() == 0


def test_singular_parameters_concentric_circles():
    assert sorted(singular_parameters(ORIGIN_CIRCLES), key=lambda t: t[1]) == [(0, 1), (INF, 2)]
    assert classify_pencil(ORIGIN_CIRCLES).tag == "c"


def test_singular_parameters_translated_parabolas():
    p = Pencil(PARABOLA, Conic(((0, 0, 0), (0, 0, 0), (0, 0, 1))))
    assert singular_parameters(p) == [(INF, 3)]


def test_all_members_singular():
    p = Pencil(Conic.line_pair(Line(1, 0, 0), Line(0, 1, 0)), Conic.line_pair(Line(1, 0, 0), Line(1, 1, 0)))
    with pytest.raises(AllMembersSingular):
        singular_parameters(p)


def test_classify_two_circles():
    shifted = Conic.from_coefficients(1, 0, 1, -2, 0, 0)  # (x-1)^2 + y^2 = 1
    pt = classify_pencil(Pencil(UNIT_CIRCLE, shifted))
    assert pt.tag == "a"
    assert sorted(flag for _, _, flag in pt.real_flags()) == [False, False, True, True]


def test_classify_tangent_parabolas():
    other = Conic.from_coefficients(2, 0, 0, 0, -1, 0)
    pt = classify_pencil(Pencil(PARABOLA, other))
    assert pt.tag == "c"
    assert {P for P, _ in pt.base_points} == {Point(0, 0), Point(0, 1, 0)}


def test_classify_translated_parabolas():
    other = Conic.from_coefficients(1, 0, 0, 0, -1, -1)
    pt = classify_pencil(Pencil(PARABOLA, other))
    assert pt.tag == "e"
    assert pt.base_points == [(Point(0, 1, 0), 4)]


def test_shared_component_is_degenerate():
    p = Pencil(Conic.line_pair(Line(1, 0, 0), Line(0, 1, 0)), Conic.line_pair(Line(1, 0, 0), Line(1, 1, 1)))
    with pytest.raises(DegeneratePencil):
        classify_pencil(p)


def test_dual_of_unit_circle():
    assert dual_conic(UNIT_CIRCLE) == UNIT_CIRCLE


def test_dual_contains_tangent_lines():
    L = tangent_line(PARABOLA, Point(1, 1))
    assert dual_conic(PARABOLA).contains(Point(L.xi), 0)


def test_dual_ellipse_reciprocal_axes():
    ell = Conic(((F(1, 4), 0, 0), (0, 1, 0), (0, 0, -1)))
    d = dual_conic(ell)
    x, y = sympy.symbols("x y")
    oracle = sympy.Matrix([[sympy.Rational(1, 4), 0, 0], [0, 1, 0], [0, 0, -1]]).adjugate()
    assert proportional(la.flatten(d.q), [F(int(v.p), int(v.q)) for v in oracle])
    assert d == Conic(((4, 0, 0), (0, 1, 0), (0, 0, -1)))
    for P in (Point(2, 0), Point(0, 1), Point(F(6, 5), F(4, 5))):
        assert d.contains(Point(tangent_line(ell, P).xi), 0)


def test_dual_of_singular():
    with pytest.raises(SingularConic):
        dual_conic(Conic.line_pair(Line(1, 0, 0), Line(0, 1, 0)))


def test_dual_pencil_members_are_duals():
    p = pencil_through_points(Point(1, 0), Point(0, 1), Point(-1, 0), Point(0, -1))
    dp = dual_pencil(p)
    for lam in (F(1, 3), F(2), F(-5, 4)):
        assert dp.conic(lam) == dual_conic(p.member(lam))


@pytest.mark.parametrize("tag", list("abcde"))
def test_base_points_on_members(tag):
    rng = random.Random(ord(tag))
    p = random_pencil(rng, tag)
    pt = classify_pencil(p)
    assert sum(m for _, m in pt.base_points) == 4
    for lam in (F(0), F(1), F(-2), F(1, 3), INF):
        for P, _ in pt.base_points:
            assert p.member(lam).contains(P, 0)


@pytest.mark.parametrize("tag", list("abcde"))
def test_classification_invariant_under_conjugation(tag):
    rng = random.Random(100 + ord(tag))
    p = random_pencil(rng, tag)
    assert classify_pencil(p).tag == tag
    for _ in range(20):
        m = random_projmap(rng)
        q = Pencil(transform(m, p.c0), transform(m, p.c1))
        assert classify_pencil(q).tag == tag


def test_dual_is_involutive():
    rng = random.Random(9)
    for _ in range(20):
        c = random_pencil(rng, "a").member(F(1, 2))
        if c.is_regular():
            assert dual_conic(dual_conic(c)) == c


@pytest.mark.parametrize("tag", list("abcde"))
def test_singular_members_have_zero_determinant(tag):
    p = random_pencil(random.Random(200 + ord(tag)), tag)
    for lam, _ in singular_parameters(p):
        assert p.member(lam).det() == 0


def test_line_chart_round_trip():
    ch = LineChart(Point(1, 2), Point(3, -1))
    for z in (F(0), F(2, 7), INF):
        assert ch.coordinate(ch.point(z)) == z
