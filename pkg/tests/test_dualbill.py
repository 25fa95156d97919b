import random
import time
from fractions import Fraction as F

import pytest
import sympy

from conicbilliards import linalg as la
from conicbilliards.conics import Conic, Pencil, tangent_line
from conicbilliards.dualbill import (
    AngularSymmetry,
    DegenerateAngular,
    DegenerateAngularMap,
    DualBilliardStructure,
    DualMultibilliard,
    Exotic,
    ExoticKind,
    PencilDefined,
    VertexSpec,
    apply_vertex_map,
    canonical_integral,
    check_invariance,
    exotic_admissible_vertices,
    exotic_chart_integral,
    exotic_tangent_mobius,
    structure_vertices,
    tangent_involution,
    vertex_map,
)
from conicbilliards.errors import BasePointOfStructure, EvaluationOnExceptionalLine
from conicbilliards.projgeom import Line, MobiusMap, Point, ProjMap, transform
from conicbilliards.sampling import random_point, random_projmap

from oracles import affine, integral_expr, linear_symmetry

PARABOLA = Conic.from_coefficients(1, 0, 0, 0, -1, 0)
ORIGIN_CIRCLES = Pencil(Conic(((1, 0, 0), (0, 1, 0), (0, 0, 0))), Conic(((0, 0, 0), (0, 0, 0), (0, 0, -1))))
KINDS = [ExoticKind("2a1", 1), ExoticKind("2a1", 2), ExoticKind("2a1", 3), ExoticKind("2a2", 1), ExoticKind("2a2", 2)] + [
    ExoticKind(t) for t in ("2b1", "2b2", "2c1", "2c2", "2d")
]
MIRROR = ((-1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_rho_values():
    assert ExoticKind("2a1", 1).rho == F(4, 3)
    assert ExoticKind("2a1", 3).rho == F(12, 7)
    assert ExoticKind("2a2", 2).rho == F(5, 3)


def test_kind_parsing():
    assert ExoticKind.parse("2a1-N2") == ExoticKind("2a1", 2)
    assert ExoticKind.parse("2a2(N=3)") == ExoticKind("2a2", 3)
    assert ExoticKind.parse("2c2") == ExoticKind("2c2")
    with pytest.raises(ValueError):
        ExoticKind("2e")


def test_circle_pencil_mirror_involution():
    s = DualBilliardStructure.pencil_defined(ORIGIN_CIRCLES, F(1))
    inv = tangent_involution(s, Point(1, 0))
    assert inv.line == Line(1, 0, -1)
    for y in (F(2), F(-1, 3), F(5, 7)):
        assert inv(Point(1, y)) == Point(1, -y)


def test_2a1_eta_in_relative_coordinate():
    # zeta = z / z0; on the tangent line at z0 = 1 the map reads (zeta + 2)/(4 zeta - 1)
    for z0 in (F(1), F(3), F(-2, 5)):
        g = exotic_tangent_mobius(ExoticKind("2a1", 1), z0)
        to_u = MobiusMap(z0, -z0, 0, 1)
        eta = to_u.inverse() @ g @ to_u
        assert eta == MobiusMap(1, 2, 4, -1)
        assert eta(F(1)) == 1


def test_2b1_tangent_involution_slope():
    g = exotic_tangent_mobius(ExoticKind("2b1"), F(2))
    assert g == MobiusMap(-1, 0, F(7, 4), 1)


def test_exotic_base_points_rejected():
    with pytest.raises(BasePointOfStructure):
        exotic_tangent_mobius(ExoticKind("2a1", 1), F(0))
    with pytest.raises(BasePointOfStructure):
        exotic_tangent_mobius(ExoticKind("2b1"), F(1))


def test_2a1_integral_formula():
    R = exotic_chart_integral(ExoticKind("2a1", 1))
    z, w = sympy.symbols("z w")
    oracle = (w - z**2) ** 3 / (w + 8 * z**2) ** 2
    assert ExoticKind("2a1", 1).coefficients == [-8]
    assert sympy.simplify(affine(integral_expr(R), z=z, w=w) - oracle) == 0


def test_2a2_integral_formula():
    R = exotic_chart_integral(ExoticKind("2a2", 1))
    z, w = sympy.symbols("z w")
    oracle = (w - z**2) ** 2 / (z * (w + 3 * z**2))
    assert ExoticKind("2a2", 1).coefficients == [-3]
    assert sympy.simplify(affine(integral_expr(R), z=z, w=w) - oracle) == 0


@pytest.mark.parametrize("kind", KINDS, ids=str)
def test_stored_degree(kind):
    R = exotic_chart_integral(kind)
    assert R.num.degree() == R.den.degree() == kind.degree


def test_pencil_canonical_integral_vanishes_on_carrier():
    s = DualBilliardStructure.pencil_defined(ORIGIN_CIRCLES, F(1))
    R = canonical_integral(s)
    for P in (Point(1, 0), Point(F(3, 5), F(4, 5)), Point(F(-5, 13), F(12, 13))):
        assert R.pair(P.h)[0] == 0
    assert R.pair((2, 0, 1))[0] != 0


def test_anchor_evaluation_pair():
    s = DualBilliardStructure.exotic(ExoticKind("2a1", 1))
    R = canonical_integral(s)
    inv = tangent_involution(s, Point(1, 1))
    X = Point(2, 3)
    Yp = inv(X)
    assert Yp == Point(F(4, 7), F(1, 7))
    assert R(X.h) == R(Yp.h) == F(-1, 1225)
    z = sympy.Symbol("z")
    restricted = -((z - 1) ** 6) / (8 * z**2 + 2 * z - 1) ** 2
    assert restricted.subs(z, 2) == restricted.subs(z, sympy.Rational(4, 7)) == sympy.Rational(-1, 1225)


def test_angular_symmetry_chart_action():
    v = VertexSpec(Point(1, 0, 0), AngularSymmetry(Line(1, 0, 0)))
    m = vertex_map(v)
    assert m == ProjMap.diag(-1, 1, 1)
    assert apply_vertex_map(m, Point(1, 1)) == Point(-1, 1)


def test_angular_symmetry_squares_to_identity():
    rng = random.Random(1)
    for _ in range(50):
        C, A, B = random_point(rng), random_point(rng), random_point(rng)
        axis = Line(la.cross(A.h, B.h))
        if axis.contains(C) or A == B:
            continue
        m = vertex_map(VertexSpec(C, AngularSymmetry(axis)))
        P = random_point(rng)
        assert transform(m, transform(m, P)) == P
        assert transform(m, A) == A and transform(m, C) == C
        # every line through the center is preserved
        L = Line(la.cross(C.h, P.h))
        if C != P:
            assert transform(m, L) == L


def test_degenerate_angular_chart_formula():
    vm = vertex_map(VertexSpec(Point(0, 1, 0), DegenerateAngular(PARABOLA)))
    assert vm(Point(1, 1)) == Point(1, 1)
    assert vm(Point(1, 0)) == Point(1, 2)
    rng = random.Random(4)
    for _ in range(30):
        z, w = F(rng.randint(-9, 9), rng.randint(1, 9)), F(rng.randint(-9, 9), rng.randint(1, 9))
        assert vm(Point(z, w)) == Point(z, 2 * z * z - w)


def test_degenerate_angular_involutive_and_exceptional_line():
    rng = random.Random(5)
    S = Conic.from_coefficients(1, 0, 1, 0, 0, -25)
    A = Point(3, 4)
    vm = DegenerateAngularMap(A, S)
    assert vm.exceptional_line() == tangent_line(S, A)
    with pytest.raises(EvaluationOnExceptionalLine):
        vm(Point(F(3) + 4, F(4) - 3))
    for _ in range(50):
        P = random_point(rng)
        try:
            Q = vm(P)
            assert vm(Q) == P
        except EvaluationOnExceptionalLine:
            continue


def test_exotic_vertex_catalog():
    assert [v.spec.center for v in exotic_admissible_vertices(ExoticKind("2a1", 2))] == [Point(1, 0, 0)]
    assert [v.spec.center for v in exotic_admissible_vertices(ExoticKind("2b1"))] == [Point(0, -1)]
    centers = [v.spec.center for v in exotic_admissible_vertices(ExoticKind("2c2"))]
    assert centers == [Point(0, -1), Point(1, 0), Point(1, 1, 0)]
    assert exotic_admissible_vertices(ExoticKind("2d")) == []
    flags = [v.real for v in exotic_admissible_vertices(ExoticKind("2c1"))]
    assert flags == [True, False, False]


@pytest.mark.parametrize("kind", [ExoticKind("2a1", n) for n in (1, 2, 3)] + [ExoticKind("2b2")], ids=str)
def test_mirror_symmetry_even_kinds(kind):
    assert linear_symmetry(exotic_chart_integral(kind), MIRROR)


@pytest.mark.parametrize("n", [1, 2])
def test_mirror_symmetry_flips_sign_for_2a2(n):
    R = exotic_chart_integral(ExoticKind("2a2", n))
    assert linear_symmetry(R, MIRROR, sign=-1)
    assert not linear_symmetry(R, MIRROR)
    assert linear_symmetry(R**2, MIRROR)


@pytest.mark.parametrize("kind", KINDS, ids=str)
def test_exotic_invariance_on_tangent_lines(kind):
    s = DualBilliardStructure.exotic(kind)
    rep = check_invariance(canonical_integral(s), DualMultibilliard([s]), samples=40, seed=3)
    assert rep.ok and rep.max_deviation == 0, rep.summary()


@pytest.mark.parametrize("kind", [ExoticKind("2b1"), ExoticKind("2c1"), ExoticKind("2c2")], ids=str)
def test_exotic_invariance_after_normalization(kind):
    n = random_projmap(random.Random(8))
    s = DualBilliardStructure.exotic(kind, n)
    vertices = [v.spec for v in structure_vertices(s)]
    rep = check_invariance(canonical_integral(s), DualMultibilliard([s], vertices), samples=30, seed=4)
    assert rep.ok, rep.summary()


def test_pencil_multibilliard_quadratic_integral():
    p = Pencil(Conic.from_coefficients(1, 0, 2, 0, 0, -3), Conic.from_coefficients(2, 1, -1, 0, 1, -1))
    s = DualBilliardStructure.pencil_defined(p, F(0))
    t0 = time.time()
    rep = check_invariance(canonical_integral(s), DualMultibilliard([s]), samples=100, seed=6)
    assert rep.ok and rep.components[0].samples == 100, rep.summary()
    assert time.time() - t0 < 20


def test_failures_are_reported_not_raised():
    s = DualBilliardStructure.exotic(ExoticKind("2a1", 1))
    wrong = exotic_chart_integral(ExoticKind("2a1", 2))
    rep = check_invariance(wrong, DualMultibilliard([s]), samples=10, seed=1)
    assert not rep.ok and rep.components[0].failures > 0


def test_structure_rejects_foreign_carrier():
    with pytest.raises(ValueError):
        DualBilliardStructure(Conic.from_coefficients(1, 0, 2, 0, 0, -7), PencilDefined(ORIGIN_CIRCLES))
    with pytest.raises(ValueError):
        DualBilliardStructure(Conic.from_coefficients(1, 0, 1, 0, 0, -7), Exotic(ExoticKind("2d")))
