import math
import random
from fractions import Fraction as F

import pytest
import sympy

from conicbilliards import linalg as la
from conicbilliards.conics import Conic, Pencil, member_through
from conicbilliards.dualbill import AngularSymmetry, ExoticKind
from conicbilliards.errors import CornerHit, DegenerateQuadrilateral, UnsupportedFieldKind
from conicbilliards.projbill import (
    EXOTIC_CONIC,
    AdmissibleLine,
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
    admissible_lines,
    chi_closed_form,
    chi_coefficients,
    chi_forms,
    chi_nullspace,
    dualize,
    exotic_admissible_lines,
    harmonicity,
    moment,
    psi_integral,
    reflect,
    segment_field_vertex,
    tabulated_psi,
    trace_orbit,
    transversal_line,
    validate_billiard,
    vertex_line,
)
from conicbilliards.projgeom import Line, Point, orthogonal_polar_dual
from conicbilliards.scenes import preset

from oracles import Y, integral_expr

UNIT_CIRCLE = Conic(((1, 0, 0), (0, 1, 0), (0, 0, -1)))
ELLIPSE = Conic(((F(1, 25), 0, 0), (0, F(1, 16), 0), (0, 0, -1)))
SQUARE_LINES = (Line(1, 0, 1), Line(0, 1, 1), Line(1, 0, -1), Line(0, 1, -1))
EXOTIC_KINDS = [ExoticKind("2a1", 1), ExoticKind("2a1", 2), ExoticKind("2a2", 1)] + [
    ExoticKind(t) for t in ("2b1", "2b2", "2c1", "2c2", "2d")
]


def rq(rng, h=9):
    return F(rng.randint(-h, h), rng.randint(1, h))


def ellipse_point(t):
    return Point(5 * (1 - t * t) / (1 + t * t), 8 * t / (1 + t * t))


def test_circle_normal_is_radial():
    piece = BoundaryPiece(ConicArc(UNIT_CIRCLE), NormalField())
    assert transversal_line(piece, Point(0, 1)) == Line(1, 0, 0)


def test_exotic_2a_direction():
    piece = BoundaryPiece(ConicArc(EXOTIC_CONIC), ExoticField(ExoticKind("2a1", 1)))
    N = transversal_line(piece, Point(1, 1))
    assert N.contains(Point(1, 1)) and N.contains(Point(1 + F(4, 3), 1 - F(4, 3)))


def test_2b1_admissible_line_field():
    (entry,) = exotic_admissible_lines(ExoticKind("2b1"))
    assert entry.line == Line(0, 1, -1)
    piece = BoundaryPiece(Segment(Point(-3, 1), Point(3, 1)), entry.field)
    for t in (F(2), F(-1, 3)):
        N = transversal_line(piece, Point(t, 1))
        assert N.contains(Point(0, -1))


def test_2c2_admissible_lines():
    got = {e.line: e.field for e in exotic_admissible_lines(ExoticKind("2c2"))}
    assert set(got) == {Line(0, 1, -1), Line(2, 0, 1), Line(2, 1, 0)}
    assert got[Line(0, 1, -1)].focus == Point(0, -1)
    assert got[Line(2, 1, 0)].focus == Point(-1, 0)
    assert got[Line(2, 0, 1)].focus == Point(-1, 1, 0)


def test_2a_admissible_axis():
    (entry,) = exotic_admissible_lines(ExoticKind("2a1", 3))
    assert entry.line == Line(1, 0, 0)
    assert entry.field.focus == Point(1, 0, 0)


def test_euclidean_mirror():
    piece = BoundaryPiece(Segment(Point(-5, 0), Point(5, 0)), NormalField())
    out = reflect(piece, Point(1, 0), (F(1), F(1)))
    assert la.proportional(out, (1, -1), 0)


def test_projective_reflection_slope():
    # tangent slope 0, transversal slope 1, incoming vertical
    piece = BoundaryPiece(Segment(Point(-5, 0), Point(5, 0)), ParallelField((F(1), F(1))))
    out = reflect(piece, Point(0, 0), (F(0), F(1)))
    # cross_ratio(0, 1, INF, m) = (1 - m) / (-m) = -1
    m = sympy.Symbol("m")
    (sol,) = sympy.solve(sympy.Eq(1 - m, m), m)
    assert out[1] / out[0] == F(int(sol.p), int(sol.q)) == F(1, 2)


def test_reflection_involutive_and_harmonic():
    rng = random.Random(1)
    pieces = [
        BoundaryPiece(ConicArc(ELLIPSE), NormalField()),
        BoundaryPiece(ConicArc(EXOTIC_CONIC), ExoticField(ExoticKind("2c2"))),
        BoundaryPiece(Segment(Point(-9, 2), Point(9, 2)), CentralField(Point(1, -3))),
    ]
    done = 0
    while done < 100:
        piece = pieces[done % 3]
        t = rq(rng)
        Q = {0: ellipse_point(t), 1: Point(t, t * t), 2: Point(t, 2)}[done % 3]
        v = (rq(rng), rq(rng))
        try:
            w = reflect(piece, Q, v)
        except Exception:
            continue
        back = reflect(piece, Q, w)
        assert la.proportional(back, v, 0) and back[0] * v[0] + back[1] * v[1] > 0
        if not la.proportional(v, w, 0):
            assert harmonicity(piece, Q, v, w) == -1
        done += 1


def test_corner_hit_is_reported():
    piece = BoundaryPiece(Segment(Point(0, 0), Point(1, 0)), NormalField())
    with pytest.raises(CornerHit):
        reflect(piece, Point(1, 0), (F(1), F(1)))


def test_moment_example_and_orthogonality():
    assert moment(OrientedState((1, 2), (3, 4))) == (-4, 3, -2)
    rng = random.Random(2)
    for _ in range(50):
        x, v = (rq(rng), rq(rng)), (rq(rng), rq(rng) or F(1))
        M = moment(OrientedState(x, v))
        assert la.dot((x[0], x[1], 1), M) == 0
        t = rq(rng)
        moved = (x[0] + t * v[0], x[1] + t * v[1])
        assert moment(OrientedState(moved, v)) == M


def test_circle_orbit_keeps_caustic():
    b = Billiard([BoundaryPiece(ConicArc(UNIT_CIRCLE), NormalField())])
    orbit = trace_orbit(b, OrientedState((0.3, 0.0), (0.0, 1.0)), 200)
    assert orbit.bounces == 200 and orbit.event is None
    for s in orbit.states:
        (x, y), (v1, v2) = s.position, s.direction
        assert abs(abs(x * v2 - y * v1) / math.hypot(v1, v2) - 0.3) < 1e-9


def test_ellipse_quadratic_integral_conserved():
    b = Billiard([BoundaryPiece(ConicArc(ELLIPSE), NormalField())])
    R = psi_integral(b.pieces[0])
    orbit = trace_orbit(b, OrientedState((0.3, 0.1), (0.6, 0.8)), 200)
    values = [R(moment(s)) for s in orbit.states]
    assert orbit.bounces == 200
    assert max(abs(v - values[0]) for v in values) <= 1e-8 * abs(values[0])


def test_orbit_into_corner_stops():
    scene = preset("fig12-quadrilateral")
    b = scene.billiard
    corner = b.pieces[1].geometry.start.chart()
    start = (1.0, -5.2)
    d = (float(corner[0]) - start[0], float(corner[1]) - start[1])
    orbit = trace_orbit(b, OrientedState(start, d), 10)
    assert orbit.event == "CornerHit" and orbit.bounces == 0


def test_dualize_segment_round_trip():
    line, f = Line(0, 1, -1), CentralField(Point(0, -1))
    v = segment_field_vertex(line, f)
    assert v.center == orthogonal_polar_dual(line)
    assert isinstance(v.action, AngularSymmetry)
    back_line, back_field = vertex_line(v)
    assert back_line == line and back_field.focus == f.focus
    piece = BoundaryPiece(Segment(Point(-1, 1), Point(1, 1)), f)
    assert dualize(Billiard([BoundaryPiece(ConicArc(EXOTIC_CONIC), ExoticField(ExoticKind("2b1"))), piece])).vertices == [v]


def test_psi_2b2_formula():
    R = tabulated_psi(ExoticKind("2b2"))
    v1, v2, D = sympy.symbols("v1 v2 D")
    expr = integral_expr(R).subs({Y[0]: -v2, Y[1]: v1, Y[2]: D}, simultaneous=True)
    oracle = (4 * v1 * D - v2**2) ** 2 / ((v2**2 + 4 * D**2 + 4 * v1 * D + 4 * v1**2) * (v2**2 + 4 * v1**2))
    assert sympy.simplify(expr - oracle) == 0


def test_psi_2a_formula():
    R = tabulated_psi(ExoticKind("2a1", 1))
    v1, v2, D = sympy.symbols("v1 v2 D")
    expr = integral_expr(R).subs({Y[0]: -v2, Y[1]: v1, Y[2]: D}, simultaneous=True)
    oracle = (4 * v1 * D - v2**2) ** 3 / (v1**2 * (4 * v1 * D + 8 * v2**2) ** 2)
    assert sympy.simplify(expr - oracle) == 0


def test_psi_is_zero_homogeneous():
    rng = random.Random(3)
    piece = BoundaryPiece(ConicArc(EXOTIC_CONIC), ExoticField(ExoticKind("2c1")))
    R = psi_integral(piece)
    checked = 0
    while checked < 100:
        x, v, t = (rq(rng), rq(rng)), (rq(rng), rq(rng)), abs(rq(rng))
        if t == 0:
            continue
        a, b = R.pair(moment(OrientedState(x, v))), R.pair(moment(OrientedState(x, (t * v[0], t * v[1]))))
        if a[1] == 0:
            continue
        assert a[0] * b[1] == a[1] * b[0]
        checked += 1


def test_psi_unsupported_for_segments():
    with pytest.raises(UnsupportedFieldKind):
        psi_integral(BoundaryPiece(Segment(Point(0, 0), Point(1, 0)), CentralField(Point(0, 1))))


@pytest.mark.parametrize("kind", EXOTIC_KINDS, ids=str)
def test_psi_invariant_under_arc_reflection(kind):
    rng = random.Random(4)
    piece = BoundaryPiece(ConicArc(EXOTIC_CONIC), ExoticField(kind))
    R = psi_integral(piece)
    checked = 0
    while checked < 30:
        t = rq(rng)
        Q, v = Point(t, t * t), (rq(rng), rq(rng))
        try:
            w = reflect(piece, Q, v)
        except Exception:
            continue
        a, b = R.pair(moment(OrientedState((t, t * t), v))), R.pair(moment(OrientedState((t, t * t), w)))
        if a[1] == 0 or b[1] == 0:
            continue
        assert a[0] * b[1] == a[1] * b[0]
        checked += 1


@pytest.mark.parametrize("kind", [ExoticKind("2a1", 2), ExoticKind("2b2"), ExoticKind("2c2"), ExoticKind("2b1")], ids=str)
def test_psi_invariant_under_admissible_line_reflection(kind):
    rng = random.Random(5)
    R = psi_integral(BoundaryPiece(ConicArc(EXOTIC_CONIC), ExoticField(kind)))
    for entry in exotic_admissible_lines(kind):
        a_, b_, c_ = entry.line.xi
        P0 = Point(-c_ * a_, -c_ * b_, a_ * a_ + b_ * b_)
        d = (-b_, a_)
        seg = BoundaryPiece(Segment(Point(P0.h[0] / P0.h[2] - 50 * d[0], P0.h[1] / P0.h[2] - 50 * d[1]),
                                    Point(P0.h[0] / P0.h[2] + 50 * d[0], P0.h[1] / P0.h[2] + 50 * d[1])), entry.field)
        checked = 0
        while checked < 20:
            s = rq(rng)
            x = (P0.h[0] / P0.h[2] + s * d[0], P0.h[1] / P0.h[2] + s * d[1])
            v = (rq(rng), rq(rng))
            try:
                w = reflect(seg, Point(*x), v)
            except Exception:
                continue
            a, b = R.pair(moment(OrientedState(x, v))), R.pair(moment(OrientedState(x, w)))
            if a[1] == 0 or b[1] == 0:
                continue
            assert a[0] * b[1] == a[1] * b[0]
            checked += 1


def test_psi_2a2_flips_sign_on_axis():
    rng = random.Random(6)
    kind = ExoticKind("2a2", 1)
    R = psi_integral(BoundaryPiece(ConicArc(EXOTIC_CONIC), ExoticField(kind)), squared=False)
    (entry,) = exotic_admissible_lines(kind)
    seg = BoundaryPiece(Segment(Point(0, -50), Point(0, 50)), entry.field)
    checked = 0
    while checked < 20:
        x, v = (F(0), rq(rng)), (rq(rng), rq(rng))
        if v[0] == 0:
            continue
        w = reflect(seg, Point(*x), v)
        (na, da), (nb, db) = R.pair(moment(OrientedState(x, v))), R.pair(moment(OrientedState(x, w)))
        if na == 0 or da == 0 or db == 0:
            continue
        assert nb * da == -na * db
        checked += 1


def test_caustic_property_for_dual_pencil_field():
    rng = random.Random(7)
    dp = Pencil(Conic(la.adjugate3(ELLIPSE.q)), NormalField().isotropic_form())
    piece = BoundaryPiece(ConicArc(ELLIPSE), DualPencilField(dp))
    checked = 0
    while checked < 40:
        t = rq(rng)
        Q = ellipse_point(t)
        v = (rq(rng), rq(rng))
        try:
            w = reflect(piece, Q, v)
        except Exception:
            continue
        x = Q.chart()
        lin, lout = (Point(moment(OrientedState(x, u))) for u in (v, w))
        assert member_through(dp, lin) == member_through(dp, lout)
        checked += 1


def test_chi_square_both_routes():
    # parallel sides put corners at infinity, so lengths are measured in another chart
    assert chi_closed_form(*SQUARE_LINES, chart=(0, 0, 1)) is None
    closed, null = chi_closed_form(*SQUARE_LINES), chi_nullspace(*SQUARE_LINES)
    assert la.proportional(closed.as_tuple(), null.as_tuple(), 0)
    assert la.proportional(null.as_tuple(), (-1, -1, 1), 0)


def test_chi_closed_form_chart_independent():
    rng = random.Random(13)
    done = 0
    while done < 20:
        lines = [Line(rq(rng), rq(rng), rq(rng)) for _ in range(4)]
        try:
            null = chi_nullspace(*lines)
        except (DegenerateQuadrilateral, ValueError):
            continue
        for chart in ((0, 0, 1), (1, 1, 1), (2, 3, -5)):
            closed = chi_closed_form(*lines, chart=chart)
            if closed is not None:
                assert la.proportional(closed.as_tuple(), null.as_tuple(), 0)
        done += 1


def test_chi_relation_is_zero_form():
    rng = random.Random(8)
    done = 0
    while done < 10:
        lines = [Line(rq(rng), rq(rng), rq(rng)) for _ in range(4)]
        try:
            chi = chi_coefficients(*lines)
        except (DegenerateQuadrilateral, ValueError):
            continue
        forms = chi_forms(*lines)
        total = forms[0] * chi.ab_cd + forms[1] * chi.bc_ad + forms[2] * chi.ac_bd
        assert total.is_zero()
        done += 1


def test_chi_rejects_concurrent_lines():
    with pytest.raises(DegenerateQuadrilateral):
        chi_nullspace(Line(1, 0, 0), Line(0, 1, 0), Line(1, 1, 0), Line(1, 2, 3))


def test_k_lines_concurrent():
    from conicbilliards.conics import DualPencil
    from conicbilliards.projgeom import concurrent

    rng = random.Random(9)
    done = 0
    while done < 5:
        lines = [Line(rq(rng), rq(rng), rq(rng)) for _ in range(4)]
        try:
            dp = DualPencil.tangent_to_lines(*lines).pencil
            cat = {e.label: e.line for e in admissible_lines(dp, lines) if isinstance(e, AdmissibleLine)}
        except Exception:
            continue
        for e, f, g in (("a", "b", "c"), ("a", "b", "d"), ("b", "c", "d")):
            k = lambda x, y: cat["k_" + "".join(sorted(x + y))]
            assert concurrent(k(e, f), k(f, g), k(g, e), 0)
        done += 1


def test_confocal_catalog():
    scene = preset("confocal-ellipses")
    real = {e.line: e for e in admissible_lines(scene.pencil.pencil) if isinstance(e, AdmissibleLine) and e.real}
    assert set(real) == {Line(0, 0, 1), Line(1, 0, 0), Line(0, 1, 0), Line(1, 0, 3), Line(1, 0, -3)}
    assert real[Line(1, 0, 3)].field.focus == Point(3, 0)
    assert real[Line(1, 0, -3)].field.focus == Point(-3, 0)
    assert real[Line(1, 0, 0)].field.focus == Point(1, 0, 0)


@pytest.mark.parametrize("name,degree", [("figd4-triangle", 4), ("fig12-quadrilateral", 12), ("semi-euclidean-focus-line", 4), ("confocal-ellipses", 2)])
def test_validate_billiard_presets(name, degree):
    rep = validate_billiard(preset(name).billiard)
    assert rep.valid and rep.predicted_min_degree == degree


def test_validate_billiard_rejects_stray_segment():
    b = Billiard([BoundaryPiece(ConicArc(EXOTIC_CONIC), ExoticField(ExoticKind("2d"))),
                  BoundaryPiece(Segment(Point(-1, 1), Point(1, 1)), CentralField(Point(0, -1)))])
    rep = validate_billiard(b)
    assert not rep.valid
