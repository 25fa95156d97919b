"""Admissible vertices of a pencil, the induced action on the pencil
parameter, the group it generates, and integrals built from that group."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import linalg as la
from .conics import (
    Conic,
    Pencil,
    classify_pencil,
    conic_parametrization,
    kernel_point,
    member_through,
    split_line_pair,
    tangent_line,
)
from .dualbill import (
    AngularSymmetry,
    DegenerateAngular,
    DualMultibilliard,
    PencilDefined,
    VertexSpec,
    apply_vertex_map,
    vertex_map,
)
from .errors import (
    BasePoint,
    DegenerateMu,
    DegeneratePencil,
    EvaluationOnExceptionalLine,
    GeometryError,
    IncompatibleFields,
    NotTypeA,
    PencilNotPreserved,
    ZeroMu,
)
from .polynomials import FactoredIntegral, HomPoly, RationalIntegral
from .projgeom import INF, Line, MobiusMap, Point, join, meet, mobius_from_three, transform
from .scalars import EPS, is_exact, is_real_approx, is_zero

F = Fraction


def _incident(L: Line, P: Point, eps: float = 1e-7) -> bool:
    try:
        return L.contains(P)
    except IncompatibleFields:
        v = sum(complex(a) * complex(b) for a, b in zip(L.xi, P.h))
        scale = max(abs(complex(x)) for x in L.xi) * max(abs(complex(x)) for x in P.h)
        return abs(v) <= eps * scale


def _real(P) -> bool:
    h = P.h if isinstance(P, Point) else P.xi
    if all(is_exact(x) for x in h):
        return P.is_real()
    return all(is_real_approx(x, 1e-7) for x in la.normalize(h))


# ---------------------------------------------------------------- catalog


@dataclass(frozen=True)
class VertexCatalogEntry:
    spec: VertexSpec
    flavor: str
    case: str
    label: str
    real: bool = True

    @property
    def is_skew(self) -> bool:
        return self.flavor == "skew"


@dataclass(frozen=True)
class VertexFamily:
    """A one-parameter family of admissible vertices.

    ``rule`` builds an entry from the free parameter: a point for families
    of centers, a regular member (or its parameter) for quasi-global
    structures.
    """

    case: str
    flavor: str
    label: str
    parameter: str
    rule: Callable

    def __call__(self, param) -> VertexCatalogEntry:
        return self.rule(param)

    def match(self, v: VertexSpec):
        param = v.center if self.parameter == "point" else getattr(v.action, "s", None)
        if param is None:
            return None
        try:
            entry = self.rule(param)
        except (GeometryError, ValueError, ZeroDivisionError):
            return None
        return entry if entry.spec == v else None


def _regular_member_arg(p: Pencil, s):
    conic = s if isinstance(s, Conic) else p.member(s)
    if p.parameter_of(conic) is None:
        raise ValueError("conic is not a member of the pencil")
    if not conic.is_regular():
        raise ValueError("the defining member must be regular")
    return conic


def _quasi_global_family(p, center, case, label):
    def rule(s):
        S = _regular_member_arg(p, s)
        return VertexCatalogEntry(VertexSpec(center, DegenerateAngular(S)), "skew", case, label, _real(center) and _real_conic(S))

    return VertexFamily(case, "skew", label, "member", rule)


def _real_conic(S: Conic) -> bool:
    flat = la.flatten(S.q)
    if all(is_exact(x) for x in flat):
        from .scalars import conj

        return la.proportional(flat, tuple(conj(x) for x in flat))
    return all(is_real_approx(x, 1e-7) for x in la.normalize(flat))


def _pairs_type_a(p: Pencil, pt):
    """The three singular members as (vertex, {name: line}) keyed M1, M2, M3."""
    A, B, C, D = (pt.points[k] for k in "ABCD")
    out = {}
    for lam, _ in pt.singular:
        q = p.member(lam).q
        M = kernel_point(q)
        l1, l2 = split_line_pair(q)
        la_, lo = (l1, l2) if _incident(l1, A) else (l2, l1)
        if _incident(la_, B):
            out["M1"] = (M, {"AB": la_, "CD": lo})
        elif _incident(la_, D):
            out["M2"] = (M, {"AD": la_, "BC": lo})
        else:
            out["M3"] = (M, {"AC": la_, "BD": lo})
    if len(out) != 3:
        raise DegeneratePencil("could not label the singular members")
    return out


def type_a_structure(p: Pencil, pt=None) -> dict:
    """Named vertices M_j, lines EL and skew points K_EL of a type-a pencil."""
    pt = pt or classify_pencil(p)
    if pt.tag != "a":
        raise NotTypeA(f"pencil has type {pt.tag}")
    pairs = _pairs_type_a(p, pt)
    lines, points, axes = {}, {k: v[0] for k, v in pairs.items()}, {}
    for key, (M, ls) in pairs.items():
        others = [pairs[k][0] for k in pairs if k != key]
        names = list(ls)
        for name in names:
            other = names[1 - names.index(name)]
            lines[name] = ls[name]
            points["K_" + name] = meet(ls[name], join(*others))
            axes["K_" + name] = ls[other]
        axes[key] = join(*others)
    return {"points": points, "lines": lines, "axes": axes, "pairs": pairs, "type": pt}


def admissible_vertices(p: Pencil) -> list:
    pt = classify_pencil(p)
    tag = pt.tag
    out = []
    if tag == "a":
        st = type_a_structure(p, pt)
        for j in ("M1", "M2", "M3"):
            M = st["points"][j]
            out.append(VertexCatalogEntry(VertexSpec(M, AngularSymmetry(st["axes"][j])), "standard", "a1", j, _real(M)))
        for name in ("AB", "CD", "AD", "BC", "AC", "BD"):
            K = st["points"]["K_" + name]
            ax = st["axes"]["K_" + name]
            out.append(VertexCatalogEntry(VertexSpec(K, AngularSymmetry(ax)), "skew", "a2", "K_" + name, _real(K) and _real(ax)))
        return out
    pts, lines = pt.points, pt.lines
    if tag == "b":
        C, M = pts["C"], pts["M"]
        K = type_b_skew_point(p, pt)
        out.append(VertexCatalogEntry(VertexSpec(M, AngularSymmetry(join(C, K))), "standard", "b1", "M"))
        out.append(VertexCatalogEntry(VertexSpec(K, AngularSymmetry(lines["L"])), "skew", "b2", "K_AB"))
        out.append(VertexCatalogEntry(VertexSpec(C, AngularSymmetry(lines["AB"])), "skew", "b3", "C"))
        out.append(_quasi_global_family(p, C, "b4", "C"))
        return out
    if tag == "c":
        A, C, M = pts["A"], pts["C"], pts["M"]
        LA, LC, AC = lines["L_A"], lines["L_C"], lines["AC"]
        pair = Conic.line_pair(LA, LC)
        out.append(VertexCatalogEntry(VertexSpec(M, AngularSymmetry(AC)), "standard", "c1", "M"))

        def m_prime(X: Point):
            if not AC.contains(X) or X == A or X == C:
                raise ValueError("M' must lie on AC away from A and C")
            return VertexCatalogEntry(VertexSpec(X, AngularSymmetry(pair.polar(X))), "standard", "c1", "M'", _real(X))

        out.append(VertexFamily("c1", "standard", "M'", "point", m_prime))
        out.append(VertexCatalogEntry(VertexSpec(A, AngularSymmetry(LC)), "skew", "c2", "A", _real(A)))
        out.append(VertexCatalogEntry(VertexSpec(C, AngularSymmetry(LA)), "skew", "c2", "C", _real(C)))
        out.append(_quasi_global_family(p, A, "c3", "A"))
        out.append(_quasi_global_family(p, C, "c3", "C"))
        return out
    if tag == "d":
        A, L, AB = pts["A"], lines["L"], lines["AB"]
        out.append(_quasi_global_family(p, A, "d1", "A"))

        def on_tangent(X: Point):
            if not L.contains(X) or X == A:
                raise ValueError("C must lie on L away from A")
            return VertexCatalogEntry(VertexSpec(X, AngularSymmetry(AB)), "skew", "d2", "C", _real(X))

        out.append(VertexFamily("d2", "skew", "C", "point", on_tangent))
        return out
    A, L = pts["A"], lines["L"]
    out.append(_quasi_global_family(p, A, "e1", "A"))
    reg = _a_regular_member(p)

    def standard_on_tangent(X: Point):
        if not L.contains(X) or X == A:
            raise ValueError("C must lie on L away from A")
        return VertexCatalogEntry(VertexSpec(X, AngularSymmetry(reg.polar(X))), "standard", "e2", "C", _real(X))

    out.append(VertexFamily("e2", "standard", "C", "point", standard_on_tangent))
    return out


def _a_regular_member(p: Pencil) -> Conic:
    for lam in (F(0), F(1), F(-1), F(2), F(3), INF, F(-2), F(5)):
        m = p.member(lam)
        if m.is_regular():
            return m
    raise DegeneratePencil("no regular member")


def type_b_skew_point(p: Pencil, pt=None) -> Point:
    """K_AB: the harmonic conjugate of M with respect to A and B on AB."""
    pt = pt or classify_pencil(p)
    return meet(pt.lines["AB"], _a_regular_member(p).polar(pt.points["M"]))


def type_d_partner(p: Pencil, S, pt=None) -> Point:
    """The point of L on the tangent to S at B."""
    pt = pt or classify_pencil(p)
    S = _regular_member_arg(p, S)
    return meet(pt.lines["L"], tangent_line(S, pt.points["B"]))


def match_vertex(catalog: list, v: VertexSpec):
    for item in catalog:
        if isinstance(item, VertexCatalogEntry):
            try:
                if item.spec == v:
                    return item
            except IncompatibleFields:
                continue
        else:
            entry = item.match(v)
            if entry is not None:
                return entry
    return None


# ---------------------------------------------------------------- λ-action

_SAMPLE_LAMBDAS = [F(1, 3), F(-2, 5), F(3, 2), F(5, 7), F(-7, 3), F(4), F(-1, 6)]


def _regular_lambdas(p: Pencil, k: int):
    out = []
    for lam in _SAMPLE_LAMBDAS:
        if p.member(lam).is_regular():
            out.append(lam)
        if len(out) == k:
            return out
    raise DegeneratePencil("too few regular members")


def _image_parameter(p: Pencil, vm, lam):
    if not hasattr(vm, "center"):
        lam2 = p.parameter_of(transform(vm, p.member(lam)))
        if lam2 is None:
            raise PencilNotPreserved("image of a member is not in the pencil")
        return lam2
    member = p.member(lam)
    try:
        param = conic_parametrization(member, vm.center)
    except ValueError as exc:
        raise PencilNotPreserved("the center is not a base point of the pencil") from exc
    values = []
    for t in (F(1), F(2), F(-3), F(1, 2)):
        X = param(t)
        if X == vm.center:
            continue
        try:
            Y = apply_vertex_map(vm, X)
            values.append(member_through(p, Y))
        except (EvaluationOnExceptionalLine, BasePoint):
            continue
    if len(values) < 2:
        raise PencilNotPreserved("not enough sample points on the member")
    first = values[0]
    for v in values[1:]:
        if (v is INF) != (first is INF) or (v is not INF and not is_zero(v - first, 0.0 if is_exact(v) else 1e-7 * max(1.0, abs(v)))):
            raise PencilNotPreserved("member is not mapped into a single member")
    return first


def induced_lambda_involution(p: Pencil, v: VertexSpec) -> MobiusMap:
    vm = vertex_map(v)
    lams = _regular_lambdas(p, 5)
    images = [_image_parameter(p, vm, lam) for lam in lams]
    g = mobius_from_three(lams[:3], images[:3])
    for lam, img in zip(lams[3:], images[3:]):
        got = g(lam)
        if (got is INF) != (img is INF) or (got is not INF and not is_zero(got - img, 0.0 if is_exact(got) else 1e-7 * max(1.0, abs(img)))):
            raise PencilNotPreserved("action on the pencil parameter is not fractional-linear")
    return g


class _InfiniteMarker:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Infinite"


Infinite = _InfiniteMarker()

GROUP_CAP = 24


@dataclass(frozen=True)
class GroupClosure:
    elements: object

    @property
    def is_infinite(self) -> bool:
        return self.elements is Infinite

    @property
    def order(self):
        return Infinite if self.is_infinite else len(self.elements)


def group_closure(gens: list) -> GroupClosure:
    elements = [MobiusMap.identity()]
    frontier = list(elements)
    gens = [g.normalized() for g in gens if not g.is_identity()]
    while frontier:
        nxt = []
        for e in frontier:
            for g in gens:
                h = (g @ e).normalized()
                if not any(h == x for x in elements):
                    elements.append(h)
                    nxt.append(h)
                    if len(elements) > GROUP_CAP:
                        return GroupClosure(Infinite)
        frontier = nxt
    return GroupClosure(tuple(elements))


def degree_from_group(g: GroupClosure):
    return Infinite if g.is_infinite else 2 * g.order


# ---------------------------------------------------------------- validator


@dataclass
class PencilMultibilliardReport:
    is_pencil_type: bool
    violated_conditions: list
    predicted_min_degree: object
    group: GroupClosure | None = None
    pencil_type: str | None = None
    matched: list = field(default_factory=list)
    messages: list = field(default_factory=list)


def _common_pencil(mb: DualMultibilliard):
    pencil = mb.pencil
    for s in mb.curves:
        if not isinstance(s.kind, PencilDefined):
            return None, "a curve is not of pencil type"
        if pencil is None:
            pencil = s.kind.pencil
        elif not pencil.same_span(s.kind.pencil):
            return None, "curves are defined by different pencils"
        if pencil.parameter_of(s.carrier) is None:
            return None, "a curve is not a member of the pencil"
    if pencil is None:
        return None, "no pencil declared"
    return pencil, None


def validate_pencil_multibilliard(mb: DualMultibilliard) -> PencilMultibilliardReport:
    pencil, why = _common_pencil(mb)
    if pencil is None:
        return PencilMultibilliardReport(False, [1], None, messages=[why])
    pt = classify_pencil(pencil)
    catalog = admissible_vertices(pencil)
    violated, messages, matched = [], [], []
    for k, v in enumerate(mb.vertices):
        entry = match_vertex(catalog, v)
        if entry is None:
            messages.append(f"vertex[{k}] at {v.center} is not admissible")
        matched.append(entry)
    if any(e is None for e in matched):
        violated.append(2)
        return PencilMultibilliardReport(False, violated, None, None, pt.tag, matched, messages)

    skew = [e for e in matched if e.is_skew]
    quasi = [e for e in skew if isinstance(e.spec.action, DegenerateAngular)]
    if quasi and len(skew) > 1 and not _allowed_exception(pencil, pt, skew):
        violated.append(3)
        messages.append("a quasi-global skew vertex is combined with other skew vertices")
    if pt.tag == "d" and sum(1 for e in matched if e.case == "d2") > 1:
        violated.append(4)
        messages.append("more than one vertex on L away from A")
    seen = {}
    for e in skew:
        for center, spec in seen.items():
            if center == e.spec.center and spec != e.spec:
                violated.append(5)
                messages.append(f"skew vertex {e.label} carries two different structures")
                break
        seen.setdefault(e.spec.center, e.spec)
    violated = sorted(set(violated))

    gens = [induced_lambda_involution(pencil, e.spec) for e in matched]
    group = group_closure(gens)
    degree = degree_from_group(group)
    ok = not violated
    if ok and group.is_infinite:
        messages.append("group is infinite although all conditions hold")
    return PencilMultibilliardReport(ok, violated, degree if ok else (Infinite if group.is_infinite else None),
                                     group, pt.tag, matched, messages)


def _allowed_exception(pencil, pt, skew) -> bool:
    if len(skew) != 2:
        return False
    a, b = skew
    if pt.tag == "c":
        both = all(isinstance(e.spec.action, DegenerateAngular) for e in skew)
        centers = {a.label, b.label} == {"A", "C"}
        return both and centers and a.spec.action.s == b.spec.action.s
    if pt.tag == "d":
        q = next((e for e in skew if e.case == "d1"), None)
        c = next((e for e in skew if e.case == "d2"), None)
        if q is None or c is None:
            return False
        return c.spec.center == type_d_partner(pencil, q.spec.action.s, pt)
    return False


# ---------------------------------------------------------------- degree 12


@dataclass
class XiNormalization:
    """Normalized products of the base-point line functionals.

    ``products`` maps "AB*CD", "BC*AD", "AC*BD" to symmetric matrices whose
    sum is zero; ``lines`` holds the six functionals scaled consistently.
    """

    products: dict
    lines: dict
    coefficients: tuple

    def identity_residual(self):
        m = [la.flatten(q) for q in self.products.values()]
        return tuple(a + b + c for a, b, c in zip(*m))


def _sym_product(u, v):
    h = F(1, 2)
    return tuple(tuple(h * (u[i] * v[j] + u[j] * v[i]) for j in range(3)) for i in range(3))


def normalize_xi(p: Pencil) -> XiNormalization:
    pt = classify_pencil(p)
    if pt.tag != "a":
        raise NotTypeA(f"pencil has type {pt.tag}")
    st = type_a_structure(p, pt)
    keys = [("AB", "CD", "M1"), ("BC", "AD", "M2"), ("AC", "BD", "M3")]
    prods = []
    lines = dict(st["lines"])
    for e, f, mkey in keys:
        lam = next(l for l, _ in pt.singular if kernel_point(p.member(l).q) == st["points"][mkey])
        member = p.member(lam).q
        prods.append(member)
        # scale the second functional so the pair multiplies to the member
        raw = _sym_product(lines[e].xi, lines[f].xi)
        k = max(range(9), key=lambda i: abs(la.flatten(raw)[i]))
        r = la.flatten(member)[k] / la.flatten(raw)[k]
        lines[f] = Line(tuple(r * x for x in lines[f].xi))
    cols = [la.flatten(q) for q in prods]
    ns = la.nullspace([[cols[0][i], cols[1][i], cols[2][i]] for i in range(9)])
    if len(ns) != 1:
        raise DegeneratePencil("singular members do not span a plane")
    coeffs = ns[0]
    products = {}
    for (e, f, _), c, q in zip(keys, coeffs, prods):
        lines[e] = Line(tuple(c * x for x in lines[e].xi))
        products[f"{e}*{f}"] = la.scale(q, c)
    return XiNormalization(products, lines, tuple(coeffs))


DEFAULT_MU = F(2)


def check_mu(mu):
    """Reject the two values for which the ordered-pair product degenerates:
    0 (a zero factor) and 1 (the zero-sum relation makes it constant)."""
    if is_zero(mu, 0.0 if is_exact(mu) else EPS):
        raise ZeroMu("mu must be nonzero")
    if is_zero(mu - 1, 0.0 if is_exact(mu) else EPS):
        raise DegenerateMu("mu = 1 makes the product identically 1")


def ordered_pair_product(P: list, mu):
    """prod over ordered pairs i != j of (P_i + mu P_j), and (P_1 P_2 P_3)^2."""
    num = HomPoly.constant(1)
    for i in range(3):
        for j in range(3):
            if i != j:
                num = num * (P[i] + P[j] * mu)
    return num, (P[0] * P[1] * P[2]) ** 2


def ordered_pair_integral(P: list, mu) -> FactoredIntegral:
    """The ordered-pair product as a degree-12 integral in factored form."""
    check_mu(mu)
    num = [(P[i] + P[j] * mu, 1) for i in range(3) for j in range(3) if i != j]
    return FactoredIntegral(num, [(q, 2) for q in P], 12)


def degree12_integral(p: Pencil, mu=DEFAULT_MU) -> RationalIntegral:
    xi = normalize_xi(p)
    return ordered_pair_integral([HomPoly.quadratic(q) for q in xi.products.values()], mu)


def group_product_integral(p: Pencil, group: GroupClosure, mu=None) -> RationalIntegral:
    """prod over g in G of (g o F - mu), F the pencil parameter function;
    degree 2|G|."""
    if group.is_infinite:
        raise ValueError("the group is infinite")
    c0, c1 = p.c0.polynomial(), p.c1.polynomial()
    if mu is None:
        mu = _mu_off_orbit(group.elements)
    num, den = [], []
    for g in group.elements:
        # F = -c0/c1 ; g(F) - mu = ((a - mu c) (-c0) + (b - mu d) c1) / (c (-c0) + d c1)
        num.append(((-c0) * (g.a - mu * g.c) + c1 * (g.b - mu * g.d), 1))
        den.append(((-c0) * g.c + c1 * g.d, 1))
    return FactoredIntegral(num, den, 2 * len(group.elements))


def _mu_off_orbit(elements):
    orbit = {g(INF) for g in elements}
    for k in range(1, 50):
        mu = F(k, 7)
        if all(o is INF or o != mu for o in orbit):
            return mu
    raise ValueError("no admissible mu")
