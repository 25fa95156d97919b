"""Command line interface: classify, validate, integral, simulate.

Scenes are JSON documents (see :mod:`conicbilliards.scenes`) or preset
names.  Exit status: 0 on success, 2 when a scene fails validation, 1 on
any other error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
from dataclasses import dataclass

from .conics import classify_pencil
from .dualbill import (
    DualMultibilliard,
    Exotic,
    canonical_integral,
    check_invariance,
    exotic_admissible_vertices,
    structure_vertices,
)
from .errors import GeometryError, ParseError, ValidationFailed
from .pencilint import admissible_vertices, check_mu, degree12_integral, group_product_integral
from .pencilint import validate_pencil_multibilliard
from .polynomials import FactoredIntegral, HomPoly
from .projbill import (
    AdmissibleLine,
    ExoticField,
    OrientedState,
    admissible_lines,
    degree12_billiard_integral,
    dualize,
    exotic_admissible_lines,
    integral_along,
    psi_integral,
    relative_drift,
    trace_orbit,
    validate_billiard,
)
from .scalars import format_scalar
from .scenes import Scene, load, preset, preset_names
from .svg import arc_polyline, render

EXIT_OK, EXIT_ERROR, EXIT_INVALID = 0, 1, 2


# ---------------------------------------------------------------- helpers


def _txt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    try:
        return format_scalar(x)
    except ValueError:
        return str(x)


def _point(P):
    return [_txt(c) for c in P.normalized().h]


def _line(L):
    return [_txt(c) for c in L.normalized().xi]


def open_scene(ref: str) -> Scene:
    """A scene file path, or a preset name."""
    if os.path.exists(ref):
        return load(ref)
    if ref in preset_names():
        return preset(ref)
    raise ParseError(f"no such file or preset: {ref}")


def _apply_overrides(scene: Scene, args) -> Scene:
    for key in ("backend", "eps", "delta", "mu", "steps", "seed"):
        v = getattr(args, key, None)
        if v is not None:
            setattr(scene, key, v)
    return scene


def _scene_pencil(scene: Scene):
    if scene.pencil is not None:
        return scene.pencil.pencil
    mb = scene.multibilliard if scene.multibilliard is not None else dualize(scene.billiard)
    for s in mb.curves:
        if not isinstance(s.kind, Exotic):
            return s.kind.pencil
    return None


def _exotic_kind(scene: Scene):
    if scene.billiard is not None:
        for p in scene.billiard.pieces:
            if isinstance(p.field, ExoticField):
                return p.field.kind
        return None
    for s in scene.multibilliard.curves:
        if isinstance(s.kind, Exotic):
            return s.kind.kind
    return None


# ---------------------------------------------------------------- classify


def classify(scene: Scene) -> dict:
    kind = _exotic_kind(scene)
    if kind is not None:
        return {
            "scene": scene.name,
            "structure": "exotic",
            "exotic_kind": str(kind),
            "admissible_vertices": [{"center": _point(v.spec.center), "axis": _line(v.spec.action.axis), "real": v.real}
                                    for v in exotic_admissible_vertices(kind)],
            "admissible_lines": [{"line": _line(e.line), "field": type(e.field).__name__, "real": e.real}
                                 for e in exotic_admissible_lines(kind)],
        }
    p = _scene_pencil(scene)
    if p is None:
        raise ParseError("the scene declares no pencil")
    pt = classify_pencil(p)
    dual = scene.pencil.dual if scene.pencil is not None else scene.billiard is not None
    out = {
        "scene": scene.name,
        "structure": "dual pencil" if dual else "pencil",
        "pencil_type": pt.tag,
        "multiplicities": pt.multiplicities,
        "base_points": [{"point": _point(P), "multiplicity": m, "real": r} for P, m, r in pt.real_flags()],
        "named_points": {k: _point(v) for k, v in sorted(pt.points.items())},
        "named_lines": {k: _line(v) for k, v in sorted(pt.lines.items())},
    }
    vertices = []
    for e in admissible_vertices(p):
        if hasattr(e, "spec"):
            vertices.append({"label": e.label, "flavor": e.flavor, "case": e.case, "real": e.real,
                             "center": _point(e.spec.center)})
        else:
            vertices.append({"label": e.label, "flavor": e.flavor, "case": e.case, "family": e.parameter})
    out["admissible_vertices"] = vertices
    out["vertex_counts"] = {f: sum(1 for v in vertices if v["flavor"] == f and "family" not in v)
                            for f in ("standard", "skew")}
    if dual:
        lines = scene.pencil.lines if scene.pencil is not None else None
        entries = []
        for e in admissible_lines(p, lines):
            if isinstance(e, AdmissibleLine):
                entries.append({"label": e.label, "flavor": e.flavor, "case": e.case, "real": e.real,
                                "line": _line(e.line), "field": _field_text(e.field)})
            else:
                entries.append({"label": e.label, "flavor": e.flavor, "case": e.case, "family": True})
        out["admissible_lines"] = entries
    return out


def _field_text(f) -> str:
    if hasattr(f, "focus") and not hasattr(f, "direction"):
        return "central " + " ".join(_point(f.focus))
    if hasattr(f, "direction"):
        return "parallel " + " ".join(_txt(c) for c in f.direction)
    return type(f).__name__


# ---------------------------------------------------------------- validate


@dataclass
class Validation:
    valid: bool
    kind: str
    degree: object
    violated: list
    messages: list
    group: object = None
    matched: list = None


def validate(scene: Scene) -> Validation:
    if scene.billiard is not None:
        r = validate_billiard(scene.billiard)
        d = r.dual_report
        return Validation(r.valid, r.kind, r.predicted_min_degree, r.violated_conditions, r.messages,
                          getattr(d, "group", None), getattr(d, "matched", None))
    mb = scene.multibilliard
    exotic = [s for s in mb.curves if isinstance(s.kind, Exotic)]
    if exotic:
        if len(mb.curves) > 1:
            return Validation(False, "exotic", None, [1], ["an exotic curve must be the only curve"])
        allowed = [ev.spec for ev in structure_vertices(exotic[0])]
        bad = [v for v in mb.vertices if v not in allowed]
        if bad:
            return Validation(False, "exotic", None, [2], [f"{len(bad)} vertex(es) are not admissible"])
        kind = exotic[0].kind.kind
        degree = 4 * kind.N + 4 if kind.tag == "2a2" and mb.vertices else kind.degree
        return Validation(True, "exotic", degree, [], [])
    r = validate_pencil_multibilliard(mb)
    return Validation(r.is_pencil_type, "pencil", r.predicted_min_degree, r.violated_conditions, r.messages,
                      r.group, r.matched)


def _validation_dict(scene: Scene, v: Validation) -> dict:
    return {
        "scene": scene.name,
        "valid": v.valid,
        "structure": v.kind,
        "predicted_min_degree": str(v.degree) if v.degree is not None else None,
        "expected_degree": scene.expected_degree,
        "violated_conditions": v.violated,
        "messages": v.messages,
    }


# ---------------------------------------------------------------- integral


@dataclass
class IntegralResult:
    integral: object
    route: str
    exact_multibilliard: DualMultibilliard
    parameters: dict
    cross_check: dict | None = None


def _exact_multibilliard(scene: Scene, v: Validation) -> DualMultibilliard:
    """The dual multibilliard with catalog vertices in place of the
    (possibly float) segment data of the scene."""
    if scene.multibilliard is not None:
        return scene.multibilliard
    mb = dualize(scene.billiard)
    if v.matched:
        return DualMultibilliard(mb.curves, [e.spec for e in v.matched], mb.pencil)
    return mb


def _same_function(R1, R2, samples: int = 12, seed: int = 0) -> bool:
    rng = random.Random(seed)
    ratio = None
    checked = 0
    for _ in range(samples * 5):
        h = tuple(rng.randint(-30, 30) for _ in range(3))
        n1, d1 = R1.pair(h)
        n2, d2 = R2.pair(h)
        if 0 in (n1, d1, n2, d2):
            continue
        r = (n1 * d2) / (n2 * d1)
        if ratio is None:
            ratio = r
        elif r != ratio:
            return False
        checked += 1
        if checked >= samples:
            break
    return checked > 0


def build_integral(scene: Scene, v: Validation | None = None) -> IntegralResult:
    check_mu(scene.mu)
    v = v or validate(scene)
    if not v.valid:
        raise ValidationFailed("; ".join(v.messages) or f"conditions {v.violated} violated")
    mb = _exact_multibilliard(scene, v)
    kind = _exotic_kind(scene)
    if kind is not None:
        if scene.billiard is not None:
            arc = next(p for p in scene.billiard.pieces if isinstance(p.field, ExoticField))
            R = psi_integral(arc, squared=bool(mb.vertices) or kind.tag != "2a2")
        else:
            R = canonical_integral(mb.curves[0])
            if kind.tag == "2a2" and mb.vertices:
                R = R**2
        params = {"kind": str(kind)}
        if kind.tag in ("2a1", "2a2"):
            params["c"] = [_txt(c) for c in kind.coefficients]
        return IntegralResult(R, "exotic", mb, params)
    pencil = mb.pencil or _scene_pencil(scene)
    order = v.group.order if v.group is not None else 1
    if order == 1:
        return IntegralResult(canonical_integral(mb.curves[0]), "quadratic", mb, {})
    if order == 6 and classify_pencil(pencil).tag == "a":
        R = degree12_integral(pencil, scene.mu)
        cross = None
        if scene.pencil is not None and scene.pencil.lines is not None:
            R2 = degree12_billiard_integral(*scene.pencil.lines, mu=scene.mu)
            cross = {"route": "chi", "proportional": _same_function(R, R2)}
        return IntegralResult(R, "degree-12 ordered pairs", mb, {"mu": _txt(scene.mu)}, cross)
    R = group_product_integral(pencil, v.group)
    return IntegralResult(R, "group product", mb, {})


def _poly_terms(P: HomPoly) -> list:
    return [[*mono, _txt(c)] for mono, c in sorted(P.terms.items(), reverse=True)]


def integral_artifact(scene: Scene, res: IntegralResult, report, v: Validation, degree_report: bool = False) -> dict:
    R = res.integral
    out = {
        "format": "conicbilliards-integral",
        "version": 1,
        "scene": scene.name,
        "route": res.route,
        "degree": R.degree,
        "variables": ["M1", "M2", "M3"],
        "parameters": res.parameters,
        "numerator": _poly_terms(R.num),
        "denominator": _poly_terms(R.den),
        "self_check": {
            "backend": scene.backend,
            "ok": report.ok,
            "max_deviation": _txt(report.max_deviation),
            "components": [{"name": c.name, "samples": c.samples, "failures": c.failures,
                            "max_deviation": _txt(c.max_deviation)} for c in report.components],
        },
    }
    if isinstance(R, FactoredIntegral):
        out["numerator_factors"] = [{"power": k, "terms": _poly_terms(f)} for f, k in R.num_factors]
        out["denominator_factors"] = [{"power": k, "terms": _poly_terms(f)} for f, k in R.den_factors]
    if res.cross_check is not None:
        out["cross_check"] = res.cross_check
    if degree_report:
        g = v.group
        out["degree_report"] = {
            "predicted_min_degree": str(v.degree),
            "group_order": None if g is None else str(g.order),
            "group": None if g is None or g.is_infinite else
            [[_txt(x) for x in (e.a, e.b, e.c, e.d)] for e in g.elements],
            "integral_degree": R.degree,
        }
    return out


# ---------------------------------------------------------------- simulate


def _boundary_polygon(billiard) -> list:
    poly = []
    for p in billiard.pieces:
        g = p.geometry
        if p.is_arc:
            for run in arc_polyline(g):
                poly.extend(run)
        else:
            poly.extend([tuple(float(c) for c in g.start.chart()), tuple(float(c) for c in g.end.chart())])
    return poly


def _inside(poly, x, y) -> bool:
    inside = False
    for (x1, y1), (x2, y2) in zip(poly, poly[1:] + poly[:1]):
        if (y1 > y) != (y2 > y) and x < x1 + (y - y1) * (x2 - x1) / (y2 - y1):
            inside = not inside
    return inside


def random_states(billiard, k: int, seed: int) -> list:
    """Uniform random interior positions with uniform random headings."""
    poly = _boundary_polygon(billiard)
    rng = random.Random(seed)
    xs, ys = [p[0] for p in poly], [p[1] for p in poly]
    out = []
    for _ in range(10000 * max(k, 1)):
        if len(out) >= k:
            break
        x, y = rng.uniform(min(xs), max(xs)), rng.uniform(min(ys), max(ys))
        if _inside(poly, x, y):
            th = rng.uniform(0, 2 * math.pi)
            out.append(OrientedState((x, y), (math.cos(th), math.sin(th))))
    return out


def simulate(scene: Scene, steps: int, extra_states: int = 0):
    if scene.billiard is None:
        raise ValidationFailed("simulation needs a billiard")
    states = list(scene.states) + random_states(scene.billiard, extra_states, scene.seed)
    if not states:
        raise ValidationFailed("the scene has no initial states")
    v = validate(scene)
    R = build_integral(scene, v).integral if v.valid else None
    runs = []
    for s0 in states:
        orbit = trace_orbit(scene.billiard, s0, steps, scene.eps, scene.delta)
        values = integral_along(R, orbit) if R is not None else None
        runs.append((orbit, values))
    return runs


def _run_dict(scene, orbit, values) -> dict:
    log = []
    for k, s in enumerate(orbit.states):
        entry = {"bounce": k, "position": list(s.position), "direction": list(s.direction)}
        if k:
            entry["piece"] = scene.billiard.pieces[orbit.pieces[k - 1]].name or orbit.pieces[k - 1]
        if values is not None:
            entry["psi"] = float(values[k])
        log.append(entry)
    return {
        "bounces": orbit.bounces,
        "event": orbit.event,
        "detail": orbit.detail,
        "relative_drift": relative_drift(values) if values else None,
        "states": log,
    }


# ---------------------------------------------------------------- main


def _emit(data: dict, as_json: bool, text_lines: list, out=None):
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
    else:
        out.write("\n".join(text_lines) + "\n")


def _classify_text(r: dict) -> list:
    lines = [f"scene: {r['scene']}", f"structure: {r['structure']}"]
    if r["structure"] == "exotic":
        lines.append(f"exotic kind: {r['exotic_kind']}")
        for e in r["admissible_lines"]:
            lines.append(f"  admissible line {' '.join(e['line'])} ({e['field']}){'' if e['real'] else ' complex'}")
        return lines
    lines.append(f"pencil type: {r['pencil_type']}  multiplicities {r['multiplicities']}")
    for b in r["base_points"]:
        lines.append(f"  base point [{' '.join(b['point'])}] x{b['multiplicity']}{'' if b['real'] else ' (complex)'}")
    c = r["vertex_counts"]
    lines.append(f"admissible vertices: {c['standard']} standard, {c['skew']} skew")
    for e in r["admissible_vertices"]:
        tail = "family" if "family" in e else ("real" if e["real"] else "complex")
        lines.append(f"  {e['label']:6s} {e['flavor']:8s} {e['case']:3s} {tail}")
    if "admissible_lines" in r:
        lines.append("admissible lines:")
        for e in r["admissible_lines"]:
            if "family" in e:
                lines.append(f"  {e['label']:6s} {e['flavor']:8s} family")
            else:
                lines.append(f"  {e['label']:6s} {e['flavor']:8s} [{' '.join(e['line'])}] {e['field']}"
                             f"{'' if e['real'] else ' (complex)'}")
    return lines


def cmd_classify(args) -> int:
    scene = _apply_overrides(open_scene(args.scene), args)
    r = classify(scene)
    _emit(r, args.json, _classify_text(r))
    return EXIT_OK


def cmd_validate(args) -> int:
    scene = _apply_overrides(open_scene(args.scene), args)
    v = validate(scene)
    r = _validation_dict(scene, v)
    text = [f"scene: {scene.name}", f"valid: {'yes' if v.valid else 'no'} ({v.kind})",
            f"predicted minimal degree: {r['predicted_min_degree']}"]
    if v.violated:
        text.append(f"violated conditions: {v.violated}")
    text.extend(f"  {m}" for m in v.messages)
    _emit(r, args.json, text)
    return EXIT_OK if v.valid else EXIT_INVALID


def cmd_integral(args) -> int:
    scene = _apply_overrides(open_scene(args.scene), args)
    v = validate(scene)
    res = build_integral(scene, v)
    report = check_invariance(res.integral, res.exact_multibilliard, samples=args.samples, seed=scene.seed,
                              backend=scene.backend, eps=scene.eps)
    art = integral_artifact(scene, res, report, v, args.degree_report)
    text = json.dumps(art, indent=2, sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    summary = [f"integral of degree {res.integral.degree} ({res.route})"]
    for k, c in res.parameters.items():
        summary.append(f"  {k} = {c}")
    if res.cross_check:
        summary.append(f"  cross-check with the {res.cross_check['route']} route: "
                       f"{'proportional' if res.cross_check['proportional'] else 'MISMATCH'}")
    summary.append(report.summary())
    summary.append(f"max deviation: {_txt(report.max_deviation)}")
    sys.stderr.write("\n".join(summary) + "\n")
    return EXIT_OK if report.ok and (res.cross_check is None or res.cross_check["proportional"]) else EXIT_ERROR


def cmd_simulate(args) -> int:
    scene = _apply_overrides(open_scene(args.scene), args)
    runs = simulate(scene, scene.steps, args.random_states)
    data = {"scene": scene.name, "steps": scene.steps, "runs": [_run_dict(scene, o, vals) for o, vals in runs]}
    if args.json:
        sys.stdout.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
    else:
        for k, (o, vals) in enumerate(runs):
            print(f"orbit {k}: {o.bounces} bounces, event {o.event or 'none'}{': ' + o.detail if o.detail else ''}")
            for j, s in enumerate(o.states):
                psi = f"  psi={float(vals[j]):.15g}" if vals is not None else ""
                print(f"  {j:4d} ({s.position[0]:.12g}, {s.position[1]:.12g}) "
                      f"dir ({s.direction[0]:.12g}, {s.direction[1]:.12g}){psi}")
            if vals:
                print(f"  relative drift of psi: {relative_drift(vals):.3g}")
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(render(scene.billiard, runs[0][0] if runs else None, scene.name))
    return EXIT_OK


def cmd_presets(args) -> int:
    from .scenes import dumps

    if args.name:
        text = dumps(preset(args.name))
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        print("\n".join(preset_names()))
    return EXIT_OK


def _positive(x: str) -> float:
    v = float(x)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _scalar(x: str):
    from .scalars import parse_scalar

    try:
        return parse_scalar(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("scene", help="scene file (JSON) or preset name")
    common.add_argument("--backend", choices=("rational", "float"))
    common.add_argument("--eps", type=_positive, help="incidence tolerance of the float backend")
    common.add_argument("--delta", type=_positive, help="distance at which corners and base points stop an orbit")
    common.add_argument("--mu", type=_scalar, help="parameter of the degree-12 integral (exact, e.g. 3/2)")
    common.add_argument("--seed", type=int)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    ap = argparse.ArgumentParser(prog="conicbilliards", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="pencil type, base data, admissible catalogs").set_defaults(
        func=cmd_classify)
    sub.add_parser("validate", parents=[common], help="validity and predicted minimal degree").set_defaults(
        func=cmd_validate)
    p = sub.add_parser("integral", parents=[common], help="construct and check a rational integral")
    p.add_argument("--degree-report", action="store_true")
    p.add_argument("--samples", type=int, default=100, help="invariance samples per curve and vertex")
    p.add_argument("-o", "--output", help="write the integral artifact here instead of stdout")
    p.set_defaults(func=cmd_integral)
    p = sub.add_parser("simulate", parents=[common], help="trace orbits and log the integral")
    p.add_argument("--steps", type=int)
    p.add_argument("--svg", help="write an SVG drawing of the first orbit")
    p.add_argument("--random-states", type=int, default=0, help="add this many random interior states")
    p.set_defaults(func=cmd_simulate)
    p = sub.add_parser("presets", help="list presets, or print one as a scene file")
    p.add_argument("name", nargs="?", choices=preset_names())
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_presets)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationFailed as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (GeometryError, ValueError, ZeroDivisionError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
