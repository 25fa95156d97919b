"""SVG 1.1 drawings of billiards and orbits.  Only real loci are drawn."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .projbill import Billiard, ConicArc, Orbit, structure_base_points
from .projgeom import Point


def _f(q):
    return [[float(c) for c in row] for row in q]


def _second_point(q, s, d):
    """The other intersection of the conic with the line s + t d."""
    b = sum(q[i][j] * s[i] * d[j] for i in range(3) for j in range(3))
    a = sum(q[i][j] * d[i] * d[j] for i in range(3) for j in range(3))
    if abs(a) < 1e-14:
        return None
    t = -2 * b / a
    return (s[0] + t * d[0], s[1] + t * d[1])


def _start_of_closed(q):
    m = ((q[0][0], q[0][1]), (q[1][0], q[1][1]))
    det = m[0][0] * m[1][1] - m[0][1] ** 2
    cx = (-q[0][2] * m[1][1] + q[1][2] * m[0][1]) / det
    # restrict to the vertical line through the centre: a y^2 + b y + c = 0
    a = q[1][1]
    b = 2 * (q[0][1] * cx + q[1][2])
    c = q[0][0] * cx * cx + 2 * q[0][2] * cx + q[2][2]
    y = (-b + math.sqrt(max(b * b - 4 * a * c, 0.0))) / (2 * a)
    return (cx, y)


def arc_polyline(arc: ConicArc, samples: int = 240) -> list:
    """Runs of affine points along the arc; a run breaks at infinity."""
    q = _f(arc.conic.q)
    if arc.closed:
        s = _start_of_closed(q)
    else:
        s = tuple(float(c) for c in arc.start.chart())
    S = (s[0], s[1], 1.0)

    def angle(P):
        x, y = (float(c) for c in P.chart())
        return math.atan2(y - s[1], x - s[0]) % math.pi

    # tangent direction at s: orthogonal to the gradient
    g = [sum(q[i][j] * S[j] for j in range(3)) for i in range(2)]
    t0 = math.atan2(g[0], -g[1]) % math.pi
    if arc.closed:
        span = math.pi
    else:
        te, tv = (angle(arc.end) - t0) % math.pi, (angle(arc.via) - t0) % math.pi
        span = te if tv < te else te - math.pi
    runs, run = [], [s]
    for k in range(1, samples + 1):
        th = t0 + span * k / samples
        P = _second_point(q, S, (math.cos(th), math.sin(th), 0.0))
        if P is None or (run and math.dist(P, run[-1]) > 1e3):
            if len(run) > 1:
                runs.append(run)
            run = [] if P is None else [P]
            continue
        run.append(P)
    if not arc.closed:
        run.append(tuple(float(c) for c in arc.end.chart()))
    if len(run) > 1:
        runs.append(run)
    return runs


def _finite_chart(P):
    h = [complex(c) for c in P.h]
    if any(abs(c.imag) > 1e-12 for c in h) or abs(h[2]) < 1e-14:
        return None
    return (h[0].real / h[2].real, h[1].real / h[2].real)


def render(billiard: Billiard, orbit: Orbit | None = None, title: str = "", size: int = 600) -> str:
    shapes, pts = [], []
    for piece in billiard.pieces:
        g = piece.geometry
        if isinstance(g, ConicArc):
            for run in arc_polyline(g):
                shapes.append(("boundary", run))
                pts.extend(run)
        else:
            a, b = _finite_chart(g.start), _finite_chart(g.end)
            if a is not None and b is not None:
                shapes.append(("boundary", [a, b]))
                pts.extend([a, b])
    orbit_pts = [tuple(float(c) for c in s.position) for s in orbit.states] if orbit else []
    pts.extend(orbit_pts)
    base = [(float(bp[0]), float(bp[1])) for p in billiard.pieces for bp in structure_base_points(p)
            if p.geometry.contains(Point(float(bp[0]), float(bp[1]), 1.0))]
    if not pts:
        pts = [(0.0, 0.0)]
    xmin, xmax = min(p[0] for p in pts), max(p[0] for p in pts)
    ymin, ymax = min(p[1] for p in pts), max(p[1] for p in pts)
    span = max(xmax - xmin, ymax - ymin, 1e-9)
    pad = 0.05 * span
    xmin, ymin, span = xmin - pad, ymin - pad, span + 2 * pad
    stroke = span / 300

    def fmt(p):
        return f"{p[0]:.6g},{-p[1]:.6g}"

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="{xmin:.6g} {-(ymin + span):.6g} {span:.6g} {span:.6g}">',
        f"<title>{escape(title)}</title>",
    ]
    for cls, run in shapes:
        out.append(f'<polyline class="{cls}" fill="none" stroke="black" stroke-width="{2 * stroke:.4g}" '
                   f'points="{" ".join(fmt(p) for p in run)}"/>')
    if len(orbit_pts) > 1:
        out.append(f'<polyline class="orbit" fill="none" stroke="steelblue" stroke-width="{stroke:.4g}" '
                   f'points="{" ".join(fmt(p) for p in orbit_pts)}"/>')
    for p in base:
        out.append(f'<circle class="base-point" cx="{p[0]:.6g}" cy="{-p[1]:.6g}" r="{4 * stroke:.4g}" fill="crimson"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
