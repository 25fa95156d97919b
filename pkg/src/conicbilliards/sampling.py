"""Seeded random generators for exact test data."""

from __future__ import annotations

import random
from fractions import Fraction

from . import linalg as la
from .conics import Conic, Pencil, conic_through, pencil_through_points, tangent_line
from .projgeom import Point, ProjMap, collinear, join

PENCIL_TYPES = ("a", "b", "c", "d", "e")


def random_rational(rng: random.Random, height: int = 9) -> Fraction:
    return Fraction(rng.randint(-height, height), rng.randint(1, height))


def random_nonzero_rational(rng: random.Random, height: int = 9) -> Fraction:
    while True:
        x = random_rational(rng, height)
        if x != 0:
            return x


def random_point(rng: random.Random, height: int = 9) -> Point:
    return Point(random_rational(rng, height), random_rational(rng, height), Fraction(1))


def random_projmap(rng: random.Random, height: int = 5) -> ProjMap:
    while True:
        m = tuple(tuple(Fraction(rng.randint(-height, height)) for _ in range(3)) for _ in range(3))
        if la.det3(m) != 0:
            return ProjMap(m)


def points_in_general_position(rng: random.Random, k: int, height: int = 9) -> list:
    while True:
        pts = [random_point(rng, height) for _ in range(k)]
        if len(set(pts)) < k:
            continue
        if any(collinear(pts[i], pts[j], pts[l])
               for i in range(k) for j in range(i + 1, k) for l in range(j + 1, k)):
            continue
        return pts


def random_regular_conic(rng: random.Random, height: int = 9):
    """A regular conic through five random points; returns (conic, points)."""
    while True:
        pts = points_in_general_position(rng, 5, height)
        c = conic_through(pts)
        if c.is_regular():
            return c, pts


def random_pencil(rng: random.Random, tag: str) -> Pencil:
    """A random pencil of the given type with rational base points."""
    if tag == "a":
        return pencil_through_points(*points_in_general_position(rng, 4))
    if tag == "b":
        A, B, C, X = points_in_general_position(rng, 4)
        L = join(C, X)
        return Pencil(Conic.line_pair(join(A, B), L), Conic.line_pair(join(C, A), join(C, B)))
    if tag == "c":
        A, C, X, Y = points_in_general_position(rng, 4)
        return Pencil(Conic.double_line(join(A, C)), Conic.line_pair(join(A, X), join(C, Y)))
    S, pts = random_regular_conic(rng)
    A, B = pts[0], pts[1]
    L = tangent_line(S, A)
    if tag == "d":
        return Pencil(S, Conic.line_pair(L, join(A, B)))
    if tag == "e":
        return Pencil(S, Conic.double_line(L))
    raise ValueError(f"unknown pencil type {tag!r}")
