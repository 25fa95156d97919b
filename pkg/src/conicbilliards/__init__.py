"""Projective billiards, dual billiards on conics, and their rational integrals."""

from .conics import Conic, DualPencil, Pencil, classify_pencil, pencil_through_points
from .dualbill import (
    DualBilliardStructure,
    DualMultibilliard,
    Exotic,
    ExoticKind,
    PencilDefined,
    VertexSpec,
    canonical_integral,
    check_invariance,
    tangent_involution,
)
from .pencilint import (
    admissible_vertices,
    degree12_integral,
    group_product_integral,
    validate_pencil_multibilliard,
)
from .polynomials import HomPoly, RationalIntegral
from .projbill import (
    Billiard,
    BoundaryPiece,
    ConicArc,
    OrientedState,
    Segment,
    admissible_lines,
    chi_coefficients,
    dualize,
    psi_integral,
    reflect,
    trace_orbit,
    validate_billiard,
)
from .projgeom import INF, Line, MobiusMap, Point, ProjMap, cross_ratio, join, meet
from .scenes import Scene, preset

__all__ = [
    "Billiard",
    "BoundaryPiece",
    "Conic",
    "ConicArc",
    "DualBilliardStructure",
    "DualMultibilliard",
    "DualPencil",
    "Exotic",
    "ExoticKind",
    "HomPoly",
    "INF",
    "Line",
    "MobiusMap",
    "OrientedState",
    "Pencil",
    "PencilDefined",
    "Point",
    "ProjMap",
    "RationalIntegral",
    "Scene",
    "Segment",
    "VertexSpec",
    "admissible_lines",
    "admissible_vertices",
    "canonical_integral",
    "check_invariance",
    "chi_coefficients",
    "classify_pencil",
    "cross_ratio",
    "degree12_integral",
    "dualize",
    "group_product_integral",
    "join",
    "meet",
    "pencil_through_points",
    "preset",
    "psi_integral",
    "reflect",
    "tangent_involution",
    "trace_orbit",
    "validate_billiard",
    "validate_pencil_multibilliard",
]
