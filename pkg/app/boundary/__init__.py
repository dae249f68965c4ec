"""Boundary model: the projective line with the chordal metric."""
from app.boundary.exceptions import (
    BoundaryError,
    PointFormatError,
    ArcError,
    TailCertificationError,
)
from app.boundary.surds import QuadraticSurd, sqrt_lower, sqrt_upper
from app.boundary.points import (
    BoundaryPoint,
    act,
    chordal_dist,
    chordal_dist_sq,
    mobius_from_triples,
)
from app.boundary.arcs import Arc, ArcIndex, covers, first_gap, hull_within
from app.boundary.tails import SymbolicUnion, TailCertificate, certify_tail

__all__ = [
    "BoundaryError",
    "PointFormatError",
    "ArcError",
    "TailCertificationError",
    "QuadraticSurd",
    "sqrt_lower",
    "sqrt_upper",
    "BoundaryPoint",
    "act",
    "chordal_dist",
    "chordal_dist_sq",
    "mobius_from_triples",
    "Arc",
    "ArcIndex",
    "covers",
    "first_gap",
    "hull_within",
    "SymbolicUnion",
    "TailCertificate",
    "certify_tail",
]
