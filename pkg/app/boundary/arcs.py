"""Arcs of the projective line and the predicates the cover conditions need."""
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence, TYPE_CHECKING

import numpy as np

from app.boundary.exceptions import ArcError
from app.boundary.points import (
    BoundaryPoint,
    act,
    angle_lt,
    ccw_before,
    chordal_dist_sq,
    rotation,
    strictly_between,
)
from app.boundary.surds import Number, sign

if TYPE_CHECKING:
    from app.group.matrices import Matrix2


# Global float margin for prefilters; every decision is re-checked exactly.
TAU = 1e-12
_PREFILTER_MARGIN = 1e-9
_MAX_DENOMINATOR = 10**8


class ArcKind(str, enum.Enum):
    PROPER = "proper"
    POINT = "point"
    FULL = "full"


@lru_cache(maxsize=4096)
def rational_tan(radius: Fraction, outward: bool) -> Fraction:
    """Rational s ≥ 0 whose rotation angle atan(s) bounds asin(radius).

    ``outward`` gives atan(s) ≥ asin(radius); otherwise atan(s) ≤ asin(radius).
    Both are decided exactly through s²(1 − r²) against r².
    """
    if not 0 < radius < 1:
        raise ArcError(f"Radius {radius} outside (0, 1)")
    r2 = radius * radius
    target = float(radius) / math.sqrt(1.0 - float(r2))
    s = Fraction(target).limit_denominator(_MAX_DENOMINATOR)
    step = Fraction(1, _MAX_DENOMINATOR)

    def admissible(value: Fraction) -> bool:
        lhs = value * value * (1 - r2)
        return lhs >= r2 if outward else lhs <= r2

    while not admissible(s):
        s = s + step if outward else s - step
    if s < 0:
        raise ArcError(f"Radius {radius} too small for rational rotation")
    return s


@dataclass(frozen=True)
class Arc:
    """Counterclockwise arc from ``start`` to ``end``.

    PROPER arcs with start == end are the circle minus that point. POINT arcs
    are a single closed point and FULL is the whole circle.
    """

    start: Optional[BoundaryPoint] = None
    end: Optional[BoundaryPoint] = None
    start_closed: bool = False
    end_closed: bool = False
    kind: ArcKind = ArcKind.PROPER

    # construction -------------------------------------------------------

    @classmethod
    def make(
        cls,
        start: BoundaryPoint,
        end: BoundaryPoint,
        start_closed: bool = False,
        end_closed: bool = False,
    ) -> "Arc":
        if start == end and (start_closed or end_closed):
            return cls.full()
        return cls(start, end, start_closed, end_closed, ArcKind.PROPER)

    @classmethod
    def open(cls, start: BoundaryPoint, end: BoundaryPoint) -> "Arc":
        return cls.make(start, end)

    @classmethod
    def closed(cls, start: BoundaryPoint, end: BoundaryPoint) -> "Arc":
        return cls.make(start, end, True, True)

    @classmethod
    def point(cls, p: BoundaryPoint) -> "Arc":
        return cls(p, p, True, True, ArcKind.POINT)

    @classmethod
    def full(cls) -> "Arc":
        return cls(None, None, True, True, ArcKind.FULL)

    @classmethod
    def ball(cls, center: BoundaryPoint, radius: Fraction, outward: bool = False) -> "Arc":
        """Open chordal ball B_r(center); ``outward`` rounds to a superset."""
        return cls.point(center).neighborhood(radius, outward=outward)

    @classmethod
    def closed_ball(
        cls, center: BoundaryPoint, radius: Fraction, outward: bool = True
    ) -> "Arc":
        return cls.point(center).neighborhood(radius, outward=outward, closed=True)

    # basic predicates ---------------------------------------------------

    @property
    def is_full(self) -> bool:
        return self.kind == ArcKind.FULL

    @property
    def is_point(self) -> bool:
        return self.kind == ArcKind.POINT

    @property
    def is_punctured(self) -> bool:
        return self.kind == ArcKind.PROPER and self.start == self.end

    def contains(self, p: BoundaryPoint) -> bool:
        if self.is_full:
            return True
        if self.is_point:
            return p == self.start
        if p == self.start:
            return self.start_closed
        if p == self.end:
            return self.end_closed
        if self.is_punctured:
            return True
        return strictly_between(self.start, p, self.end)

    def germ_after(self, p: BoundaryPoint) -> bool:
        """Points just counterclockwise of p belong to the arc."""
        if self.is_full:
            return True
        if self.is_point:
            return False
        if p == self.start:
            return True
        if p == self.end:
            return self.is_punctured
        return self.is_punctured or strictly_between(self.start, p, self.end)

    def germ_before(self, p: BoundaryPoint) -> bool:
        """Points just clockwise of p belong to the arc."""
        if self.is_full:
            return True
        if self.is_point:
            return False
        if p == self.end:
            return True
        if p == self.start:
            return self.is_punctured
        return self.is_punctured or strictly_between(self.start, p, self.end)

    def closure(self) -> "Arc":
        if self.kind != ArcKind.PROPER:
            return self
        return Arc.make(self.start, self.end, True, True)

    def interior(self) -> "Arc":
        if self.kind != ArcKind.PROPER:
            return self
        return Arc(self.start, self.end, False, False, ArcKind.PROPER)

    def complement(self) -> Optional["Arc"]:
        """Complementary arc, or None for the full circle."""
        if self.is_full:
            return None
        if self.is_point:
            return Arc(self.start, self.start, False, False, ArcKind.PROPER)
        if self.is_punctured:
            return Arc.point(self.start)
        return Arc(self.end, self.start, not self.end_closed, not self.start_closed)

    def intersects(self, other: "Arc") -> bool:
        if self.is_full or other.is_full:
            return True
        if self.is_point:
            return other.contains(self.start)
        if other.is_point:
            return self.contains(other.start)
        if self.start_closed and other.contains(self.start):
            return True
        if other.start_closed and self.contains(other.start):
            return True
        return other.germ_after(self.start) or self.germ_after(other.start)

    def contains_arc(self, other: "Arc") -> bool:
        """other ⊂ self."""
        outside = self.complement()
        if outside is None:
            return True
        return not outside.intersects(other)

    # metric ---------------------------------------------------------------

    def diameter_sq(self) -> Number:
        """Squared chordal diameter: 1 once the arc spans a quarter turn."""
        if self.is_full or self.is_punctured:
            return Fraction(1)
        if self.is_point:
            return Fraction(0)
        if self.closure().contains(self.start.perpendicular()):
            return Fraction(1)
        return chordal_dist_sq(self.start, self.end)

    def distance_sq_to(self, p: BoundaryPoint) -> Number:
        """Squared chordal distance from p to the arc (attained at an endpoint)."""
        if self.closure().contains(p):
            return Fraction(0)
        return min_exact((chordal_dist_sq(p, self.start), chordal_dist_sq(p, self.end)))

    def gap_sq(self, other: "Arc") -> Number:
        """Squared chordal distance between two arcs."""
        if self.closure().intersects(other.closure()):
            return Fraction(0)
        values = [
            chordal_dist_sq(u, v)
            for u in (self.start, self.end)
            for v in (other.start, other.end)
        ]
        return min_exact(values)

    # transformations ------------------------------------------------------

    def image(self, matrix: "Matrix2") -> "Arc":
        """Image under a projective map; det < 0 reverses orientation."""
        if self.is_full:
            return self
        if self.is_point:
            return Arc.point(act(matrix, self.start))
        start, end = act(matrix, self.start), act(matrix, self.end)
        if matrix.det > 0:
            return Arc(start, end, self.start_closed, self.end_closed, ArcKind.PROPER)
        return Arc(end, start, self.end_closed, self.start_closed, ArcKind.PROPER)

    def neighborhood(
        self, radius: Fraction, outward: bool = True, closed: bool = False
    ) -> "Arc":
        """N_r (or N̄_r when ``closed``) with certified rounding direction."""
        if self.is_full or self.is_punctured:
            return Arc.full()
        radius = Fraction(radius)
        if radius <= 0:
            return self
        if radius >= 1:
            return Arc.full()
        s = rational_tan(radius, outward)
        forward = rotation(s)
        backward = rotation(-s)
        new_start = act(backward, self.start)
        new_end = act(forward, self.end)
        if not self.is_point:
            # the gap end → start closes once it is no longer than twice the angle
            reach = act(forward, new_end)
            if self.start == self.end or not ccw_before(self.end, reach, self.start):
                return Arc.full()
        return Arc(new_start, new_end, closed, closed, ArcKind.PROPER)

    # helpers --------------------------------------------------------------

    def interior_point(self) -> BoundaryPoint:
        """Some point of the arc, strictly inside when the arc is proper."""
        if self.is_full:
            return BoundaryPoint(1, 0)
        if self.is_point:
            return self.start
        if self.is_punctured:
            return self.start.perpendicular()
        s, e = self.start, self.end
        if angle_lt(s, e):
            return BoundaryPoint.from_coords(s.x + e.x, s.y + e.y)
        return BoundaryPoint.from_coords(s.x - e.x, s.y - e.y)

    @property
    def start_angle(self) -> float:
        return 0.0 if self.is_full else self.start.angle

    @property
    def angular_length(self) -> float:
        if self.is_full or self.is_punctured:
            return math.pi
        if self.is_point:
            return 0.0
        return (self.end.angle - self.start.angle) % math.pi

    def to_dict(self) -> dict:
        if self.is_full:
            return {"kind": "full"}
        return {
            "kind": self.kind.value,
            "start": str(self.start),
            "end": str(self.end),
            "start_closed": self.start_closed,
            "end_closed": self.end_closed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Arc":
        kind = ArcKind(data["kind"])
        if kind == ArcKind.FULL:
            return cls.full()
        start = BoundaryPoint.parse(data["start"])
        if kind == ArcKind.POINT:
            return cls.point(start)
        return cls(
            start,
            BoundaryPoint.parse(data["end"]),
            bool(data["start_closed"]),
            bool(data["end_closed"]),
            ArcKind.PROPER,
        )

    def __str__(self) -> str:
        if self.is_full:
            return "S¹"
        if self.is_point:
            return f"{{{self.start}}}"
        left = "[" if self.start_closed else "("
        right = "]" if self.end_closed else ")"
        return f"{left}{self.start}, {self.end}{right}"


def min_exact(values: Iterable[Number]) -> Number:
    """Exact minimum of rational or surd values."""
    best = None
    for value in values:
        if best is None or sign(value - best) < 0:
            best = value
    return best


class ArcIndex:
    """Float interval index over arcs used to shortlist exact tests."""

    def __init__(self, arcs: Sequence[Arc]):
        self.arcs = list(arcs)
        self.starts = np.array([arc.start_angle for arc in self.arcs], dtype=float)
        self.lengths = np.array([arc.angular_length for arc in self.arcs], dtype=float)

    def candidates(self, p: BoundaryPoint) -> list[int]:
        """Indices of arcs that may contain p (or a germ next to it)."""
        if not self.arcs:
            return []
        offset = np.mod(p.angle - self.starts, math.pi)
        mask = (offset <= self.lengths + _PREFILTER_MARGIN) | (
            offset >= math.pi - _PREFILTER_MARGIN
        )
        return np.flatnonzero(mask).tolist()

    def containing(self, p: BoundaryPoint) -> list[int]:
        return [i for i in self.candidates(p) if self.arcs[i].contains(p)]


def first_gap(arcs: Sequence[Arc]) -> Optional[tuple[BoundaryPoint, str]]:
    """Return an uncovered witness (point, where) or None if the arcs cover S¹.

    ``where`` is "at", "after" or "before": the uncovered set touches the
    point itself or the germ on that side of it.
    """
    if any(arc.is_full for arc in arcs):
        return None
    endpoints = [arc.start for arc in arcs] + [arc.end for arc in arcs]
    if not endpoints:
        return BoundaryPoint(1, 0), "at"
    index = ArcIndex(arcs)
    for p in endpoints:
        shortlist = [arcs[i] for i in index.candidates(p)]
        if not any(arc.contains(p) for arc in shortlist):
            return p, "at"
        if not any(arc.germ_after(p) for arc in shortlist):
            return p, "after"
        if not any(arc.germ_before(p) for arc in shortlist):
            return p, "before"
    return None


def covers(arcs: Sequence[Arc]) -> bool:
    return first_gap(arcs) is None


def hull_within(container: Arc, pieces: Sequence[Arc]) -> Arc:
    """Smallest closed arc inside ``container`` holding every piece.

    Pieces are ordered counterclockwise from the container's start, so the
    hull is the span from the earliest start to the latest end.
    """
    if container.is_full or container.is_point:
        raise ArcError(f"Cannot order pieces inside {container}")
    if not pieces:
        raise ArcError("Hull of no pieces")
    for piece in pieces:
        if piece.is_full or not container.contains_arc(piece):
            raise ArcError(f"Piece {piece} is not inside {container}")
    base = container.start
    first, last = pieces[0], pieces[0]
    for piece in pieces[1:]:
        if ccw_before(base, piece.start, first.start):
            first = piece
        if ccw_before(base, last.end, piece.end):
            last = piece
    if first.start == last.end:
        return Arc.point(first.start)
    return Arc.closed(first.start, last.end)
