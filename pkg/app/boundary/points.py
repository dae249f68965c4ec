"""Points of the projective line RP¹ with exact homogeneous coordinates.

The circle is parameterized by the angle θ ∈ [0, π) of the line through
(cos θ, sin θ); counterclockwise means increasing θ. Rational points are kept
as coprime integers with y > 0 (or y = 0, x > 0); irrational points are kept
as (u : 1) with u a QuadraticSurd.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import TYPE_CHECKING, Union

from app.boundary.exceptions import PointFormatError
from app.boundary.surds import Number, QuadraticSurd, sign

if TYPE_CHECKING:
    from app.group.matrices import Matrix2


Coordinate = Union[int, QuadraticSurd]

# Integers longer than this are shifted before float conversion.
_FLOAT_BITS = 900


def _to_float_pair(x: Coordinate, y: Coordinate) -> tuple[float, float]:
    if isinstance(x, int) and isinstance(y, int):
        shift = max(x.bit_length(), y.bit_length()) - _FLOAT_BITS
        if shift > 0:
            x >>= shift
            y >>= shift
    return float(x), float(y)


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """A point (x : y) of the projective line in canonical form."""

    x: Coordinate
    y: Coordinate

    @classmethod
    def from_coords(cls, x: Number, y: Number) -> "BoundaryPoint":
        """Canonical point for homogeneous coordinates (x, y) ≠ (0, 0)."""
        if isinstance(x, QuadraticSurd) or isinstance(y, QuadraticSurd):
            if sign(y) == 0:
                return cls(1, 0)
            u = x / y
            if isinstance(u, QuadraticSurd):
                return cls(u, 1)
            u = Fraction(u)
            return cls._from_ints(u.numerator, u.denominator)

        fx, fy = Fraction(x), Fraction(y)
        scale = fx.denominator * fy.denominator // math.gcd(fx.denominator, fy.denominator)
        return cls._from_ints(int(fx * scale), int(fy * scale))

    @classmethod
    def _from_ints(cls, x: int, y: int) -> "BoundaryPoint":
        if x == 0 and y == 0:
            raise PointFormatError("(0:0) is not a point of the projective line")
        g = math.gcd(x, y)
        x, y = x // g, y // g
        if y < 0 or (y == 0 and x < 0):
            x, y = -x, -y
        return cls(x, y)

    @classmethod
    def from_slope(cls, w: Number) -> "BoundaryPoint":
        """The point (1 : w)."""
        return cls.from_coords(1, w)

    @classmethod
    def parse(cls, text: str) -> "BoundaryPoint":
        """Parse ``"x:y"`` with rational entries such as ``"1/2:-3"``."""
        try:
            left, right = text.split(":")
            return cls.from_coords(Fraction(left.strip()), Fraction(right.strip()))
        except (ValueError, ZeroDivisionError) as e:
            raise PointFormatError(f"Cannot parse point '{text}'") from e

    @property
    def is_rational(self) -> bool:
        return isinstance(self.x, int) and isinstance(self.y, int)

    @cached_property
    def angle(self) -> float:
        """Angle θ ∈ [0, π) of the line, as a float."""
        fx, fy = _to_float_pair(self.x, self.y)
        return math.atan2(fy, fx) % math.pi

    @cached_property
    def norm_sq(self) -> Number:
        return self.x * self.x + self.y * self.y

    def perpendicular(self) -> "BoundaryPoint":
        """The point at angle θ + π/2."""
        return BoundaryPoint.from_coords(-self.y, self.x)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BoundaryPoint):
            return NotImplemented
        if self.is_rational and other.is_rational:
            return self.x == other.x and self.y == other.y
        return sign(cross(self, other)) == 0

    def __hash__(self) -> int:
        return hash((self.x, self.y))

    def __str__(self) -> str:
        return f"{self.x}:{self.y}"

    def __repr__(self) -> str:
        return f"BoundaryPoint({self})"


def cross(p: BoundaryPoint, q: BoundaryPoint) -> Number:
    return p.x * q.y - q.x * p.y


def angle_lt(p: BoundaryPoint, q: BoundaryPoint) -> bool:
    """θ(p) < θ(q) on canonical representatives."""
    return sign(cross(p, q)) > 0


def ccw_before(base: BoundaryPoint, p: BoundaryPoint, q: BoundaryPoint) -> bool:
    """Going counterclockwise from ``base``, is p met strictly before q?"""
    lap_p = angle_lt(p, base)
    lap_q = angle_lt(q, base)
    if lap_p != lap_q:
        return not lap_p
    return angle_lt(p, q)


def strictly_between(start: BoundaryPoint, p: BoundaryPoint, end: BoundaryPoint) -> bool:
    """p lies on the open counterclockwise arc from start to end (start ≠ end)."""
    if p == start or p == end:
        return False
    return ccw_before(start, p, end)


def chordal_dist_sq(p: BoundaryPoint, q: BoundaryPoint) -> Number:
    """Squared chordal distance |sin(θp − θq)|², exact."""
    c = cross(p, q)
    if p.is_rational and q.is_rational:
        return Fraction(c * c, p.norm_sq * q.norm_sq)
    return (c * c) / (p.norm_sq * q.norm_sq)


def chordal_dist(p: BoundaryPoint, q: BoundaryPoint) -> float:
    return abs(math.sin(p.angle - q.angle))


@lru_cache(maxsize=65536)
def _integer_entries(matrix: "Matrix2") -> tuple[int, int, int, int]:
    entries = matrix.entries
    scale = 1
    for value in entries:
        scale = scale * value.denominator // math.gcd(scale, value.denominator)
    return tuple(int(v * scale) for v in entries)


def act(matrix: "Matrix2", point: BoundaryPoint) -> BoundaryPoint:
    """Projective action (x : y) ↦ (ax + by : cx + dy), exact."""
    if point.is_rational:
        a, b, c, d = _integer_entries(matrix)
        return BoundaryPoint._from_ints(a * point.x + b * point.y, c * point.x + d * point.y)
    return BoundaryPoint.from_coords(
        matrix.a * point.x + matrix.b * point.y,
        matrix.c * point.x + matrix.d * point.y,
    )


def rotation(s: Fraction) -> "Matrix2":
    """Rotation by atan(s) counterclockwise, scaled to rational entries."""
    from app.group.matrices import Matrix2

    return Matrix2(Fraction(1), -Fraction(s), Fraction(s), Fraction(1))


def mobius_from_triples(
    source: tuple[BoundaryPoint, BoundaryPoint, BoundaryPoint],
    target: tuple[BoundaryPoint, BoundaryPoint, BoundaryPoint],
) -> "Matrix2":
    """The projective map sending each source point to the matching target."""
    return _frame(*target) @ _frame(*source).inverse()


def _frame(p1: BoundaryPoint, p2: BoundaryPoint, p3: BoundaryPoint) -> "Matrix2":
    """Matrix sending (1:0), (0:1), (1:1) to p1, p2, p3."""
    from app.group.matrices import Matrix2

    det = cross(p1, p2)
    if sign(det) == 0:
        raise PointFormatError(f"Frame points {p1} and {p2} coincide")
    lam = Fraction(p3.x * p2.y - p2.x * p3.y, det)
    mu = Fraction(p1.x * p3.y - p3.x * p1.y, det)
    return Matrix2(lam * p1.x, mu * p2.x, lam * p1.y, mu * p2.y)
