"""Fixed points and dynamics of single projective transformations."""
from fractions import Fraction

from app.boundary.points import BoundaryPoint, angle_lt
from app.boundary.surds import Number, QuadraticSurd, sign
from app.group.exceptions import FixedPointError
from app.group.matrices import Matrix2, TransformationType, classify


def fixed_points(matrix: Matrix2) -> tuple[BoundaryPoint, ...]:
    """Fixed points on RP¹, exact in ℚ or ℚ(√Δ) with Δ = tr² − 4·det.

    Elliptic matrices have none; the identity is rejected.
    """
    if matrix.is_scalar():
        raise FixedPointError("The identity fixes every point")
    a, b, c, d = matrix.entries
    points: list[BoundaryPoint] = []
    if c == 0:
        points.append(BoundaryPoint(1, 0))
        if a != d:
            points.append(BoundaryPoint.from_coords(b, d - a))
    else:
        discriminant = (d - a) ** 2 + 4 * b * c
        if discriminant < 0:
            return ()
        root = QuadraticSurd.sqrt(discriminant)
        for branch in (1, -1) if discriminant > 0 else (1,):
            u = (Fraction(a - d) + branch * root) / (2 * c)
            points.append(BoundaryPoint.from_coords(u, 1))
    points.sort(key=lambda p: sum(angle_lt(q, p) for q in points))
    return tuple(points)


def eigenvalue_at(matrix: Matrix2, point: BoundaryPoint) -> Number:
    """Eigenvalue of ``matrix`` on the line ``point`` (which must be fixed)."""
    if sign(point.y) == 0:
        return matrix.a
    u = point.x / point.y
    return matrix.c * u + matrix.d


def attracting_repelling(matrix: Matrix2) -> tuple[BoundaryPoint, BoundaryPoint]:
    """(attracting, repelling) fixed points of a hyperbolic matrix under forward iteration."""
    if classify(matrix) != TransformationType.HYPERBOLIC:
        raise FixedPointError(f"Matrix {matrix.rows()} is not hyperbolic")
    first, second = fixed_points(matrix)
    l1, l2 = eigenvalue_at(matrix, first), eigenvalue_at(matrix, second)
    if sign(l1 * l1 - l2 * l2) > 0:
        return first, second
    return second, first
