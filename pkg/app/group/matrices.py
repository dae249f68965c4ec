"""Exact 2×2 rational matrices acting projectively."""
import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from app.group.exceptions import NotInvertibleError


def to_fraction(value: int | str | Fraction) -> Fraction:
    """Parse ``3``, ``"-1/6"`` or a Fraction into a Fraction."""
    if isinstance(value, Fraction):
        return value
    return Fraction(str(value).strip())


def format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class TransformationType(str, enum.Enum):
    """Conjugacy type of a projective transformation."""
    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True, eq=False)
class Matrix2:
    """Matrix [[a, b], [c, d]] considered up to a nonzero scalar.

    Equality and hashing are projective; ``entries`` keeps the raw values.
    """

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int | str | Fraction]]) -> "Matrix2":
        (a, b), (c, d) = ([to_fraction(v) for v in row] for row in rows)
        return cls(a, b, c, d)

    @classmethod
    def identity(cls) -> "Matrix2":
        return cls(Fraction(1), Fraction(0), Fraction(0), Fraction(1))

    @property
    def entries(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return self.a, self.b, self.c, self.d

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> Fraction:
        return self.a + self.d

    def __matmul__(self, other: "Matrix2") -> "Matrix2":
        return Matrix2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __pow__(self, k: int) -> "Matrix2":
        base = self if k >= 0 else self.inverse()
        result = Matrix2.identity()
        k = abs(k)
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def inverse(self) -> "Matrix2":
        det = self.det
        if det == 0:
            raise NotInvertibleError(f"Matrix {self.rows()} is singular")
        return Matrix2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def sign_normalized(self) -> "Matrix2":
        """Same matrix or its negative, first nonzero entry positive."""
        first = next(v for v in self.entries if v != 0)
        if first > 0:
            return self
        return Matrix2(-self.a, -self.b, -self.c, -self.d)

    def _projective_key(self) -> tuple[Fraction, ...]:
        first = next(v for v in self.entries if v != 0)
        return tuple(v / first for v in self.entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix2):
            return NotImplemented
        return self._projective_key() == other._projective_key()

    def __hash__(self) -> int:
        return hash(self._projective_key())

    def is_scalar(self) -> bool:
        return self.b == 0 and self.c == 0 and self.a == self.d

    def rows(self) -> list[list[str]]:
        return [
            [format_fraction(self.a), format_fraction(self.b)],
            [format_fraction(self.c), format_fraction(self.d)],
        ]

    def as_floats(self) -> tuple[float, float, float, float]:
        return float(self.a), float(self.b), float(self.c), float(self.d)

    def __repr__(self) -> str:
        return f"Matrix2({self.rows()})"


def classify(matrix: Matrix2) -> TransformationType:
    """Classify by trace² against 4·det, exactly."""
    if matrix.is_scalar():
        return TransformationType.IDENTITY
    det = matrix.det
    if det <= 0:
        raise NotInvertibleError(f"Matrix {matrix.rows()} does not preserve orientation")
    discriminant = matrix.trace * matrix.trace - 4 * det
    if discriminant < 0:
        return TransformationType.ELLIPTIC
    if discriminant == 0:
        return TransformationType.PARABOLIC
    return TransformationType.HYPERBOLIC
