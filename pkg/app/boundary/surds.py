"""Exact real quadratic irrationals p + q·√D and certified square-root bounds."""
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from app.boundary.exceptions import BoundaryError


Rational = Union[int, Fraction]

# Square factors below this bound are pulled out of radicands.
_TRIAL_LIMIT = 1000


def _squarefree_part(n: int) -> tuple[int, int]:
    """Return (s, m) with n = s²·m, removing small square factors and perfect squares."""
    root = math.isqrt(n)
    if root * root == n:
        return root, 1
    s = 1
    f = 2
    while f * f <= n and f < _TRIAL_LIMIT:
        while n % (f * f) == 0:
            n //= f * f
            s *= f
        f += 1
    root = math.isqrt(n)
    if root * root == n:
        return s * root, 1
    return s, n


def _sign(value: Rational) -> int:
    return (value > 0) - (value < 0)


@dataclass(frozen=True)
class QuadraticSurd:
    """The real number p + q·√radicand with rational p, q and integer radicand > 1.

    Instances with q == 0 are never built by ``make``; arithmetic that cancels
    the irrational part returns a Fraction.
    """

    p: Fraction
    q: Fraction
    radicand: int

    @staticmethod
    def make(p: Rational, q: Rational, radicand: Rational) -> "Fraction | QuadraticSurd":
        """Build p + q√radicand, folding square factors and rational results."""
        p, q, radicand = Fraction(p), Fraction(q), Fraction(radicand)
        if radicand < 0:
            raise BoundaryError(f"Negative radicand {radicand}")
        if q == 0 or radicand == 0:
            return p
        # √(n/d) = √(n·d)/d
        numerator = radicand.numerator * radicand.denominator
        q = q / radicand.denominator
        outside, inside = _squarefree_part(numerator)
        q *= outside
        if inside == 1:
            return p + q
        return QuadraticSurd(p, q, inside)

    @staticmethod
    def sqrt(value: Rational) -> "Fraction | QuadraticSurd":
        return QuadraticSurd.make(0, 1, value)

    def conjugate(self) -> "QuadraticSurd":
        return QuadraticSurd(self.p, -self.q, self.radicand)

    def sign(self) -> int:
        sp, sq = _sign(self.p), _sign(self.q)
        if sp == 0:
            return sq
        if sp == sq:
            return sp
        # p and q√D have opposite signs: compare squares
        return sp if self.p * self.p > self.q * self.q * self.radicand else sq

    def _coerce(self, other: object) -> "QuadraticSurd | None":
        if isinstance(other, QuadraticSurd):
            if other.radicand != self.radicand:
                raise BoundaryError(
                    f"Mixed radicands √{self.radicand} and √{other.radicand}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticSurd(Fraction(other), Fraction(0), self.radicand)
        return None

    def _build(self, p: Fraction, q: Fraction) -> "Fraction | QuadraticSurd":
        if q == 0:
            return p
        return QuadraticSurd(p, q, self.radicand)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._build(self.p + o.p, self.q + o.q)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.p, -self.q, self.radicand)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._build(self.p - o.p, self.q - o.q)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._build(o.p - self.p, o.q - self.q)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._build(
            self.p * o.p + self.q * o.q * self.radicand,
            self.p * o.q + self.q * o.p,
        )

    __rmul__ = __mul__

    def _reciprocal(self) -> "Fraction | QuadraticSurd":
        norm = self.p * self.p - self.q * self.q * self.radicand
        if norm == 0:
            raise ZeroDivisionError("division by zero surd")
        return self._build(self.p / norm, -self.q / norm)

    def __truediv__(self, other):
        if isinstance(other, QuadraticSurd):
            return self * other._reciprocal()
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self._build(self.p / other, self.q / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return other * self._reciprocal()
        return NotImplemented

    def __float__(self) -> float:
        return float(self.p) + float(self.q) * math.sqrt(self.radicand)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, QuadraticSurd):
            return (self.p, self.q, self.radicand) == (other.p, other.q, other.radicand)
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.p, self.q, self.radicand))

    def __lt__(self, other) -> bool:
        return sign(self - other) < 0

    def __le__(self, other) -> bool:
        return sign(self - other) <= 0

    def __gt__(self, other) -> bool:
        return sign(self - other) > 0

    def __ge__(self, other) -> bool:
        return sign(self - other) >= 0

    def __str__(self) -> str:
        return f"({self.p})+({self.q})*sqrt({self.radicand})"


Number = Union[int, Fraction, QuadraticSurd]


def sign(value: Number) -> int:
    """Exact sign of an int, Fraction or QuadraticSurd."""
    if isinstance(value, QuadraticSurd):
        return value.sign()
    return _sign(value)


# Scale used for rational square-root bounds; resolution 10⁻⁹.
SQRT_SCALE = 10**9


def sqrt_upper(value: Number) -> Fraction:
    """Rational r with r ≥ √value, within 2/SQRT_SCALE of it."""
    if sign(value) < 0:
        raise BoundaryError(f"Square root of negative value {value}")
    bound = upper_bound(value)
    n, d = bound.numerator, bound.denominator
    return Fraction(math.isqrt(n * d * SQRT_SCALE * SQRT_SCALE) + 1, d * SQRT_SCALE)


def sqrt_lower(value: Number) -> Fraction:
    """Rational r with 0 ≤ r ≤ √value."""
    bound = lower_bound(value)
    if bound <= 0:
        return Fraction(0)
    n, d = bound.numerator, bound.denominator
    return Fraction(math.isqrt(n * d * SQRT_SCALE * SQRT_SCALE), d * SQRT_SCALE)


def _sqrt_radicand_bounds(radicand: int) -> tuple[Fraction, Fraction]:
    root = math.isqrt(radicand * SQRT_SCALE * SQRT_SCALE)
    return Fraction(root, SQRT_SCALE), Fraction(root + 1, SQRT_SCALE)


def upper_bound(value: Number) -> Fraction:
    """Rational upper bound of an exact value (the value itself if rational)."""
    if not isinstance(value, QuadraticSurd):
        return Fraction(value)
    low, high = _sqrt_radicand_bounds(value.radicand)
    return value.p + value.q * (high if value.q > 0 else low)


def lower_bound(value: Number) -> Fraction:
    """Rational lower bound of an exact value (the value itself if rational)."""
    if not isinstance(value, QuadraticSurd):
        return Fraction(value)
    low, high = _sqrt_radicand_bounds(value.radicand)
    return value.p + value.q * (low if value.q > 0 else high)
