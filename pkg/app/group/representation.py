"""Representations of F₂ into PGL(2, ℚ) and the peripheral data of c = [a, b]."""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Union

from app.boundary.points import BoundaryPoint, act
from app.boundary.surds import Number, QuadraticSurd, sign
from app.group.exceptions import RepresentationError
from app.group.matrices import (
    Matrix2,
    TransformationType,
    classify,
    format_fraction,
    to_fraction,
)
from app.group.transformations import fixed_points
from app.group.words import INVERSE_LETTER, PERIPHERAL_WORD, parse_word

logger = logging.getLogger(__name__)


A_MATRIX = Matrix2.from_rows([[1, 1], [1, 2]])
B_MATRIX = Matrix2.from_rows([[1, -1], [-1, 2]])


@dataclass(frozen=True)
class Representation:
    """Assignment of a and b to matrices of determinant 1.

    ``t`` records the deformation parameter the matrices came from.
    """

    a: Matrix2
    b: Matrix2
    t: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        for letter, matrix in (("a", self.a), ("b", self.b)):
            if matrix.det != 1:
                raise RepresentationError(
                    f"Generator {letter} has determinant {matrix.det}, expected 1"
                )

    @cached_property
    def gen_assign(self) -> dict[str, Matrix2]:
        """Matrix for every letter of the alphabet, inverses and c included."""
        assign = {"a": self.a, "b": self.b}
        assign["A"] = self.a.inverse()
        assign["B"] = self.b.inverse()
        assign["c"] = self.a @ self.b @ assign["A"] @ assign["B"]
        assign["C"] = assign["c"].inverse()
        return assign

    def evaluate(self, word: str) -> Matrix2:
        """Exact product matrix of a compact word, sign-normalized."""
        return _evaluate(self, word)

    def letter(self, letter: str) -> Matrix2:
        return self.gen_assign[letter]

    @classmethod
    def from_config(cls, data: dict) -> "Representation":
        try:
            return cls(
                Matrix2.from_rows(data["a"]),
                Matrix2.from_rows(data["b"]),
                to_fraction(data.get("t", 0)),
            )
        except (KeyError, ValueError, ZeroDivisionError) as e:
            raise RepresentationError(f"Invalid representation config: {e}") from e

    def as_config(self) -> dict:
        return {"a": self.a.rows(), "b": self.b.rows(), "t": format_fraction(self.t)}


@lru_cache(maxsize=262144)
def _evaluate(rep: Representation, word: str) -> Matrix2:
    if len(word) > 64:
        half = len(word) // 2
        return (_evaluate(rep, word[:half]) @ _evaluate(rep, word[half:])).sign_normalized()
    result = Matrix2.identity()
    for letter in word:
        result = result @ rep.gen_assign[letter]
    return result.sign_normalized()


def evaluate(rep: Representation, word: str) -> Matrix2:
    """Evaluate a word (human or compact form) under ``rep``."""
    return rep.evaluate(parse_word(word))


def standard_representation() -> Representation:
    """ρ₀: the punctured-torus group with parabolic commutator."""
    return Representation(A_MATRIX, B_MATRIX)


def deformed_representation(t: Union[Fraction, int, str]) -> Representation:
    """ρ_t: b ↦ [[1, −1], [−1 − t, 2 + t]], a fixed."""
    t = to_fraction(t)
    b = Matrix2(Fraction(1), Fraction(-1), -1 - t, 2 + t)
    return Representation(A_MATRIX, b, t)


@dataclass(frozen=True)
class PeripheralDescriptor:
    """The peripheral word c, its fixed point p₀ and a translation coordinate.

    The conjugator H sends p₀ to (1:0), so c acts on the affine coordinate of
    H·x by a constant translation ``translation_length``.
    """

    rep: Representation
    word: str = PERIPHERAL_WORD
    conjugator: Matrix2 = field(init=False)
    p0: BoundaryPoint = field(init=False)

    def __post_init__(self) -> None:
        matrix = self.rep.evaluate(self.word)
        if classify(matrix) != TransformationType.PARABOLIC:
            raise RepresentationError(
                f"Peripheral word {self.word} is {classify(matrix).value}, not parabolic"
            )
        (p0,) = fixed_points(matrix)
        if not p0.is_rational:
            raise RepresentationError(f"Parabolic fixed point {p0} is not rational")
        u, v = Fraction(p0.x), Fraction(p0.y)
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "conjugator", Matrix2(u, v, -v, u))

    @cached_property
    def matrix(self) -> Matrix2:
        return self.rep.evaluate(self.word)

    def translation_coordinate(self, point: BoundaryPoint) -> Number:
        """Affine coordinate of H·point; undefined at p₀."""
        h = self.conjugator
        top = h.a * point.x + h.b * point.y
        bottom = h.c * point.x + h.d * point.y
        if sign(bottom) == 0:
            raise RepresentationError("Translation coordinate of p0 is infinite")
        return top / bottom

    @cached_property
    def translation_length(self) -> Fraction:
        """Constant s with T(c·x) = T(x) + s."""
        probe = self.conjugator.inverse()
        base = act(probe, BoundaryPoint(0, 1))
        shift = self.translation_coordinate(act(self.matrix, base)) - self.translation_coordinate(base)
        return Fraction(shift)

    def exponent_estimate(self, point: BoundaryPoint, anchor: Number) -> int:
        """k with T(c⁻ᵏ·point) closest to the anchor coordinate."""
        offset = (self.translation_coordinate(point) - anchor) / self.translation_length
        if isinstance(offset, QuadraticSurd):
            return round(float(offset))
        return round(offset)

    def letter_power(self, k: int) -> str:
        return (self.word if k >= 0 else _inverse(self.word)) * abs(k)


def _inverse(word: str) -> str:
    return "".join(INVERSE_LETTER[letter] for letter in reversed(word))
