"""Separation constants D, D_Π, ε, C and the parabolic fundamental arc K_p."""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from app.boundary.arcs import TAU, Arc, covers
from app.boundary.exceptions import BoundaryError
from app.boundary.points import BoundaryPoint, act
from app.boundary.surds import Number, sqrt_lower
from app.boundary.tails import TailCertificate, certify_tail
from app.cover.exceptions import ConstantsError
from app.cover.search import float_matrices
from app.group.matrices import format_fraction, to_fraction
from app.group.representation import PeripheralDescriptor, Representation
from app.group.words import GENERATORS, enumerate_words

logger = logging.getLogger(__name__)

SAFETY = Fraction(9, 10)
EPSILON_SCALE = 10**9
_D_SCALE = 10**6
_POINT_DENOMINATOR = 10**6


def floor_fraction(value: float | Fraction, scale: int = _D_SCALE) -> Fraction:
    """Largest multiple of 1/scale not above ``value``."""
    return Fraction(math.floor(Fraction(value) * scale), scale)


def point_at_angle(theta: float, limit: int = _POINT_DENOMINATOR) -> BoundaryPoint:
    """Rational point close to the line at angle θ."""
    x = Fraction(math.cos(theta)).limit_denominator(limit)
    y = Fraction(math.sin(theta)).limit_denominator(limit)
    return BoundaryPoint.from_coords(x, y)


def unit_vectors(points: Sequence[BoundaryPoint]) -> np.ndarray:
    angles = np.array([p.angle for p in points], dtype=float)
    return np.stack([np.cos(angles), np.sin(angles)], axis=-1)


def sample_pairs(count: int, seed: int = 0) -> list[tuple[BoundaryPoint, BoundaryPoint]]:
    """Deterministic sample of distinct point pairs, uniform in angle."""
    rng = np.random.default_rng(seed)
    pairs = []
    for first, second in rng.uniform(0.0, math.pi, size=(count, 2)):
        x, y = point_at_angle(first), point_at_angle(second)
        if x != y:
            pairs.append((x, y))
    return pairs


def estimate_D(
    rep: Representation,
    pairs: Sequence[tuple[BoundaryPoint, BoundaryPoint]],
    word_length: int = 4,
) -> Fraction:
    """0.9 × min over pairs of max over |g| ≤ L of d(gx, gy), rounded down."""
    if not pairs:
        raise ConstantsError("Cannot estimate D from an empty sample")
    for x, y in pairs:
        if x == y:
            raise ConstantsError(f"Degenerate pair ({x}, {y}) in the D sample")

    words = list(enumerate_words(word_length, GENERATORS))
    matrices = float_matrices(rep, words)
    first = np.einsum("gij,pj->gpi", matrices, unit_vectors([x for x, _ in pairs]))
    second = np.einsum("gij,pj->gpi", matrices, unit_vectors([y for _, y in pairs]))
    cross = first[..., 0] * second[..., 1] - first[..., 1] * second[..., 0]
    norms = np.linalg.norm(first, axis=-1) * np.linalg.norm(second, axis=-1)
    separation = np.max(np.abs(cross) / norms, axis=0)

    weakest = int(np.argmin(separation))
    value = floor_fraction(float(separation[weakest]) * float(SAFETY))
    if value <= 0:
        raise ConstantsError(f"Pair {pairs[weakest]} is not separated by words of length {word_length}")
    logger.info(
        f"D estimate over {len(pairs)} pairs, {len(words)} words: {float(value):.6f} "
        f"(weakest pair {pairs[weakest][0]}, {pairs[weakest][1]})"
    )
    return value


@dataclass(frozen=True)
class FundamentalArc:
    """K_p: a closed arc whose ⟨c⟩-translates cover the circle minus p₀."""

    x0: BoundaryPoint
    arc: Arc
    anchor: Fraction
    enumerate_bound: int
    tail: TailCertificate
    diameter_sq: Number
    distance_sq: Number
    D_pi: Fraction

    def to_dict(self) -> dict:
        return {
            "x0": str(self.x0),
            "arc": self.arc.to_dict(),
            "anchor": format_fraction(self.anchor),
            "enumerate_bound": self.enumerate_bound,
            "tail": self.tail.to_dict(),
            "diameter_sq": str(self.diameter_sq),
            "distance_sq": str(self.distance_sq),
            "D_pi": format_fraction(self.D_pi),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FundamentalArc":
        try:
            return cls(
                BoundaryPoint.parse(data["x0"]),
                Arc.from_dict(data["arc"]),
                to_fraction(data["anchor"]),
                int(data["enumerate_bound"]),
                TailCertificate.from_dict(data["tail"]),
                to_fraction(data["diameter_sq"]),
                to_fraction(data["distance_sq"]),
                to_fraction(data["D_pi"]),
            )
        except (KeyError, ValueError, BoundaryError) as e:
            raise ConstantsError(f"Malformed fundamental arc: {e}") from e


def build_K_p(peripheral: PeripheralDescriptor, enumerate_bound: int = 8) -> FundamentalArc:
    """K_p from x₀ = H⁻¹(−s/2 : 1) to c·x₀, with the coverage of S¹ − {p₀} certified.

    Consecutive translates share an endpoint exactly, the translates with
    |k| ≤ K together with the certified tail hulls cover the circle, and the
    tail drifts monotonically into p₀.
    """
    p0 = peripheral.p0
    c = peripheral.matrix
    s = peripheral.translation_length
    x0 = act(peripheral.conjugator.inverse(), BoundaryPoint.from_coords(-s / 2, 1))
    cx0 = act(c, x0)
    if x0 == p0 or cx0 == x0:
        raise ConstantsError(f"Base point {x0} is fixed by the peripheral element")

    arc = Arc.closed(x0, cx0)
    if arc.contains(p0):
        arc = Arc.closed(cx0, x0)
    if arc.contains(p0):
        raise ConstantsError(f"Both arcs between {x0} and {cx0} contain p0")

    translates = [arc.image(c**k) for k in range(-enumerate_bound, enumerate_bound + 1)]
    for left, right in zip(translates, translates[1:]):
        if not left.closure().intersects(right.closure()) or left.interior().intersects(right.interior()):
            raise ConstantsError(f"Translates {left} and {right} do not abut")
    try:
        tail = certify_tail(p0, arc, c, enumerate_bound)
    except BoundaryError as e:
        raise ConstantsError(f"Tail of K_p not certified: {e}") from e
    if not covers(translates + tail.hull_arcs()):
        raise ConstantsError("Translates of K_p do not cover the circle")

    diameter_sq = arc.diameter_sq()
    distance_sq = arc.distance_sq_to(p0)
    D_pi = floor_fraction(SAFETY * min(sqrt_lower(diameter_sq), sqrt_lower(distance_sq)), EPSILON_SCALE)
    if D_pi <= 0:
        raise ConstantsError("K_p touches p0")

    anchor = (
        Fraction(peripheral.translation_coordinate(x0)) + Fraction(peripheral.translation_coordinate(cx0))
    ) / 2
    logger.info(f"K_p = {arc}, D_pi = {float(D_pi):.6f}")
    return FundamentalArc(x0, arc, anchor, enumerate_bound, tail, diameter_sq, distance_sq, D_pi)


def choose_epsilon(D: Fraction, D_pi: Fraction, epsilon_target: Fraction) -> Fraction:
    """ε = 0.9 × min(D/5, D_Π/5, ε_target), rounded down."""
    epsilon_target = to_fraction(epsilon_target)
    if epsilon_target <= 0:
        raise ConstantsError(f"Target radius must be positive, got {epsilon_target}")
    bound = min(D / 5, D_pi / 5)
    epsilon = floor_fraction(SAFETY * min(bound, epsilon_target), EPSILON_SCALE)
    if epsilon <= 0 or bound - epsilon < 10 * TAU:
        raise ConstantsError(f"No room for epsilon below {float(bound):.3g}")
    return epsilon


def uniform_constant(delta_hat: int, label_norms: Sequence[int]) -> int:
    """C = 2δ̂ + 6 + the largest norm among conical labels and coset representatives."""
    return 2 * delta_hat + 6 + max(label_norms, default=0)


@dataclass
class Constants:
    """Constants of one cover build; the measured block is filled downstream."""

    D: Fraction
    D_pi: Fraction
    epsilon: Fraction
    epsilon_target: Fraction
    delta_hat: int = 1
    C: Optional[int] = None
    epsilon_prime: Optional[Fraction] = None
    c_nest: Optional[Fraction] = None
    R_track: Optional[int] = None
    D0: Optional[int] = None
    D1: Optional[int] = None
    D2: Optional[int] = None
    N: Optional[int] = None
    J: Optional[int] = None
    epsilon_z: dict[int, Fraction] = field(default_factory=dict)

    _FRACTIONS = ("D", "D_pi", "epsilon", "epsilon_target", "epsilon_prime", "c_nest")
    _INTEGERS = ("delta_hat", "C", "R_track", "D0", "D1", "D2", "N", "J")

    def to_dict(self) -> dict:
        data: dict = {}
        for name in self._FRACTIONS:
            value = getattr(self, name)
            data[name] = None if value is None else format_fraction(value)
        for name in self._INTEGERS:
            data[name] = getattr(self, name)
        data["epsilon_z"] = {str(k): format_fraction(v) for k, v in sorted(self.epsilon_z.items())}
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Constants":
        try:
            values = {
                name: None if data.get(name) is None else to_fraction(data[name])
                for name in cls._FRACTIONS
            }
            values.update({name: data.get(name) for name in cls._INTEGERS})
            values["epsilon_z"] = {int(k): to_fraction(v) for k, v in data.get("epsilon_z", {}).items()}
        except (ValueError, ZeroDivisionError) as e:
            raise ConstantsError(f"Malformed constants block: {e}") from e
        if values["delta_hat"] is None:
            values["delta_hat"] = 1
        return cls(**values)
