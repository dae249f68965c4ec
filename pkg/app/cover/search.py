"""Vectorized float searches used to shortlist labels and radii.

Nothing decided here is trusted: every shortlisted candidate is re-checked
with exact arc predicates by the caller.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from app.boundary.arcs import Arc
from app.boundary.points import BoundaryPoint
from app.group.representation import Representation
from app.group.words import GENERATORS, c_power, enumerate_words, reduce, word_key

logger = logging.getLogger(__name__)

PREFILTER_MARGIN = 1e-9
BISECTION_ITERATIONS = 20


def float_matrices(rep: Representation, words: Sequence[str]) -> np.ndarray:
    """(n, 2, 2) float matrices of the given compact words."""
    if not words:
        return np.zeros((0, 2, 2))
    return np.array([rep.evaluate(word).as_floats() for word in words], dtype=float).reshape(-1, 2, 2)


def _inverse_unimodular(matrices: np.ndarray) -> np.ndarray:
    inverse = np.empty_like(matrices)
    inverse[:, 0, 0] = matrices[:, 1, 1]
    inverse[:, 0, 1] = -matrices[:, 0, 1]
    inverse[:, 1, 0] = -matrices[:, 1, 0]
    inverse[:, 1, 1] = matrices[:, 0, 0]
    return inverse


@dataclass(frozen=True)
class LabelCandidates:
    """Candidate conical labels in search order with float matrices of their inverses."""

    words: tuple[str, ...]
    inverse: np.ndarray

    def __len__(self) -> int:
        return len(self.words)


@lru_cache(maxsize=8)
def label_candidates(
    rep: Representation,
    max_length: int = 5,
    side_length: int = 2,
    max_power: int = 24,
) -> LabelCandidates:
    """Plain S-words up to ``max_length`` and words u·cᵏ·h with short u, h.

    The structured family reaches deep into the cusp at p₀, where the
    expansion needed by a conical atom comes from a high power of c.
    Candidates are sorted by (length, lexicographic) on the compact word and
    deduplicated by the element they represent.
    """
    sides = list(enumerate_words(side_length, GENERATORS))
    side_index = {word: i for i, word in enumerate(sides)}
    powers = [k for k in range(-max_power, max_power + 1) if abs(k) >= 2]
    power_index = {k: i for i, k in enumerate(powers)}

    entries: list[tuple[str, tuple]] = [
        (word, ("plain",)) for word in enumerate_words(max_length, GENERATORS) if word
    ]
    entries.extend(
        (u + c_power(k) + h, ("structured", u, k, h)) for u in sides for h in sides for k in powers
    )
    entries.sort(key=lambda item: word_key(item[0]))

    seen: set[str] = set()
    kept: list[tuple[str, tuple]] = []
    for word, origin in entries:
        element = reduce(word)
        if element and element not in seen:
            seen.add(element)
            kept.append((word, origin))

    side_mats = float_matrices(rep, sides)
    c_float = np.array(rep.letter("c").as_floats(), dtype=float).reshape(2, 2)
    power_mats = np.stack([np.linalg.matrix_power(c_float if k > 0 else np.linalg.inv(c_float), abs(k)) for k in powers])

    plain_rows = [i for i, (_, origin) in enumerate(kept) if origin[0] == "plain"]
    structured_rows = [i for i, (_, origin) in enumerate(kept) if origin[0] == "structured"]
    matrices = np.empty((len(kept), 2, 2))
    if plain_rows:
        matrices[plain_rows] = float_matrices(rep, [kept[i][0] for i in plain_rows])
    if structured_rows:
        u_idx = [side_index[kept[i][1][1]] for i in structured_rows]
        k_idx = [power_index[kept[i][1][2]] for i in structured_rows]
        h_idx = [side_index[kept[i][1][3]] for i in structured_rows]
        matrices[structured_rows] = np.einsum(
            "nij,njk,nkl->nil", side_mats[u_idx], power_mats[k_idx], side_mats[h_idx]
        )

    logger.debug(f"{len(kept)} conical label candidates (L={max_length}, |k|<={max_power})")
    return LabelCandidates(tuple(word for word, _ in kept), _inverse_unimodular(matrices))


def _angles(vectors: np.ndarray) -> np.ndarray:
    return np.mod(np.arctan2(vectors[..., 1], vectors[..., 0]), math.pi)


def prefilter_labels(
    candidates: LabelCandidates,
    window: Arc,
    center: BoundaryPoint,
    epsilon: float,
) -> np.ndarray:
    """Indices of candidates α whose α⁻¹ stretches ``window`` past 4ε with room around α⁻¹z."""
    points = np.array(
        [[math.cos(p.angle), math.sin(p.angle)] for p in (window.start, center, window.end)]
    )
    images = np.einsum("nij,pj->npi", candidates.inverse, points)
    theta = _angles(images)
    length = np.mod(theta[:, 2] - theta[:, 0], math.pi)
    offset = np.mod(theta[:, 1] - theta[:, 0], math.pi)
    room = np.minimum(offset, length - offset)
    diameter = np.where(length >= math.pi / 2, 1.0, np.sin(length))
    mask = (
        (offset < length)
        & (diameter > 4 * epsilon + PREFILTER_MARGIN)
        & (room > math.asin(2 * epsilon) + PREFILTER_MARGIN)
    )
    return np.flatnonzero(mask)


def angular_room(inner: Arc, outer: Arc) -> float:
    """Smallest angle between the ends of ``inner`` and those of ``outer``.

    Negative when ``inner`` sticks out of ``outer``.
    """
    if outer.is_full:
        return math.pi
    if inner.is_full:
        return -math.pi
    offset = (inner.start_angle - outer.start_angle) % math.pi
    if offset > outer.angular_length:
        return offset - math.pi
    return min(offset, outer.angular_length - offset - inner.angular_length)


def bisect_radius(
    predicate: Callable[[float], bool],
    high: float,
    iterations: int = BISECTION_ITERATIONS,
) -> float:
    """Largest r in [0, high] with predicate(r), to bisection resolution."""
    if predicate(high):
        return high
    low = 0.0
    for _ in range(iterations):
        middle = (low + high) / 2
        if predicate(middle):
            low = middle
        else:
            high = middle
    return low
