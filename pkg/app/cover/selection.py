"""Candidate centers and the greedy choice of a covering vertex set Z."""
import logging
import math
from fractions import Fraction
from typing import Callable, Optional

from app.boundary.arcs import ArcIndex, covers
from app.boundary.points import BoundaryPoint, act, ccw_before
from app.cover.atoms import CoverAtom
from app.cover.constants import point_at_angle
from app.group.representation import PeripheralDescriptor
from app.group.words import GENERATORS, enumerate_words, peripheral_coset_decompose, word_key

logger = logging.getLogger(__name__)

# Offsets keep grid centers away from low-height rationals.
_CUSP_OFFSET = Fraction(31, 101)
MAX_GAP_FILLS = 4096

GapFiller = Callable[[BoundaryPoint], Optional[CoverAtom]]


def parabolic_cosets(max_length: int) -> list[str]:
    """Shortest representatives of the cosets g⟨c⟩ with |g| ≤ max_length, identity first."""
    reps = {peripheral_coset_decompose(word).rep for word in enumerate_words(max_length, GENERATORS)}
    return sorted(reps, key=word_key)


def cusp_reach(atom: CoverAtom, peripheral: PeripheralDescriptor) -> int:
    """Largest |T| over the ends of V(p₀), rounded up.

    A cusp grid reaching this far meets the parabolic atom at p₀ on both sides.
    """
    ends = [peripheral.translation_coordinate(p) for p in (atom.V.start, atom.V.end) if p != peripheral.p0]
    return math.ceil(max((abs(float(T)) for T in ends), default=0.0))


def candidate_centers(
    level: int,
    peripheral: PeripheralDescriptor,
    grid_size: int = 256,
    cusp_extent: int = 80,
    cusp_step: Fraction = Fraction(2),
) -> list[tuple[BoundaryPoint, str]]:
    """Angular grid of 256·2^level offset angles plus a translation-coordinate grid near p₀."""
    count = grid_size * 2**level
    centers = [(point_at_angle((i + 0.5) * math.pi / count), "grid") for i in range(count)]

    step = Fraction(cusp_step) / 2**level
    to_circle = peripheral.conjugator.inverse()
    j = math.floor(-cusp_extent / step)
    while True:
        T = j * step + _CUSP_OFFSET * step
        j += 1
        if T < -cusp_extent:
            continue
        if T > cusp_extent:
            break
        centers.append((act(to_circle, BoundaryPoint.from_coords(T, 1)), "cusp"))

    seen: set[BoundaryPoint] = set()
    unique = []
    for point, origin in centers:
        if point not in seen:
            seen.add(point)
            unique.append((point, origin))
    return unique


def select_cover(
    atoms: list[CoverAtom],
    anchor: int = 0,
    fill: Optional[GapFiller] = None,
    max_fills: int = MAX_GAP_FILLS,
) -> Optional[list[int]]:
    """Greedy chain of V-arcs counterclockwise from V(anchor) back into it.

    At each step the arc containing the frontier whose end lies farthest
    counterclockwise is taken. A frontier no arc contains is handed to
    ``fill``; the atom it returns must contain the frontier and is appended
    to ``atoms``, so returned indices refer to the extended list. Returns None
    when a gap stays open.
    """
    arcs = [atom.V for atom in atoms]
    index = ArcIndex(arcs)
    indexed = len(arcs)
    start = arcs[anchor]
    chosen = [anchor]
    frontier = start.end
    travelled = 0.0
    fills = 0
    for _ in range(indexed + max_fills):
        holders = index.containing(frontier)
        holders += [i for i in range(indexed, len(arcs)) if arcs[i].contains(frontier)]
        if not holders:
            atom = fill(frontier) if fill is not None and fills < max_fills else None
            if atom is None or not atom.V.contains(frontier):
                logger.info(f"cover gap at {frontier}")
                return None
            fills += 1
            atoms.append(atom)
            arcs.append(atom.V)
            holders = [len(arcs) - 1]
        best = holders[0]
        for i in holders[1:]:
            if ccw_before(frontier, arcs[best].end, arcs[i].end):
                best = i
        travelled += (arcs[best].end.angle - frontier.angle) % math.pi
        if best not in chosen:
            chosen.append(best)
        frontier = arcs[best].end
        if start.contains(frontier) or travelled >= math.pi:
            break
    else:
        return None

    if fills:
        logger.info(f"filled {fills} cover gaps with atoms centered on the frontier")
    if not covers([arcs[i] for i in chosen]):
        logger.info("greedy chain closed but exact cover check failed")
        return None
    return chosen
