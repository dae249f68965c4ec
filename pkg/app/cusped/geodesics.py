"""Geodesic paths, horoball transits and regular replacements."""
import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional

from app.cusped.exceptions import CuspedSpaceError, RegularizationError
from app.cusped.vertices import (
    CayleyVertex,
    HoroVertex,
    Vertex,
    coset_word,
    horoball_cost,
    horoball_of,
    vertex_label,
)

logger = logging.getLogger(__name__)

# Hausdorff bound between a horoball geodesic and its regular replacement.
REGULAR_HAUSDORFF_BOUND = 4
MAX_FLAT = 3


class Transit(NamedTuple):
    """Maximal stretch of a path at depth ≥ 1 inside one horoball.

    ``entry`` and ``exit`` index the last vertex before and the first vertex
    after the stretch, or the path ends when it starts or stops inside.
    """
    rep: str
    entry: int
    exit: int
    length: int
    max_depth: int


@dataclass(frozen=True)
class GeodesicPath:
    vertices: tuple[Vertex, ...]
    certified: bool = True
    regular: bool = False
    vertical: bool = False

    def __len__(self) -> int:
        return len(self.vertices) - 1

    @property
    def start(self) -> Vertex:
        return self.vertices[0]

    @property
    def end(self) -> Vertex:
        return self.vertices[-1]

    def depths(self) -> list[int]:
        return [v.depth for v in self.vertices]


def horoball_transits(path: GeodesicPath) -> list[Transit]:
    """Identify the maximal horoball stretches of a path."""
    transits: list[Transit] = []
    vertices = path.vertices
    i = 0
    while i < len(vertices):
        if vertices[i].depth == 0:
            i += 1
            continue
        rep = vertices[i].rep
        first = i
        while i < len(vertices) and vertices[i].depth > 0 and vertices[i].rep == rep:
            i += 1
        entry = first - 1 if first > 0 else 0
        exit_ = i if i < len(vertices) else len(vertices) - 1
        max_depth = max(v.depth for v in vertices[first:i])
        transits.append(Transit(rep, entry, exit_, exit_ - entry, max_depth))
    return transits


def _column_vertex(rep: str, exponent: int, depth: int) -> Vertex:
    if depth == 0:
        return CayleyVertex(coset_word(rep, exponent))
    return HoroVertex(rep, exponent, depth)


def regular_segment(start: Vertex, end: Vertex) -> list[Vertex]:
    """Regular path (rise, flat of at most 3, descend) between two vertices over one coset."""
    rep, i = horoball_of(start)
    other, j = horoball_of(end)
    if rep != other:
        raise CuspedSpaceError(f"{start} and {end} lie over different cosets")
    d1, d2 = start.depth, end.depth
    _, top = horoball_cost(j - i, d1, d2)

    cells = [(i, depth) for depth in range(d1, top + 1)]
    span = 2**top
    position = i
    while position != j:
        position += max(-span, min(span, j - position))
        cells.append((position, top))
    cells.extend((j, depth) for depth in range(top - 1, d2 - 1, -1))
    return [_column_vertex(rep, exponent, depth) for exponent, depth in cells]


def _transit_is_regular(path: GeodesicPath, transit: Transit) -> bool:
    depths = path.depths()[transit.entry : transit.exit + 1]
    k = 0
    while k + 1 < len(depths) and depths[k + 1] == depths[k] + 1:
        k += 1
    flat_start = k
    while k + 1 < len(depths) and depths[k + 1] == depths[k]:
        k += 1
    if k - flat_start > MAX_FLAT:
        return False
    while k + 1 < len(depths) and depths[k + 1] == depths[k] - 1:
        k += 1
    return k == len(depths) - 1


def is_regular(path: GeodesicPath) -> bool:
    return all(_transit_is_regular(path, t) for t in horoball_transits(path))


def _is_vertical(path: GeodesicPath) -> bool:
    transits = horoball_transits(path)
    return bool(transits) and all(
        len({horoball_of(v)[1] for v in path.vertices[t.entry : t.exit + 1]}) == 1
        for t in transits
    )


def regularize(path: GeodesicPath) -> GeodesicPath:
    """Replace every horoball transit by the regular path with the same ends.

    A geodesic transit is never shorter than the regular path, so lengths
    are preserved; a transit that disagrees raises RegularizationError.
    """
    transits = horoball_transits(path)
    if not transits:
        return path
    vertices = list(path.vertices)
    result: list[Vertex] = []
    cursor = 0
    for transit in transits:
        result.extend(vertices[cursor : transit.entry])
        segment = regular_segment(vertices[transit.entry], vertices[transit.exit])
        if len(segment) - 1 != transit.length:
            raise RegularizationError(
                f"Transit over '{transit.rep}' to {vertex_label(path.end)} has length "
                f"{transit.length} but the regular path has {len(segment) - 1}"
            )
        result.extend(segment)
        cursor = transit.exit + 1
    result.extend(vertices[cursor:])

    candidate = GeodesicPath(tuple(result), path.certified)
    return GeodesicPath(
        candidate.vertices,
        path.certified,
        regular=is_regular(candidate),
        vertical=_is_vertical(candidate),
    )


def horoball_distance_upper(u: Vertex, v: Vertex) -> Optional[int]:
    """Length of the regular path between two vertices over the same coset, else None."""
    rep_u, i = horoball_of(u)
    rep_v, j = horoball_of(v)
    if rep_u != rep_v:
        return None
    cost, _ = horoball_cost(j - i, u.depth, v.depth)
    return cost


def _one_sided(a: GeodesicPath, b: GeodesicPath) -> int:
    members = set(b.vertices)
    worst = 0
    for index, x in enumerate(a.vertices):
        if x in members:
            continue
        best = min(index, len(a) - index)
        for y in b.vertices:
            bound = horoball_distance_upper(x, y)
            if bound is not None and bound < best:
                best = bound
        worst = max(worst, best)
    return worst


def hausdorff_upper(first: GeodesicPath, second: GeodesicPath) -> int:
    """Upper bound on the Hausdorff distance between two paths with equal ends.

    Distances are bounded by walking back to a shared end or through a
    regular path inside a common horoball.
    """
    if first.start != second.start or first.end != second.end:
        raise CuspedSpaceError("Paths do not share their endpoints")
    return max(_one_sided(first, second), _one_sided(second, first))
