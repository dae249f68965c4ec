"""Vertices of the cusped space and the combinatorial horoball edge rule.

Depth-0 vertices are group elements (Cayley graph of {a±1, b±1, c±1}).
Over each coset g⟨c⟩ sits a horoball whose vertex (rep, k, n) lies at depth
n ≥ 1 above rep·cᵏ; at depth n it is joined horizontally to (rep, j, n)
whenever 0 < |k − j| ≤ 2ⁿ and vertically to depths n ± 1.
"""
from typing import NamedTuple, Union

from app.cusped.exceptions import CuspedSpaceError
from app.group.words import (
    ALPHABET,
    C_EXPANSION,
    free_reduce,
    parse_word,
    peripheral_coset_decompose,
    reduce,
)


class CayleyVertex(NamedTuple):
    word: str

    @property
    def depth(self) -> int:
        return 0


class HoroVertex(NamedTuple):
    rep: str
    exponent: int
    depth: int


Vertex = Union[CayleyVertex, HoroVertex]

IDENTITY_VERTEX = CayleyVertex("")


def coset_word(rep: str, exponent: int) -> str:
    """Reduced word of rep · cᵏ."""
    block = C_EXPANSION["c"] if exponent >= 0 else C_EXPANSION["C"]
    return free_reduce(rep + block * abs(exponent))


def cayley_vertex(text: str) -> CayleyVertex:
    """Depth-0 vertex of a human-written word."""
    return CayleyVertex(reduce(parse_word(text)))


def horo_vertex(text: str, depth: int) -> Vertex:
    """Vertex at ``depth`` above the element ``text``."""
    if depth < 0:
        raise CuspedSpaceError(f"Negative depth {depth}")
    vertex = cayley_vertex(text)
    if depth == 0:
        return vertex
    rep, exponent = peripheral_coset_decompose(vertex.word)
    return HoroVertex(rep, exponent, depth)


def horoball_of(vertex: Vertex) -> tuple[str, int]:
    """(coset representative, exponent) of the horoball column through ``vertex``."""
    if isinstance(vertex, HoroVertex):
        return vertex.rep, vertex.exponent
    return peripheral_coset_decompose(vertex.word)


def neighbors(vertex: Vertex, depth_cap: int) -> list[Vertex]:
    """Adjacent vertices in a frozen order: Cayley letters, up, down, horizontal."""
    if isinstance(vertex, CayleyVertex):
        result: list[Vertex] = [
            CayleyVertex(free_reduce(vertex.word + C_EXPANSION.get(letter, letter)))
            for letter in ALPHABET
        ]
        if depth_cap >= 1:
            rep, exponent = peripheral_coset_decompose(vertex.word)
            result.append(HoroVertex(rep, exponent, 1))
        return result

    rep, k, n = vertex
    result = []
    if n < depth_cap:
        result.append(HoroVertex(rep, k, n + 1))
    if n == 1:
        result.append(CayleyVertex(coset_word(rep, k)))
    else:
        result.append(HoroVertex(rep, k, n - 1))
    span = 2**n
    result.extend(HoroVertex(rep, j, n) for j in range(k - span, k + span + 1) if j != k)
    return result


def horoball_cost(steps: int, start_depth: int = 0, end_depth: int = 0) -> tuple[int, int]:
    """Length of the regular path inside one horoball and its top depth.

    The path rises to depth m, crosses ``steps`` exponents with edges of
    span 2ᵐ, then descends. Among minimizing m the largest is returned, which
    keeps the flat part at most 3.
    """
    steps = abs(steps)
    low = max(start_depth, end_depth)
    best_cost, best_depth = None, low
    for m in range(low, low + steps.bit_length() + 2):
        cost = (2 * m - start_depth - end_depth) + -(-steps // 2**m)
        if best_cost is None or cost <= best_cost:
            best_cost, best_depth = cost, m
    return best_cost, best_depth


def vertex_label(vertex: Vertex) -> str:
    if isinstance(vertex, CayleyVertex):
        return f"g:{vertex.word}"
    return f"h:{vertex.rep}:{vertex.exponent}:{vertex.depth}"


def parse_vertex_label(label: str) -> Vertex:
    kind, _, rest = label.partition(":")
    if kind == "g":
        return CayleyVertex(rest)
    if kind == "h":
        rep, exponent, depth = rest.split(":")
        return HoroVertex(rep, int(exponent), int(depth))
    raise CuspedSpaceError(f"Bad vertex label '{label}'")
