"""Finitary point coders: the automaton truncated to short labels, and the N search."""
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from app.boundary.arcs import Arc
from app.coding.coder import QGSequence
from app.coding.exceptions import CoderConstructionError, NestingSearchExhaustedError
from app.cover.automaton import Automaton
from app.cusped.ball import CuspedBall, norm_upper_bound
from app.group.representation import Representation
from app.group.words import inverse_word, reduce

logger = logging.getLogger(__name__)

GENERATOR_SET = ("", "a", "A", "b", "B")
MIN_SUFFIX = 4


@dataclass(frozen=True)
class CoderEdge:
    source: int
    target: int
    label: str


@dataclass
class FinitaryPointCoder:
    """Open sets W(v), a finite label set and edges with α·closure(W(target)) ⊂ W(source)."""

    sets: list[Arc]
    edges: list[CoderEdge]
    rep: Representation
    labels: frozenset[str] = field(init=False)
    _lookup: set[tuple[int, int, str]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        for edge in self.edges:
            image = self.sets[edge.target].closure().image(self.rep.evaluate(edge.label))
            if not self.sets[edge.source].contains_arc(image):
                raise CoderConstructionError(
                    f"Edge {edge.source} -> {edge.target} labelled {edge.label} fails its inclusion"
                )
        self.labels = frozenset(reduce(edge.label) for edge in self.edges)
        self._lookup = {(e.source, e.target, reduce(e.label)) for e in self.edges}

    def has_edge(self, source: int, target: int, label: str) -> bool:
        return (source, target, reduce(label)) in self._lookup

    def __len__(self) -> int:
        return len(self.sets)


def truncate_to_coder(
    automaton: Automaton, D2: int, ball: Optional[CuspedBall] = None
) -> FinitaryPointCoder:
    """Drop labels with |α|_X > D2 (tails included) and the edges left without labels."""

    def norm(word: str) -> int:
        return ball.norm(word).value if ball is not None else norm_upper_bound(word)

    atoms = automaton.atoms
    short_labels = {z: [label for label in atom.labels() if norm(label) <= D2] for z, atom in enumerate(atoms)}
    edges = [
        CoderEdge(z, y, label)
        for z, y in automaton.edges()
        for label in short_labels[z]
    ]
    kept = len({(e.source, e.target) for e in edges})
    logger.info(f"coder with D2={D2}: {kept} of {len(automaton.edges())} edges, {len(edges)} labelled edges")
    return FinitaryPointCoder([atom.W for atom in atoms], edges, automaton.cover.rep)


def coder_suffix(sequence: QGSequence, coder: FinitaryPointCoder, min_length: int = MIN_SUFFIX) -> Optional[QGSequence]:
    """The shifted generalized coding whose edges all belong to the coder, if long enough."""
    start = len(sequence.labels)
    for k in range(len(sequence.labels) - 1, -1, -1):
        if not coder.has_edge(sequence.vertices[k], sequence.vertices[k + 1], sequence.labels[k]):
            break
        start = k
    suffix = sequence.shifted(start)
    return suffix if len(suffix.labels) >= min_length else None


def _memberships(
    pairs: Sequence[tuple[QGSequence, QGSequence]], F: Iterable[str]
) -> list[tuple[int, int, int]]:
    """Triples (pair, n, m) with g_n⁻¹h_m ∈ F."""
    targets = {reduce(word) for word in F}
    reach = max((len(word) for word in targets), default=0)
    found = []
    for index, (first, second) in enumerate(pairs):
        for n, g in enumerate(first.words):
            inverse = inverse_word(g)
            for m, h in enumerate(second.words):
                if abs(len(g) - len(h)) > reach:
                    continue
                if reduce(inverse + h) in targets:
                    found.append((index, n, m))
    return found


def search_N(
    coder: FinitaryPointCoder,
    sequences: Sequence[tuple[QGSequence, QGSequence]],
    F: Iterable[str] = GENERATOR_SET,
    N_max: int = 32,
) -> int:
    """Least N with g_{n+N}·closure W(z_{n+N}) ⊂ h_m·W(y_m) whenever g_n⁻¹h_m ∈ F.

    Each pair is first cut to its longest suffixes that are paths of the coder.
    """
    pairs = []
    for first, second in sequences:
        suffixes = coder_suffix(first, coder), coder_suffix(second, coder)
        if None not in suffixes:
            pairs.append(suffixes)
    if not pairs:
        raise NestingSearchExhaustedError("No sampled pair runs inside the coder", N_max)
    memberships = _memberships(pairs, F)
    closed: dict[tuple[int, int], Arc] = {}
    for N in range(1, N_max + 1):
        failure = None
        for index, n, m in memberships:
            first, second = pairs[index]
            if n + N >= len(first.arcs):
                continue
            key = (index, n + N)
            if key not in closed:
                closed[key] = first.arcs[n + N].closure()
            if not second.arcs[m].contains_arc(closed[key]):
                failure = (index, n, m)
                break
        if failure is None:
            logger.info(f"least N = {N} over {len(pairs)} pairs, {len(memberships)} instances")
            return N
        logger.debug(f"N={N} fails at pair {failure[0]} (n={failure[1]}, m={failure[2]})")
    raise NestingSearchExhaustedError(f"No N <= {N_max} satisfies the nesting condition", N_max)
