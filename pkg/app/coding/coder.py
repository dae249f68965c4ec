"""Strict and generalized codings of boundary points by the cover automaton."""
import enum
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Protocol, Sequence

from app.boundary.arcs import Arc, ArcIndex
from app.boundary.points import BoundaryPoint, act
from app.boundary.surds import Number
from app.coding.exceptions import CodingFailedError
from app.cover.atoms import CoverAtom
from app.cover.automaton import Automaton
from app.cusped.lemmas import LemmaCheck
from app.group.matrices import Matrix2
from app.group.representation import Representation
from app.group.words import free_reduce, reduce

logger = logging.getLogger(__name__)

DEFAULT_CAP = 64
ESTIMATE_SPREAD = 2
FALLBACK_FACTOR = 4


class CodingKind(str, enum.Enum):
    CONICAL = "conical"
    PARABOLIC = "parabolic"


class Preference(str, enum.Enum):
    LOWEST = "lowest"
    HIGHEST = "highest"


class Step(NamedTuple):
    label: str
    matrix: Matrix2
    point: BoundaryPoint


class CodingRules(Protocol):
    """Vertex sets and label choice driving the inductive coding procedure."""

    automaton: Automaton
    rep: Representation

    def vertices_containing(self, x: BoundaryPoint) -> list[int]: ...

    def is_terminal(self, z: int, x: BoundaryPoint) -> bool: ...

    def step(self, z: int, x: BoundaryPoint, prefer: Preference) -> Step: ...


def ordered(values: Sequence[int], prefer: Preference) -> list[int]:
    return sorted(values, reverse=prefer == Preference.HIGHEST)


class StandardRules:
    """Coding under ρ₀: x ∈ V(z), labels α with α⁻¹x ∈ V̂(z)."""

    def __init__(self, automaton: Automaton):
        self.automaton = automaton
        self.rep = automaton.cover.rep
        self.peripheral = automaton.cover.peripheral
        self.anchor = automaton.cover.shape.fundamental.anchor
        self.index = ArcIndex([atom.V for atom in automaton.atoms])

    def vertices_containing(self, x: BoundaryPoint) -> list[int]:
        return self.index.containing(x)

    def is_terminal(self, z: int, x: BoundaryPoint) -> bool:
        atom = self.automaton.atoms[z]
        return atom.is_parabolic and x == atom.center

    def step(self, z: int, x: BoundaryPoint, prefer: Preference) -> Step:
        atom = self.automaton.atoms[z]
        if not atom.is_parabolic:
            alpha = self.rep.evaluate(atom.label)
            return Step(atom.label, alpha, act(alpha.inverse(), x))
        return self._parabolic_step(atom, x, prefer)

    def _parabolic_step(self, atom: CoverAtom, x: BoundaryPoint, prefer: Preference) -> Step:
        T = self.rep.evaluate(atom.coset_rep)
        c = self.peripheral.matrix
        w = act(T.inverse(), x)
        estimate = self.peripheral.exponent_estimate(w, self.anchor)
        low, high = atom.k_range

        def admissible(k: int) -> Optional[Step]:
            if low <= k <= high:
                return None
            y = act(c ** (-k), w)
            if atom.hat_V.contains(y):
                return Step(atom.label_word(k), T @ c**k, y)
            return None

        window = range(estimate - ESTIMATE_SPREAD, estimate + ESTIMATE_SPREAD + 1)
        for k in ordered(window, prefer):
            found = admissible(k)
            if found is not None:
                return found
        bound = FALLBACK_FACTOR * max(atom.label_bound, abs(estimate))
        logger.debug(f"exponent estimate {estimate} missed at {atom.center}; scanning up to {bound}")
        for k in ordered(range(-bound, bound + 1), prefer):
            found = admissible(k)
            if found is not None:
                return found
        raise CodingFailedError(f"No label of the parabolic vertex {atom.center} pulls {x} into V^(p)")


@dataclass
class Coding:
    """Generalized coding (g₀, e): vertices z₀ … zₙ and labels α₁ … αₙ."""

    point: BoundaryPoint
    g0: str
    vertices: list[int]
    labels: list[str]
    kind: CodingKind
    cap: int = DEFAULT_CAP
    prefer: Preference = Preference.LOWEST

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def is_parabolic(self) -> bool:
        return self.kind == CodingKind.PARABOLIC

    def edges(self) -> list[tuple[int, int, str]]:
        return [(self.vertices[k], self.vertices[k + 1], self.labels[k]) for k in range(len(self.labels))]

    def to_dict(self) -> dict:
        return {
            "point": str(self.point),
            "g0": self.g0,
            "vertices": self.vertices,
            "labels": self.labels,
            "kind": self.kind.value,
            "cap": self.cap,
            "prefer": self.prefer.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Coding":
        return cls(
            BoundaryPoint.parse(data["point"]),
            data.get("g0", ""),
            [int(v) for v in data["vertices"]],
            list(data["labels"]),
            CodingKind(data["kind"]),
            int(data.get("cap", DEFAULT_CAP)),
            Preference(data.get("prefer", Preference.LOWEST.value)),
        )


def _choose(rules: CodingRules, x: BoundaryPoint, allowed: Optional[Sequence[int]], prefer: Preference) -> int:
    holders = rules.vertices_containing(x)
    if allowed is not None:
        allowed_set = set(allowed)
        holders = [z for z in holders if z in allowed_set]
    if not holders:
        raise CodingFailedError(f"No admissible vertex contains {x}")
    terminal = [z for z in holders if rules.is_terminal(z, x)]
    if terminal:
        return min(terminal)
    return ordered(holders, prefer)[0]


def code_point(
    point: BoundaryPoint,
    automaton: Automaton,
    cap: int = DEFAULT_CAP,
    g0: str = "",
    prefer: Preference = Preference.LOWEST,
    rules: Optional[CodingRules] = None,
) -> Coding:
    """Run the inductive coding procedure on g₀⁻¹ζ for at most ``cap`` edges.

    Stops exactly when the current point equals the center of a parabolic
    vertex; otherwise the coding is conical and capped.
    """
    rules = rules or StandardRules(automaton)
    prefer = Preference(prefer)
    x = act(rules.rep.evaluate(g0).inverse(), point) if g0 else point
    z = _choose(rules, x, None, prefer)
    vertices, labels = [z], []
    for _ in range(cap):
        if rules.is_terminal(z, x):
            return Coding(point, g0, vertices, labels, CodingKind.PARABOLIC, cap, prefer)
        step = rules.step(z, x, prefer)
        x = step.point
        z = _choose(rules, x, automaton.successors[z], prefer)
        vertices.append(z)
        labels.append(step.label)
    kind = CodingKind.PARABOLIC if rules.is_terminal(z, x) else CodingKind.CONICAL
    if kind == CodingKind.CONICAL:
        logger.debug(f"coding of {point} capped at {cap} steps")
    return Coding(point, g0, vertices, labels, kind, cap, prefer)


@dataclass
class QGSequence:
    """Elements g_k = g₀α₁⋯α_k with their matrices and nested sets g_k·W(z_k)."""

    words: list[str]
    matrices: list[Matrix2]
    vertices: list[int]
    labels: list[str]
    arcs: list[Arc]
    _norms: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_coding(
        cls, coding: Coding, automaton: Automaton, rep: Optional[Representation] = None
    ) -> "QGSequence":
        rep = rep or automaton.cover.rep
        word = reduce(coding.g0)
        matrix = rep.evaluate(coding.g0)
        words, matrices = [word], [matrix]
        for label in coding.labels:
            word = free_reduce(word + reduce(label))
            matrix = matrix @ rep.evaluate(label)
            words.append(word)
            matrices.append(matrix)
        atoms = automaton.atoms
        arcs = [atoms[z].W.image(m) for z, m in zip(coding.vertices, matrices)]
        return cls(words, matrices, list(coding.vertices), list(coding.labels), arcs)

    def __len__(self) -> int:
        return len(self.words)

    def shifted(self, start: int) -> "QGSequence":
        """The generalized coding (g_start, e_{start+1} …)."""
        return QGSequence(
            self.words[start:],
            self.matrices[start:],
            self.vertices[start:],
            self.labels[start:],
            self.arcs[start:],
        )

    def repetitions(self) -> int:
        return max(Counter(self.words).values(), default=0)


class Decoded(NamedTuple):
    point: Optional[BoundaryPoint]
    arc: Arc
    diameter_sq: Number


def decode(coding: Coding, automaton: Automaton) -> Decoded:
    """Exact point ρ₀(g₀α₁⋯αₙ)zₙ for parabolic codings, else the last nested arc."""
    sequence = QGSequence.from_coding(coding, automaton)
    if coding.is_parabolic:
        point = act(sequence.matrices[-1], automaton.atoms[coding.vertices[-1]].center)
        return Decoded(point, Arc.point(point), 0)
    arc = sequence.arcs[-1]
    return Decoded(None, arc, arc.diameter_sq())


def check_nesting(codings: Sequence[Coding], automaton: Automaton) -> list[LemmaCheck]:
    """Proper nesting of g_k·W(z_k) and at most #Z repetitions of any g_k."""
    nesting = LemmaCheck("nesting", "closure of g_{k+1} W(z_{k+1}) properly inside g_k W(z_k)")
    repetition = LemmaCheck("repetition", "no element repeats more than #Z times")
    limit = len(automaton)
    for index, coding in enumerate(codings):
        sequence = QGSequence.from_coding(coding, automaton)
        for k in range(len(sequence) - 1):
            nesting.checked += 1
            outer, inner = sequence.arcs[k], sequence.arcs[k + 1]
            if not outer.contains_arc(inner.closure()) or inner.contains_arc(outer):
                nesting.record({"coding": index, "step": k})
        repetition.checked += 1
        if sequence.repetitions() > limit:
            repetition.record({"coding": index, "count": sequence.repetitions()})
    return [nesting.finish(), repetition.finish()]
