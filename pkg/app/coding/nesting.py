"""Uniform nesting certificates for two codings of one point."""
import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from app.boundary.arcs import Arc
from app.coding.coder import QGSequence
from app.coding.exceptions import NestingSearchExhaustedError
from app.coding.tracking import element_distance
from app.cover.automaton import Automaton
from app.cusped.ball import CuspedBall
from app.group.matrices import format_fraction

logger = logging.getLogger(__name__)

DEFAULT_N_MAX = 32
DEFAULT_K_MAX = 64


class NestingVariant(str, enum.Enum):
    SHORT_WORDS = "short_words"
    LONG_PARABOLICS = "long_parabolics"


@dataclass
class NestingCertificate:
    variant: NestingVariant
    pairs: list[tuple[int, int]]
    D1: int
    N: Optional[int] = None
    M: Optional[int] = None
    D2: Optional[int] = None
    epsilon_prime: Optional[Fraction] = None
    containments: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "N": self.N,
            "M": self.M,
            "D1": self.D1,
            "D2": self.D2,
            "epsilon_prime": None if self.epsilon_prime is None else format_fraction(self.epsilon_prime),
            "pairs": [list(pair) for pair in self.pairs],
            "containments": self.containments,
        }


class _PairTables:
    """Cached distances, label norms and closed nested arcs of one coding pair."""

    def __init__(self, first: QGSequence, second: QGSequence, ball: CuspedBall, K_max: int):
        self.first = first
        self.second = second
        self.ball = ball
        self.last = min(len(first) - 1, K_max)
        self._distances: dict[tuple[int, int], int] = {}
        self._closed: dict[int, Arc] = {}
        self._contained: dict[tuple[int, int], bool] = {}

    def distance(self, n: int, m: int) -> int:
        key = (n, m)
        if key not in self._distances:
            self._distances[key] = element_distance(self.ball, self.first.words[n], self.second.words[m])[0]
        return self._distances[key]

    def label_norm(self, n: int) -> int:
        return self.ball.norm(self.first.labels[n - 1]).value

    def close_indices(self, n: int, D1: int) -> list[int]:
        return [m for m in range(len(self.second)) if self.distance(n, m) <= D1]

    def nested(self, deep: int, m: int) -> bool:
        """g_deep · closure W(z_deep) ⊂ h_m · W(y_m)."""
        key = (deep, m)
        if key not in self._contained:
            if deep not in self._closed:
                self._closed[deep] = self.first.arcs[deep].closure()
            self._contained[key] = self.second.arcs[m].contains_arc(self._closed[deep])
        return self._contained[key]


def _short_words(tables: _PairTables, D1: int, D2: int, N: int, M: int) -> Optional[NestingCertificate]:
    pairs, containments = [], []
    n = M + 1
    while n + N <= tables.last:
        if tables.label_norm(n) > D2:
            return None
        witness = next((m for m in tables.close_indices(n, D1) if tables.nested(n + N, m)), None)
        if witness is None:
            return None
        pairs.append((n, witness))
        containments.append({"deep": n + N, "outer": witness, "distance": tables.distance(n, witness)})
        n += 1
    if not pairs:
        return None
    return NestingCertificate(NestingVariant.SHORT_WORDS, pairs, D1, N, M, D2, containments=containments)


def _long_parabolics(
    tables: _PairTables, automaton: Automaton, D1: int, epsilon_prime: Fraction
) -> Optional[NestingCertificate]:
    atoms = automaton.atoms
    epsilon = automaton.epsilon
    rep = automaton.cover.rep
    pairs, containments = [], []
    for n in range(1, tables.last):
        atom = atoms[tables.first.vertices[n]]
        if not atom.is_parabolic:
            continue
        following = atoms[tables.first.vertices[n + 1]]
        contracted = following.W.neighborhood(epsilon, outward=True).image(rep.evaluate(tables.first.labels[n]))
        if not Arc.ball(atom.center, epsilon_prime).contains_arc(contracted):
            continue
        collar = Arc.closed_ball(atom.center, 3 * epsilon_prime).image(tables.first.matrices[n])
        witness = next(
            (m for m in tables.close_indices(n, D1) if tables.second.arcs[m].contains_arc(collar)),
            None,
        )
        if witness is None:
            continue
        pairs.append((n, witness))
        containments.append({"parabolic_index": n, "outer": witness, "center": str(atom.center)})
    if not pairs:
        return None
    return NestingCertificate(
        NestingVariant.LONG_PARABOLICS, pairs, D1, epsilon_prime=epsilon_prime, containments=containments
    )


def verify_uniform_nesting(
    first: QGSequence,
    second: QGSequence,
    automaton: Automaton,
    ball: CuspedBall,
    D1: int,
    D2: int,
    epsilon_prime: Fraction,
    N_max: int = DEFAULT_N_MAX,
    K_max: int = DEFAULT_K_MAX,
    M_max: Optional[int] = None,
) -> NestingCertificate:
    """Search the short-words witness (least N, then least M) and fall back to long parabolics.

    Every claim is restricted to indices up to K_max; the certificate lists
    each verified containment.
    """
    tables = _PairTables(first, second, ball, K_max)
    M_max = tables.last if M_max is None else M_max
    for N in range(1, N_max + 1):
        for M in range(0, M_max + 1):
            if M + 1 + N > tables.last:
                break
            certificate = _short_words(tables, D1, D2, N, M)
            if certificate is not None:
                logger.debug(f"short-words nesting with N={N}, M={M}")
                return certificate
    certificate = _long_parabolics(tables, automaton, D1, epsilon_prime)
    if certificate is not None:
        return certificate
    raise NestingSearchExhaustedError(
        f"No nesting witness with N <= {N_max} within the first {tables.last} indices", N_max
    )
