"""Geodesic tracking, backtracking, Hausdorff distance and jump matching of codings."""
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

from app.coding.coder import QGSequence
from app.cover.automaton import Automaton
from app.cusped.ball import CuspedBall
from app.cusped.vertices import CayleyVertex
from app.group.words import inverse_word, peripheral_coset_decompose, reduce

logger = logging.getLogger(__name__)


def element_distance(ball: CuspedBall, g: str, h: str) -> tuple[int, bool]:
    """d_X(g, h) = |g⁻¹h|_X, exact when g⁻¹h lies in the ball."""
    result = ball.norm(inverse_word(g) + h)
    return result.value, result.exact


@dataclass
class TrackingResult:
    R_obs: int
    checked: int
    endpoint: str
    guard_exceeded: bool

    def to_dict(self) -> dict:
        return {
            "R_obs": self.R_obs,
            "checked": self.checked,
            "endpoint": self.endpoint,
            "guard_exceeded": self.guard_exceeded,
        }


def measure_tracking(sequence: QGSequence, ball: CuspedBall) -> TrackingResult:
    """Largest distance from an in-ball g_k to a geodesic from 1 to the deepest in-ball g_k."""
    inside = [k for k, word in enumerate(sequence.words) if CayleyVertex(word) in ball]
    guard_exceeded = len(inside) < len(sequence.words)
    if guard_exceeded:
        logger.warning(f"{len(sequence.words) - len(inside)} sequence elements lie outside the ball")
    if not inside:
        return TrackingResult(0, 0, "", True)
    deepest = max(inside, key=lambda k: ball.norm_of(CayleyVertex(sequence.words[k])))
    endpoint = CayleyVertex(sequence.words[deepest])
    geodesic = ball.geodesic(CayleyVertex(""), endpoint)
    targets = set(geodesic.vertices)

    R_obs = 0
    for k in inside:
        if k > deepest:
            continue
        d = ball.distance_to_set(CayleyVertex(sequence.words[k]), targets, cutoff=2 * ball.radius)
        if d is None:
            guard_exceeded = True
            continue
        R_obs = max(R_obs, d)
    return TrackingResult(R_obs, len(inside), endpoint.word, guard_exceeded)


@dataclass
class BacktrackingReport:
    passed: bool
    bound: int
    slack: int
    violations: list[tuple[int, int]] = field(default_factory=list)


def verify_backtracking(
    norms: Sequence[int], R_track: int, g0_norm: int, delta_hat: int
) -> BacktrackingReport:
    """|g_n|_X > |g_m|_X − (3R + 2|g₀|_X + 6δ̂) for every m < n."""
    bound = 3 * R_track + 2 * g0_norm + 6 * delta_hat
    violations = []
    slack = bound
    running_max: Optional[int] = None
    for n, value in enumerate(norms):
        if running_max is not None:
            margin = value - (running_max - bound)
            slack = min(slack, margin)
            if margin <= 0:
                violations.append((norms.index(running_max), n))
        running_max = value if running_max is None else max(running_max, value)
    return BacktrackingReport(not violations, bound, slack, violations)


def sequence_norms(sequence: QGSequence, ball: CuspedBall) -> tuple[list[int], bool]:
    results = [ball.norm(word) for word in sequence.words]
    return [r.value for r in results], all(r.exact for r in results)


@dataclass
class HausdorffResult:
    value: int
    exact: bool
    horizon: int


def _one_sided(
    ball: CuspedBall, first: Sequence[str], second: Sequence[str], horizon: int
) -> tuple[int, bool]:
    worst, exact = 0, True
    for g in first[:horizon]:
        best, best_exact = None, True
        for h in second:
            d, is_exact = element_distance(ball, g, h)
            if best is None or d < best:
                best, best_exact = d, is_exact
        worst = max(worst, best or 0)
        exact = exact and best_exact
    return worst, exact


def hausdorff_codings(
    first: QGSequence, second: QGSequence, ball: CuspedBall, horizon: Optional[int] = None
) -> HausdorffResult:
    """Hausdorff distance of {g_k} and {h_k}, each side scanned up to ``horizon``.

    Truncated codings end at unrelated depths, so by default only the first
    half of each sequence is matched against the whole other sequence.
    """
    if first.words == second.words:
        return HausdorffResult(0, True, len(first.words))
    horizon = horizon or max(1, min(len(first), len(second)) // 2)
    forward = _one_sided(ball, first.words, second.words, horizon)
    backward = _one_sided(ball, second.words, first.words, horizon)
    return HausdorffResult(max(forward[0], backward[0]), forward[1] and backward[1], horizon)


def same_peripheral_coset(x: str, y: str) -> bool:
    """x⁻¹y ∈ ⟨c⟩."""
    return peripheral_coset_decompose(inverse_word(x) + y).rep == ""


@dataclass
class JumpMatch:
    n: int
    m: Optional[int]
    label_norm: int
    coset_verified: bool = False

    @property
    def matched(self) -> bool:
        return self.m is not None and self.coset_verified

    def to_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "label_norm": self.label_norm, "coset_verified": self.coset_verified}


def detect_jumps(
    first: QGSequence,
    second: QGSequence,
    automaton: Automaton,
    ball: CuspedBall,
    J: int,
    D1: int,
) -> list[JumpMatch]:
    """For each label |α_n|_X > J, a matching m with close endpoints through a common parabolic."""
    atoms = automaton.atoms
    matches = []
    for n in range(1, len(first)):
        label_norm = ball.norm(first.labels[n - 1]).value
        if label_norm <= J:
            continue
        match = JumpMatch(n, None, label_norm)
        source = atoms[first.vertices[n - 1]]
        for m in range(1, len(second)):
            target = atoms[second.vertices[m - 1]]
            if not (source.is_parabolic and target.is_parabolic):
                continue
            if element_distance(ball, first.words[n - 1], second.words[m - 1])[0] >= D1:
                continue
            if element_distance(ball, first.words[n], second.words[m])[0] >= D1:
                continue
            anchors = [
                reduce(first.words[n - 1] + source.coset_rep),
                reduce(second.words[m - 1] + target.coset_rep),
                first.words[n],
                second.words[m],
            ]
            match.m = m
            match.coset_verified = all(same_peripheral_coset(anchors[0], other) for other in anchors[1:])
            if match.coset_verified:
                break
        if not match.matched:
            logger.warning(f"jump at n={n} (|alpha|={label_norm}) has no verified match")
        matches.append(match)
    return matches
