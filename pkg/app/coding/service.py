"""Coding batteries over a point sample and the constants they measure."""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from app.boundary.points import BoundaryPoint, act, chordal_dist_sq
from app.boundary.surds import sqrt_lower
from app.coding.coder import Coding, CodingKind, Preference, QGSequence, check_nesting, code_point, decode
from app.coding.exceptions import CodingError, CodingFailedError, NestingSearchExhaustedError
from app.coding.finitary import GENERATOR_SET, search_N, truncate_to_coder
from app.coding.nesting import NestingCertificate, verify_uniform_nesting
from app.coding.tracking import (
    detect_jumps,
    hausdorff_codings,
    measure_tracking,
    sequence_norms,
    verify_backtracking,
)
from app.cover.automaton import Automaton
from app.cover.constants import EPSILON_SCALE, floor_fraction
from app.cusped.ball import CuspedBall
from app.cusped.lemmas import LemmaCheck
from app.cusped.vertices import CayleyVertex
from app.group.matrices import TransformationType, classify
from app.group.transformations import attracting_repelling
from app.group.words import GENERATORS, INVERSE_LETTER, enumerate_words

logger = logging.getLogger(__name__)

SAFETY_FACTOR = 2


@dataclass
class CodingParameters:
    sample_size: int = 1000
    parabolic_length: int = 3
    cap: int = 64
    pair_count: int = 200
    N_max: int = 32
    K_max: int = 64
    c_nest_sample: int = 256
    word_length: tuple[int, int] = (3, 8)
    F: tuple[str, ...] = GENERATOR_SET
    seed: int = 0


@dataclass
class SamplePoint:
    point: BoundaryPoint
    parabolic: bool
    source: str


def _random_word(rng: np.random.Generator, length: int) -> str:
    letters: list[str] = []
    while len(letters) < length:
        letter = GENERATORS[int(rng.integers(len(GENERATORS)))]
        if letters and INVERSE_LETTER[letters[-1]] == letter:
            continue
        letters.append(letter)
    return "".join(letters)


def sample_points(automaton: Automaton, parameters: CodingParameters) -> list[SamplePoint]:
    """Attracting fixed points of random hyperbolic words, then every ρ₀(g)p₀ with |g| ≤ L."""
    rep = automaton.cover.rep
    p0 = automaton.cover.peripheral.p0
    parabolic: list[SamplePoint] = []
    seen: set[BoundaryPoint] = set()
    for word in enumerate_words(parameters.parabolic_length, GENERATORS):
        q = act(rep.evaluate(word), p0)
        if q not in seen:
            seen.add(q)
            parabolic.append(SamplePoint(q, True, word))

    rng = np.random.default_rng(parameters.seed)
    conical: list[SamplePoint] = []
    low, high = parameters.word_length
    attempts = 0
    while len(conical) + len(parabolic) < parameters.sample_size and attempts < 20 * parameters.sample_size:
        attempts += 1
        word = _random_word(rng, int(rng.integers(low, high + 1)))
        matrix = rep.evaluate(word)
        if classify(matrix) != TransformationType.HYPERBOLIC:
            continue
        point, _ = attracting_repelling(matrix)
        if point not in seen:
            seen.add(point)
            conical.append(SamplePoint(point, False, word))
    return conical + parabolic


@dataclass
class CodingBattery:
    checks: list[LemmaCheck] = field(default_factory=list)
    measured: dict = field(default_factory=dict)
    formulas: dict = field(default_factory=dict)
    certificates: list[NestingCertificate] = field(default_factory=list)
    budget_exhausted: bool = False

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> dict:
        return {
            "checks": [check.to_dict() for check in self.checks],
            "measured": self.measured,
            "formulas": self.formulas,
            "nesting_certificates": [c.to_dict() for c in self.certificates],
            "budget_exhausted": self.budget_exhausted,
        }


def code_sample(
    samples: list[SamplePoint], automaton: Automaton, cap: int
) -> tuple[list[Coding], list[LemmaCheck]]:
    """Code every sample point and check totality and decode consistency."""
    totality = LemmaCheck("totality", "every sampled point has a strict coding; parabolic points finite ones")
    consistency = LemmaCheck("decode", "the coded point lies in the decoded set, exactly for parabolic codings")
    codings = []
    for index, sample in enumerate(samples):
        totality.checked += 1
        try:
            coding = code_point(sample.point, automaton, cap)
        except CodingFailedError as e:
            totality.record({"sample": index, "point": str(sample.point), "error": str(e)})
            continue
        if sample.parabolic and coding.kind != CodingKind.PARABOLIC:
            totality.record({"sample": index, "point": str(sample.point), "error": "parabolic point not terminated"})
        codings.append(coding)
        consistency.checked += 1
        decoded = decode(coding, automaton)
        if coding.is_parabolic:
            if decoded.point != sample.point:
                consistency.record({"sample": index, "decoded": str(decoded.point)})
        elif not decoded.arc.contains(sample.point):
            consistency.record({"sample": index, "arc": str(decoded.arc)})
    logger.info(f"coded {len(codings)} of {len(samples)} points")
    return codings, [totality.finish(), consistency.finish()]


def compute_c_nest(automaton: Automaton, ball: CuspedBall, D1: int, limit: int) -> Fraction:
    """Least c with B̄_{3c}(z) ⊂ f·W(y) over z ∈ f·W(y), |f|_X < D1 (first ``limit`` f in ball order)."""
    atoms = automaton.atoms
    rep = automaton.cover.rep
    centers = [atom.center for atom in atoms]
    angles = np.array([p.angle for p in centers])
    elements = [v for v in ball.vertices_within(D1 - 1) if isinstance(v, CayleyVertex)][:limit]
    best: Optional[Fraction] = None
    for f in elements:
        matrix = rep.evaluate(f.word)
        for atom in atoms:
            arc = atom.W.image(matrix)
            offsets = np.mod(angles - arc.start_angle, math.pi)
            for z in np.flatnonzero(offsets <= arc.angular_length + 1e-9).tolist():
                center = centers[z]
                if not arc.contains(center):
                    continue
                room_sq = min(chordal_dist_sq(center, arc.start), chordal_dist_sq(center, arc.end))
                value = floor_fraction(sqrt_lower(room_sq) / 3, EPSILON_SCALE)
                if best is None or value < best:
                    best = value
    if best is None or best <= 0:
        raise CodingError("No positive nesting constant found")
    return best


def coding_pairs(
    codings: list[Coding],
    sequences: list[QGSequence],
    automaton: Automaton,
    cap: int,
    count: int,
) -> list[tuple[QGSequence, QGSequence]]:
    """The first ``count`` conical codings, each paired with the highest-preference coding of its point."""
    conical = [i for i, coding in enumerate(codings) if not coding.is_parabolic][:count]
    pairs = []
    for i in conical:
        other = code_point(codings[i].point, automaton, cap, prefer=Preference.HIGHEST)
        pairs.append((sequences[i], QGSequence.from_coding(other, automaton)))
    return pairs


def run_coding_battery(
    automaton: Automaton,
    ball: CuspedBall,
    parameters: Optional[CodingParameters] = None,
) -> CodingBattery:
    """Totality, nesting, tracking, backtracking, Hausdorff, jumps, uniform nesting and the coder N."""
    parameters = parameters or CodingParameters()
    constants = automaton.constants
    delta_hat = constants.delta_hat
    battery = CodingBattery()

    samples = sample_points(automaton, parameters)
    codings, checks = code_sample(samples, automaton, parameters.cap)
    battery.checks.extend(checks)
    battery.checks.extend(check_nesting(codings, automaton))
    sequences = [QGSequence.from_coding(coding, automaton) for coding in codings]

    tracking = LemmaCheck("tracking", "sequence elements stay near a geodesic toward the coded point")
    observed = []
    for sequence in sequences:
        result = measure_tracking(sequence, ball)
        tracking.checked += 1
        observed.append(result.R_obs)
        if result.guard_exceeded:
            tracking.details["guard_exceeded"] = tracking.details.get("guard_exceeded", 0) + 1
    R_track = max(1, SAFETY_FACTOR * max(observed, default=0))
    tracking.details["R_obs_max"] = max(observed, default=0)
    battery.checks.append(tracking.finish())

    generalized = LemmaCheck("generalized_tracking", "R_track + |g0| + 2 delta bound for g0 a generator")
    for sample in samples[: min(len(samples), 25)]:
        for g0 in GENERATORS:
            try:
                coding = code_point(sample.point, automaton, parameters.cap, g0=g0)
            except CodingFailedError:
                continue
            generalized.checked += 1
            result = measure_tracking(QGSequence.from_coding(coding, automaton), ball)
            if result.R_obs > R_track + ball.norm(g0).value + 2 * delta_hat:
                generalized.record({"point": str(sample.point), "g0": g0, "R_obs": result.R_obs})
    battery.checks.append(generalized.finish())

    backtracking = LemmaCheck("backtracking", "|g_n| > |g_m| - (3R + 2|g0| + 6 delta) for m < n")
    for index, sequence in enumerate(sequences):
        norms, _ = sequence_norms(sequence, ball)
        inside = [value for value, word in zip(norms, sequence.words) if CayleyVertex(word) in ball]
        backtracking.checked += 1
        report = verify_backtracking(inside, R_track, 0, delta_hat)
        if not report.passed:
            backtracking.record({"coding": index, "violations": report.violations[:3]})
    battery.checks.append(backtracking.finish())

    pairs = coding_pairs(codings, sequences, automaton, parameters.cap, parameters.pair_count)

    distances = [hausdorff_codings(first, second, ball).value for first, second in pairs]
    half = distances[: len(distances) // 2]
    D0 = SAFETY_FACTOR * max(distances, default=0)
    stability = LemmaCheck("D0_stability", "Hausdorff bound unchanged when the sample doubles", checked=1)
    if half and SAFETY_FACTOR * max(half) != D0:
        stability.record({"half": SAFETY_FACTOR * max(half), "full": D0})
    battery.checks.append(stability.finish())

    conical_norms = [ball.norm(atom.label).value for atom in automaton.atoms if not atom.is_parabolic]
    J = SAFETY_FACTOR * max(conical_norms, default=1)
    D1 = D0 + 1
    D2 = J + 2 * D1

    jumps = LemmaCheck("jumps", "large labels are matched through a common parabolic coset")
    for index, (first, second) in enumerate(pairs):
        for match in detect_jumps(first, second, automaton, ball, J, D1):
            jumps.checked += 1
            if not match.matched:
                jumps.record({"pair": index, **match.to_dict()})
    battery.checks.append(jumps.finish())

    c_nest = compute_c_nest(automaton, ball, D1, parameters.c_nest_sample)
    epsilon_prime = floor_fraction(c_nest / 2, EPSILON_SCALE)

    nesting = LemmaCheck("uniform_nesting", "short-words or long-parabolics nesting for same-point pairs")
    for index, (first, second) in enumerate(pairs):
        nesting.checked += 1
        try:
            battery.certificates.append(
                verify_uniform_nesting(
                    first, second, automaton, ball, D1, D2, epsilon_prime, parameters.N_max, parameters.K_max
                )
            )
        except NestingSearchExhaustedError as e:
            battery.budget_exhausted = True
            nesting.record({"pair": index, "error": str(e)})
    battery.checks.append(nesting.finish())

    coder = truncate_to_coder(automaton, D2, ball)
    N_check = LemmaCheck("coder_N", "least N for the truncated coder is stable under sample doubling", checked=1)
    N = None
    try:
        N = search_N(coder, pairs, parameters.F, parameters.N_max)
        N_half = search_N(coder, pairs[: max(1, len(pairs) // 2)], parameters.F, parameters.N_max)
        if N_half != N:
            N_check.record({"half": N_half, "full": N})
    except NestingSearchExhaustedError as e:
        battery.budget_exhausted = True
        N_check.record({"error": str(e)})
    battery.checks.append(N_check.finish())

    constants.R_track = R_track
    constants.D0 = D0
    constants.D1 = D1
    constants.D2 = D2
    constants.J = J
    constants.N = N
    constants.c_nest = c_nest
    constants.epsilon_prime = epsilon_prime
    battery.measured = {
        "R_track": R_track,
        "D0": D0,
        "D1": D1,
        "D2": D2,
        "J": J,
        "N": N,
        "c_nest": str(c_nest),
        "epsilon_prime": str(epsilon_prime),
        "codings": len(codings),
        "pairs": len(pairs),
    }
    C = constants.C or 0
    battery.formulas = {
        "J > 11R' + 2C + 50 delta": 11 * R_track + 2 * C + 50 * delta_hat,
        "backtracking slack 3R + 6 delta": 3 * R_track + 6 * delta_hat,
        "tracking for generalized codings R + |g0| + 2 delta": R_track + 1 + 2 * delta_hat,
    }
    logger.info(f"coding battery: {battery.measured}")
    return battery
