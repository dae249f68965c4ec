"""Perturbation service layer: deformation attempts, selection and the full battery."""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from app.boundary.points import act, chordal_dist
from app.cover.automaton import Automaton
from app.cusped.ball import CuspedBall
from app.cusped.lemmas import LemmaCheck
from app.group.matrices import TransformationType, format_fraction
from app.perturbation.combinatorics import (
    DEFAULT_WORD_LIMIT,
    PerturbedCover,
    build_perturbed_cover,
    check_same_combinatorics,
    check_V_conditions,
)
from app.perturbation.deformation import DEFAULT_CANDIDATES, Deformation, deform
from app.perturbation.exceptions import ParabolicSemiconjugacyError, SameCombinatoricsError
from app.perturbation.parabolic import DEFAULT_EXPONENT_CAP, ParabolicSemiconjugacy, build_phi_p
from app.perturbation.semiconjugacy import (
    DEFAULT_GRID,
    ORACLE_LEVEL,
    Semiconjugacy,
    SemiconjugacyReport,
    grid_points,
    verify_semiconjugacy,
)

logger = logging.getLogger(__name__)

PHI_P_GRID = 1024


@dataclass
class PerturbationParameters:
    candidates: Sequence[Fraction] = DEFAULT_CANDIDATES
    exponent_cap: int = DEFAULT_EXPONENT_CAP
    word_limit: int = DEFAULT_WORD_LIMIT
    grid: int = DEFAULT_GRID
    tol: Optional[float] = None
    sample_count: int = 50
    oracle_level: int = ORACLE_LEVEL
    cap: int = 64
    seed: int = 0


@dataclass
class DeformationAttempt:
    """One candidate t with everything that was built and checked for it."""

    deformation: Deformation
    phi_p: Optional[ParabolicSemiconjugacy] = None
    perturbed: Optional[PerturbedCover] = None
    checks: list[LemmaCheck] = field(default_factory=list)
    error: Optional[str] = None
    measured: dict = field(default_factory=dict)

    @property
    def t(self) -> Fraction:
        return self.deformation.t

    @property
    def certified(self) -> bool:
        return self.error is None and self.perturbed is not None and all(c.passed for c in self.checks)

    @property
    def budget_exhausted(self) -> bool:
        return any(check.details.get("budget_exhausted") for check in self.checks)

    def to_dict(self) -> dict:
        return {
            "deformation": self.deformation.to_dict(),
            "phi_p": self.phi_p.to_dict() if self.phi_p is not None else None,
            "checks": [check.to_dict() for check in self.checks],
            "error": self.error,
            "measured": self.measured,
            "certified": self.certified,
            "budget_exhausted": self.budget_exhausted,
        }


def check_phi_p(phi_p: ParabolicSemiconjugacy, epsilon: Fraction, grid: int = PHI_P_GRID) -> list[LemmaCheck]:
    """Exact equivariance under the cusp generators, constancy on Ā and ε-closeness of φ_p."""
    equivariance = LemmaCheck("phi_p_equivariance", "phi_p(rho_t(c)x) = rho_0(c)phi_p(x) on orbit grid points")
    constant = LemmaCheck("phi_p_collapse", "phi_p is p0 on the collapsed arc")
    closeness = LemmaCheck("phi_p_closeness", "d(x, phi_p(x)) < eps on the grid")

    points = grid_points(grid)
    worst = 0.0
    for x in points:
        value = phi_p(x)
        closeness.checked += 1
        distance = chordal_dist(x, value)
        worst = max(worst, distance)
        if not distance < float(epsilon):
            closeness.record({"x": str(x), "distance": distance})

        k = phi_p.locate(x) if not phi_p.is_identity and not phi_p.collapsed.contains(x) else None
        if k is None or abs(k) >= phi_p.exponent_cap:
            continue
        equivariance.checked += 1
        moved = phi_p(act(phi_p.c_t, x))
        expected = act(phi_p.c_0, value)
        if moved != expected:
            equivariance.record({"x": str(x), "k": k, "got": str(moved), "expected": str(expected)})

    A = phi_p.collapsed
    for x in (A.start,) if A.is_point else (A.start, A.end, A.interior_point()):
        constant.checked += 1
        if phi_p(x) != phi_p.p0:
            constant.record({"x": str(x)})
    closeness.details["max_distance"] = worst
    return [equivariance.finish(), constant.finish(), closeness.finish()]


def attempt_deformation(
    automaton: Automaton,
    ball: CuspedBall,
    t: Union[Fraction, int, str],
    parameters: Optional[PerturbationParameters] = None,
    diagnose: bool = False,
) -> DeformationAttempt:
    """Build φ_p and the perturbed cover for ρ_t, then run same-combinatorics and V1–V4.

    With ``diagnose`` an oversized collapsed arc is recorded as the error of
    the attempt and the checks still run, so their witnesses show what breaks.
    """
    parameters = parameters or PerturbationParameters()
    cover = automaton.cover
    attempt = DeformationAttempt(deform(t))

    def build(enforce_size: bool) -> ParabolicSemiconjugacy:
        return build_phi_p(
            attempt.deformation.rep,
            cover.peripheral,
            cover.shape.fundamental,
            automaton.epsilon,
            parameters.exponent_cap,
            enforce_size,
        )

    try:
        phi_p = build(True)
    except ParabolicSemiconjugacyError as e:
        logger.warning(f"t={attempt.t}: no semi-conjugacy of the cusp action: {e}")
        attempt.error = str(e)
        if e.measured is not None:
            attempt.measured["collapsed_diameter"] = e.measured
        if not diagnose or e.measured is None:
            return attempt
        try:
            phi_p = build(False)
        except ParabolicSemiconjugacyError as again:
            logger.warning(f"t={attempt.t}: diagnostic build failed too: {again}")
            return attempt

    attempt.phi_p = phi_p
    attempt.measured["collapsed_diameter"] = phi_p.diameter
    attempt.checks.extend(check_phi_p(phi_p, automaton.epsilon))
    perturbed = build_perturbed_cover(automaton, phi_p)
    attempt.perturbed = perturbed
    combinatorics = check_same_combinatorics(perturbed)
    attempt.checks.extend(combinatorics)
    attempt.checks.extend(
        check_V_conditions(perturbed, ball, automaton.constants, combinatorics, parameters.word_limit)
    )
    failing = [check.name for check in attempt.checks if not check.passed]
    if failing:
        logger.info(f"t={attempt.t}: failing {', '.join(failing)}")
    else:
        logger.info(f"t={attempt.t}: same combinatorics and V1-V4 hold")
    return attempt


def select_deformation(
    automaton: Automaton,
    ball: CuspedBall,
    parameters: Optional[PerturbationParameters] = None,
) -> tuple[DeformationAttempt, list[DeformationAttempt]]:
    """The largest candidate t whose deformation passes every check, with all attempts made.

    Raises SameCombinatoricsError when no candidate passes.
    """
    parameters = parameters or PerturbationParameters()
    attempts = []
    for t in sorted((Fraction(t) for t in parameters.candidates), reverse=True):
        attempt = attempt_deformation(automaton, ball, t, parameters)
        attempts.append(attempt)
        if attempt.certified and attempt.deformation.commutator == TransformationType.HYPERBOLIC:
            logger.info(f"deformation chosen: t = {format_fraction(t)}")
            return attempt, attempts
    raise SameCombinatoricsError(
        f"None of t in {[format_fraction(Fraction(t)) for t in parameters.candidates]} keeps the combinatorics",
        attempts=attempts,
    )


@dataclass
class PerturbationBattery:
    attempts: list[DeformationAttempt] = field(default_factory=list)
    chosen: Optional[DeformationAttempt] = None
    semiconjugacy: Optional[SemiconjugacyReport] = None
    error: Optional[str] = None

    @property
    def checks(self) -> list[LemmaCheck]:
        checks = list(self.chosen.checks) if self.chosen is not None else []
        if self.semiconjugacy is not None:
            checks.extend(self.semiconjugacy.checks)
        return checks

    @property
    def certified(self) -> bool:
        return (
            self.error is None
            and self.chosen is not None
            and self.semiconjugacy is not None
            and all(check.passed for check in self.checks)
        )

    @property
    def budget_exhausted(self) -> bool:
        """A word sweep ran out of budget, for the chosen deformation or every attempt."""
        if self.chosen is not None:
            return self.chosen.budget_exhausted
        return bool(self.attempts) and all(attempt.budget_exhausted for attempt in self.attempts)

    def to_dict(self) -> dict:
        return {
            "chosen_t": format_fraction(self.chosen.t) if self.chosen is not None else None,
            "attempts": [attempt.to_dict() for attempt in self.attempts],
            "semiconjugacy": self.semiconjugacy.to_dict() if self.semiconjugacy is not None else None,
            "error": self.error,
            "certified": self.certified,
        }


def run_perturbation_battery(
    automaton: Automaton,
    ball: CuspedBall,
    parameters: Optional[PerturbationParameters] = None,
    fixed_t: Optional[Fraction] = None,
) -> PerturbationBattery:
    """Choose (or take) a deformation, then build and verify the semi-conjugacy φ.

    With ``fixed_t`` only that deformation is tried; a failure is recorded in
    the battery instead of raised, which is how negative controls run.
    """
    parameters = parameters or PerturbationParameters()
    battery = PerturbationBattery()
    if fixed_t is not None:
        attempt = attempt_deformation(automaton, ball, fixed_t, parameters, diagnose=True)
        battery.attempts.append(attempt)
        if attempt.deformation.commutator != TransformationType.HYPERBOLIC and attempt.t != 0:
            battery.error = attempt.error or f"commutator is {attempt.deformation.commutator.value}"
            return battery
        if not attempt.certified:
            battery.error = attempt.error or "deformation fails the combinatorics checks"
            battery.chosen = attempt if attempt.perturbed is not None else None
            return battery
        battery.chosen = attempt
    else:
        try:
            battery.chosen, battery.attempts = select_deformation(automaton, ball, parameters)
        except SameCombinatoricsError as e:
            logger.error(f"deformation selection failed: {e}", exc_info=True)
            battery.error = str(e)
            battery.attempts = e.attempts
            return battery

    semiconjugacy = Semiconjugacy(battery.chosen.perturbed, parameters.cap)
    battery.semiconjugacy = verify_semiconjugacy(
        semiconjugacy,
        grid=parameters.grid,
        tol=parameters.tol,
        sample_count=parameters.sample_count,
        oracle_level=parameters.oracle_level,
        seed=parameters.seed,
    )
    grid = battery.semiconjugacy.measured
    logger.info(
        f"phi at t={battery.chosen.t}: closeness {grid['closeness_max']:.3g}, "
        f"degree {grid['degree']}, max jump {grid['max_jump']:.3g} (eps {float(automaton.epsilon):.3g})"
    )
    return battery
