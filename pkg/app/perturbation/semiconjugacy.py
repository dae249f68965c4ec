"""The semi-conjugacy φ from ρ_t to ρ₀, its fiber map Φ and their verification."""
import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from app.boundary.arcs import Arc
from app.boundary.points import BoundaryPoint, act, chordal_dist
from app.coding.coder import DEFAULT_CAP, Coding, Preference, QGSequence, code_point, decode
from app.coding.exceptions import CodingFailedError
from app.coding.service import CodingParameters, sample_points
from app.cover.constants import point_at_angle
from app.cusped.lemmas import LemmaCheck
from app.group.transformations import attracting_repelling
from app.group.words import GENERATORS, enumerate_words
from app.perturbation.combinatorics import PerturbedCover
from app.perturbation.rho_coding import RhoRules, rho_code_point

logger = logging.getLogger(__name__)

DEFAULT_GRID = 2048
EQUIVARIANCE_POINTS = 256
ORACLE_LEVEL = 8
ORACLE_FACTOR = 3


def _diameter(arc: Arc) -> float:
    return math.sqrt(float(arc.diameter_sq()))


@dataclass(frozen=True)
class PhiValue:
    """φ(x) lies in ``arc``; ``point`` is a representative of it."""

    x: BoundaryPoint
    point: BoundaryPoint
    arc: Arc
    exact: bool
    radius: float


@dataclass(frozen=True)
class FiberValue:
    zeta: BoundaryPoint
    arc: Arc
    coding: Coding

    @property
    def exact(self) -> bool:
        return self.coding.is_parabolic


class Semiconjugacy:
    """Pointwise evaluator of φ through ρ-codings decoded under ρ₀."""

    def __init__(self, perturbed: PerturbedCover, cap: int = DEFAULT_CAP):
        self.perturbed = perturbed
        self.automaton = perturbed.automaton
        self.cap = cap
        self.rules = RhoRules(perturbed)
        self.rep_t = perturbed.rep
        self.rep_0 = self.automaton.cover.rep

    @property
    def epsilon(self):
        return self.automaton.epsilon

    def __call__(self, x: BoundaryPoint) -> PhiValue:
        return evaluate_phi(self, x)

    def fiber(self, zeta: BoundaryPoint, prefer: Preference = Preference.LOWEST) -> FiberValue:
        return compute_Phi(self, zeta, prefer)


def evaluate_phi(semiconjugacy: Semiconjugacy, x: BoundaryPoint) -> PhiValue:
    """φ(x) = the ρ₀-decoding of the ρ-coding of x."""
    coding = rho_code_point(x, semiconjugacy.perturbed, semiconjugacy.cap, rules=semiconjugacy.rules)
    decoded = decode(coding, semiconjugacy.automaton)
    if coding.is_parabolic:
        return PhiValue(x, decoded.point, Arc.point(decoded.point), True, 0.0)
    arc = decoded.arc
    return PhiValue(x, arc.interior_point(), arc, False, math.sqrt(float(decoded.diameter_sq)))


def compute_Phi(
    semiconjugacy: Semiconjugacy, zeta: BoundaryPoint, prefer: Preference = Preference.LOWEST
) -> FiberValue:
    """Φ(ζ): ρ(g_n)·closure W(z_n) for a capped conical coding, ρ(g_n)φ_{z_n}⁻¹(z_n) for a parabolic one."""
    automaton = semiconjugacy.automaton
    coding = code_point(zeta, automaton, semiconjugacy.cap, prefer=prefer)
    sequence = QGSequence.from_coding(coding, automaton, rep=semiconjugacy.rep_t)
    if coding.is_parabolic:
        arc = semiconjugacy.perturbed.fibers[coding.vertices[-1]].image(sequence.matrices[-1])
    else:
        arc = sequence.arcs[-1].closure()
    return FiberValue(zeta, arc, coding)


@dataclass
class CollapseOracle:
    """Monotone map collapsing finitely many orbit arcs of Ā, pinned at matched fixed points.

    Away from the collapsed arcs the circle is reparameterized by normalized
    complementary length.
    """

    starts: np.ndarray
    ends: np.ndarray
    pin_source: float
    pin_target: float
    max_diameter: float
    arcs: int

    @property
    def free_length(self) -> float:
        return math.pi - float(np.sum(self.ends - self.starts))

    def __call__(self, angles: np.ndarray) -> np.ndarray:
        offsets = np.mod(np.asarray(angles, dtype=float) - self.pin_source, math.pi)
        covered = np.clip(offsets[:, None] - self.starts[None, :], 0.0, (self.ends - self.starts)[None, :]).sum(axis=1)
        return np.mod(self.pin_target + math.pi * (offsets - covered) / self.free_length, math.pi)


def _merge(intervals: list[tuple[float, float]]) -> tuple[np.ndarray, np.ndarray]:
    merged: list[list[float]] = []
    for start, end in sorted(intervals):
        if merged and start <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], end)
        else:
            merged.append([start, end])
    if not merged:
        return np.zeros(0), np.zeros(0)
    array = np.array(merged)
    return array[:, 0], array[:, 1]


def oracle_collapse_map(perturbed: PerturbedCover, level: int = ORACLE_LEVEL) -> CollapseOracle:
    """Collapse ρ_t(g)Ā for |g| ≤ level; pinned at the attracting fixed points of ρ_t(a) and ρ₀(a)."""
    rep_t = perturbed.rep
    rep_0 = perturbed.automaton.cover.rep
    collapsed = perturbed.phi_p.collapsed
    pin_source = attracting_repelling(rep_t.evaluate("a"))[0].angle
    pin_target = attracting_repelling(rep_0.evaluate("a"))[0].angle

    intervals: list[tuple[float, float]] = []
    max_diameter = 0.0
    count = 0
    for word in enumerate_words(level, GENERATORS):
        arc = collapsed.image(rep_t.evaluate(word))
        count += 1
        max_diameter = max(max_diameter, _diameter(arc))
        start = (arc.start_angle - pin_source) % math.pi
        end = start + arc.angular_length
        if end <= math.pi:
            intervals.append((start, end))
        else:
            intervals.extend([(start, math.pi), (0.0, end - math.pi)])
    starts, ends = _merge(intervals)
    logger.info(f"collapse oracle: {count} arcs, {len(starts)} merged, max diameter {max_diameter:.3g}")
    return CollapseOracle(starts, ends, pin_source, pin_target, max_diameter, count)


@dataclass
class SemiconjugacyReport:
    checks: list[LemmaCheck] = field(default_factory=list)
    measured: dict = field(default_factory=dict)
    oracle: dict = field(default_factory=dict)
    values: list[PhiValue] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [check.to_dict() for check in self.checks],
            "measured": self.measured,
            "oracle": self.oracle,
        }


def write_phi_csv(values: Sequence[PhiValue], path: Path) -> None:
    """Rows of (x, φ(x)) as points and angles, for plotting."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["x", "x_angle", "phi", "phi_angle", "exact", "radius"])
        for value in values:
            writer.writerow(
                [str(value.x), f"{value.x.angle:.12f}", str(value.point), f"{value.point.angle:.12f}", value.exact, f"{value.radius:.3e}"]
            )


def grid_points(size: int) -> list[BoundaryPoint]:
    return [point_at_angle(k * math.pi / size) for k in range(size)]


def _check_grid(values: list[PhiValue], epsilon: float, tol: float) -> tuple[list[LemmaCheck], dict]:
    closeness = LemmaCheck("closeness", "d(x, phi(x)) < eps on the grid")
    monotone = LemmaCheck("monotone_degree_one", "phi is weakly monotone of degree one on the sorted grid", checked=1)
    continuity = LemmaCheck("continuity", "grid neighbours map less than 3 eps apart")

    worst = 0.0
    for index, value in enumerate(values):
        closeness.checked += 1
        distance = chordal_dist(value.x, value.point) + value.radius
        worst = max(worst, distance)
        if not distance < epsilon:
            closeness.record({"index": index, "x": str(value.x), "distance": distance})

    angles = np.array([value.point.angle for value in values])
    radii = np.array([value.radius for value in values])
    steps = np.mod(np.roll(angles, -1) - angles, math.pi)
    slack = radii + np.roll(radii, -1) + tol
    backward = (steps > math.pi / 2) & (math.pi - steps > slack)
    for index in np.flatnonzero(backward).tolist()[:10]:
        monotone.record({"index": index, "step": float(steps[index] - math.pi)})
    forward = np.where(steps > math.pi / 2, 0.0, steps)
    degree = round(float(forward.sum()) / math.pi)
    if degree != 1:
        monotone.record({"degree": degree})

    jumps = np.abs(np.sin(steps))
    continuity.checked = len(values)
    for index in np.flatnonzero(jumps >= 3 * epsilon).tolist():
        continuity.record({"index": index, "jump": float(jumps[index])})

    measured = {
        "closeness_max": worst,
        "degree": degree,
        "max_jump": float(jumps.max(initial=0.0)),
        "max_radius": float(radii.max(initial=0.0)),
    }
    return [closeness.finish(), monotone.finish(), continuity.finish()], measured


def _check_equivariance(
    semiconjugacy: Semiconjugacy, values: list[PhiValue], tol: float
) -> tuple[LemmaCheck, float]:
    check = LemmaCheck("phi_equivariance", "phi(rho_t(s)x) = rho_0(s)phi(x) within tolerance")
    stride = max(1, len(values) // EQUIVARIANCE_POINTS)
    worst = 0.0
    for value in values[::stride]:
        for s in GENERATORS:
            moved = semiconjugacy(act(semiconjugacy.rep_t.evaluate(s), value.x))
            M0 = semiconjugacy.rep_0.evaluate(s)
            target = act(M0, value.point)
            allowance = tol + moved.radius + (_diameter(value.arc.image(M0)) if not value.exact else 0.0)
            defect = chordal_dist(moved.point, target)
            check.checked += 1
            worst = max(worst, defect - allowance)
            if defect > allowance:
                check.record({"x": str(value.x), "s": s, "defect": defect, "allowance": allowance})
    return check.finish(), worst


def _check_collapsed(semiconjugacy: Semiconjugacy, length: int = 2) -> LemmaCheck:
    """φ is constant ρ₀(g)p₀ on ρ_t(g)Ā, and φ(p₀) = p₀."""
    check = LemmaCheck("collapsed_arcs", "phi maps rho_t(g) A to rho_0(g) p0")
    phi_p = semiconjugacy.perturbed.phi_p
    p0 = phi_p.p0
    for word in enumerate_words(length, GENERATORS):
        arc = phi_p.collapsed.image(semiconjugacy.rep_t.evaluate(word))
        expected = act(semiconjugacy.rep_0.evaluate(word), p0)
        for x in (arc.start,) if arc.is_point else (arc.start, arc.end, arc.interior_point()):
            check.checked += 1
            try:
                value = semiconjugacy(x)
            except CodingFailedError as e:
                check.record({"word": word, "x": str(x), "error": str(e)})
                continue
            if not value.exact or value.point != expected:
                check.record({"word": word, "x": str(x), "phi": str(value.point), "expected": str(expected)})
    return check.finish()


def _check_fibers(semiconjugacy: Semiconjugacy, sample: Sequence[BoundaryPoint]) -> list[LemmaCheck]:
    epsilon = semiconjugacy.epsilon
    automaton = semiconjugacy.automaton
    containment = LemmaCheck("fiber_containment", "zeta and Phi(zeta) lie in W(z_0)")
    equivariance = LemmaCheck("fiber_equivariance", "rho(s)Phi(zeta) meets Phi(rho_0(s)zeta), both small")
    well_defined = LemmaCheck("fiber_well_defined", "two codings give intersecting Phi arcs")
    disjoint = LemmaCheck("fiber_disjoint", "points more than 2 eps apart have disjoint Phi arcs")

    fibers = []
    for zeta in sample:
        try:
            value = semiconjugacy.fiber(zeta)
        except CodingFailedError as e:
            containment.record({"zeta": str(zeta), "error": str(e)})
            continue
        fibers.append(value)
        W = automaton.atoms[value.coding.vertices[0]].W
        containment.checked += 1
        if not (W.contains(zeta) and W.closure().contains_arc(value.arc)):
            containment.record({"zeta": str(zeta), "vertex": value.coding.vertices[0]})

        well_defined.checked += 1
        try:
            other = semiconjugacy.fiber(zeta, Preference.HIGHEST)
        except CodingFailedError as e:
            well_defined.record({"zeta": str(zeta), "error": str(e)})
        else:
            if not value.arc.intersects(other.arc):
                well_defined.record({"zeta": str(zeta)})

        for s in GENERATORS:
            equivariance.checked += 1
            try:
                moved = semiconjugacy.fiber(act(semiconjugacy.rep_0.evaluate(s), zeta))
            except CodingFailedError as e:
                equivariance.record({"zeta": str(zeta), "s": s, "error": str(e)})
                continue
            image = value.arc.image(semiconjugacy.rep_t.evaluate(s))
            small = image.diameter_sq() < 4 * epsilon * epsilon and moved.arc.diameter_sq() < 4 * epsilon * epsilon
            if not (small and image.intersects(moved.arc)):
                equivariance.record({"zeta": str(zeta), "s": s})

    for i, first in enumerate(fibers):
        for second in fibers[i + 1 :]:
            if chordal_dist(first.zeta, second.zeta) <= 2 * float(epsilon):
                continue
            disjoint.checked += 1
            if first.arc.intersects(second.arc):
                disjoint.record({"first": str(first.zeta), "second": str(second.zeta)})
    return [check.finish() for check in (containment, equivariance, well_defined, disjoint)]


def verify_semiconjugacy(
    semiconjugacy: Semiconjugacy,
    grid: int = DEFAULT_GRID,
    tol: Optional[float] = None,
    sample_count: int = 50,
    oracle_level: int = ORACLE_LEVEL,
    seed: int = 0,
) -> SemiconjugacyReport:
    """Equivariance, ε-closeness, monotonicity, fiber checks and the collapse-oracle comparison."""
    tol = 10 * math.pi / grid if tol is None else tol
    epsilon = float(semiconjugacy.epsilon)
    report = SemiconjugacyReport()

    points = grid_points(grid)
    values = []
    failures = LemmaCheck("phi_totality", "every grid point has a rho-coding")
    for x in points:
        failures.checked += 1
        try:
            values.append(semiconjugacy(x))
        except CodingFailedError as e:
            failures.record({"x": str(x), "error": str(e)})
    report.values = values
    report.checks.append(failures.finish())

    grid_checks, measured = _check_grid(values, epsilon, tol)
    report.checks.extend(grid_checks)
    equivariance, defect = _check_equivariance(semiconjugacy, values, tol)
    report.checks.append(equivariance)
    report.checks.append(_check_collapsed(semiconjugacy))

    parameters = CodingParameters(sample_size=sample_count, parabolic_length=1, seed=seed)
    sample = [s.point for s in sample_points(semiconjugacy.automaton, parameters)][:sample_count]
    report.checks.extend(_check_fibers(semiconjugacy, sample))

    report.measured = {
        **measured,
        "grid": grid,
        "tol": tol,
        "epsilon": epsilon,
        "equivariance_excess": defect,
        "phi_p_collapsed_diameter": semiconjugacy.perturbed.phi_p.diameter,
    }

    oracle_check, report.oracle = _check_oracle(semiconjugacy, values, oracle_level, tol)
    report.checks.append(oracle_check)
    logger.info(f"semiconjugacy for t={semiconjugacy.rep_t.t}: {'passed' if report.passed else 'failed'}")
    return report


def _check_oracle(
    semiconjugacy: Semiconjugacy, values: list[PhiValue], level: int, tol: float
) -> tuple[LemmaCheck, dict]:
    """Sup distance from φ to the arc-collapse oracle below 3× the largest collapsed diameter.

    Each φ value only locates φ(x) within its radius, which is deducted from
    the distance. Without a collapsed arc the oracle is the identity and the
    distance must stay within ``tol``.
    """
    check = LemmaCheck("collapse_oracle", "phi within 3 x the largest collapsed diameter of the collapse oracle")
    oracle = oracle_collapse_map(semiconjugacy.perturbed, level)
    angles = np.array([value.x.angle for value in values])
    actual = np.array([value.point.angle for value in values])
    radii = np.array([value.radius for value in values])
    gap = np.abs(np.sin(oracle(angles) - actual))
    excess = np.clip(gap - radii, 0.0, None)
    sup = float(excess.max(initial=0.0))
    bound = ORACLE_FACTOR * oracle.max_diameter if oracle.max_diameter > 0 else tol
    failing = np.flatnonzero(excess >= bound) if oracle.max_diameter > 0 else np.flatnonzero(excess > bound)

    check.checked = len(values)
    for index in failing[np.argsort(-excess[failing])].tolist():
        check.record({"x": str(values[index].x), "phi": str(values[index].point), "distance": float(excess[index])})
    summary = {
        "level": level,
        "arcs": oracle.arcs,
        "max_collapsed_diameter": oracle.max_diameter,
        "sup_distance": float(gap.max(initial=0.0)),
        "sup_excess": sup,
        "bound": bound,
        "within_bound": check.passed,
    }
    return check.finish(), summary
