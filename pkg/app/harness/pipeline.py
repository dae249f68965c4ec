"""End-to-end verification run: geometry, cover, automaton, codings, perturbation."""
import logging
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional

from app.boundary.exceptions import BoundaryError
from app.coding.exceptions import CodingError
from app.coding.service import run_coding_battery
from app.config import get_settings
from app.cover.automaton import Automaton, build_automaton
from app.cover.exceptions import CoverError
from app.cover.service import build_cover, initial_constants
from app.cusped.ball import CuspedBall, ball_from_file, ball_to_file, build_ball
from app.cusped.exceptions import BallBudgetError, BallFileError, CuspedSpaceError
from app.cusped.hyperbolicity import estimate_delta
from app.cusped.lemmas import run_geometry_checks
from app.db.models import RunStatus
from app.group.exceptions import GroupError
from app.group.matrices import to_fraction
from app.harness.experiment import ExperimentConfig
from app.harness.report import RunReport, StageReport
from app.perturbation.exceptions import PerturbationError
from app.perturbation.semiconjugacy import write_phi_csv
from app.perturbation.service import run_perturbation_battery

logger = logging.getLogger(__name__)

DOMAIN_ERRORS = (GroupError, BoundaryError, CuspedSpaceError, CoverError, CodingError, PerturbationError)


class _StageFailed(Exception):
    pass


@contextmanager
def _stage(report: RunReport, name: str) -> Iterator[StageReport]:
    stage = StageReport(name)
    report.stages.append(stage)
    started = time.perf_counter()
    logger.info(f"stage {name} started")
    try:
        yield stage
    except BallBudgetError as e:
        stage.error = str(e)
        report.status = RunStatus.BUDGET_EXHAUSTED
        logger.error(f"stage {name} hit its budget: {e}", exc_info=True)
        raise _StageFailed(name) from e
    except DOMAIN_ERRORS as e:
        stage.error = f"{type(e).__name__}: {e}"
        report.status = RunStatus.STRUCTURAL_FAILURE
        logger.error(f"stage {name} aborted: {e}", exc_info=True)
        raise _StageFailed(name) from e
    finally:
        stage.seconds = time.perf_counter() - started
    if not stage.passed:
        report.status = RunStatus.STRUCTURAL_FAILURE
        logger.warning(f"stage {name} failed: {', '.join(stage.failing) or stage.error}")
        raise _StageFailed(name)
    logger.info(f"stage {name} passed in {stage.seconds:.1f}s")


def load_or_build_ball(radius: int, depth_cap: Optional[int], cache_dir: Optional[Path] = None) -> CuspedBall:
    """The radius-R ball, read from the cache directory when a copy is there."""
    if cache_dir is None:
        return build_ball(radius, depth_cap)
    path = Path(cache_dir) / f"ball-R{radius}-d{depth_cap if depth_cap is not None else radius}.json"
    if path.exists():
        try:
            ball = ball_from_file(path)
            logger.info(f"cusped ball loaded from {path}")
            return ball
        except BallFileError as e:
            logger.warning(f"ignoring unreadable cached ball {path}: {e}")
    ball = build_ball(radius, depth_cap)
    ball_to_file(ball, path)
    return ball


def run_pipeline(
    config: ExperimentConfig,
    csv_path: Optional[Path] = None,
    use_cache: bool = True,
) -> RunReport:
    """Run every stage in order, stopping at the first structural failure.

    With ``verification.expected_negative`` the run is a negative control: it
    succeeds with exit code 2 when the perturbation stage produces no
    certificate after the earlier stages passed.
    """
    report = RunReport(config.model_dump(mode="json"), config.config_hash)
    expected_negative = config.verification.expected_negative
    cache_dir = get_settings().cache_path if use_cache else None
    geometry = config.geometry

    try:
        with _stage(report, "geometry") as stage:
            ball = load_or_build_ball(geometry.ball_radius, geometry.depth_cap, cache_dir)
            delta = estimate_delta(ball, geometry.delta_sample, geometry.seed)
            stage.checks = run_geometry_checks(
                ball, delta.delta_hat, geometry.geometry_samples, geometry.seed, geometry.metric_samples
            )
            stage.measured = {"delta": delta.to_dict(), "vertices": ball.vertex_count, "edges": ball.edge_count}

        with _stage(report, "cover") as stage:
            rep = config.representation.representation()
            constants, shape = initial_constants(
                rep, to_fraction(config.cover.epsilon_target), config.cover.d_sample_size, geometry.seed
            )
            constants.delta_hat = delta.delta_hat
            cover = build_cover(rep, constants, shape, config.cover_parameters())
            stage.checks = list(cover.checks)
            stage.measured = {"vertices": len(cover), **cover.metadata, **constants.to_dict()}

        with _stage(report, "automaton") as stage:
            automaton: Automaton = build_automaton(cover, ball)
            stage.checks = automaton.checks[len(cover.checks):]
            stage.measured = {"vertices": len(automaton), "edges": len(automaton.edges()), "C": automaton.constants.C}

        with _stage(report, "coding") as stage:
            coding = run_coding_battery(automaton, ball, config.coding_parameters())
            stage.checks = coding.checks
            stage.measured = {**coding.measured, "formulas": coding.formulas}
            if coding.budget_exhausted:
                stage.measured["budget_exhausted"] = True
        if coding.budget_exhausted:
            report.status = RunStatus.BUDGET_EXHAUSTED
            report.notes.append("coding searches hit N_max or K_max")

        _run_perturbation(report, automaton, ball, config, csv_path, expected_negative)
    except _StageFailed as e:
        logger.info(f"run stopped after stage {e}")
    finally:
        report.constants = _constants(report)

    logger.info(f"run {report.config_hash[:12]} finished: {report.status.value} (exit {report.exit_code})")
    return report


def _run_perturbation(
    report: RunReport,
    automaton: Automaton,
    ball: CuspedBall,
    config: ExperimentConfig,
    csv_path: Optional[Path],
    expected_negative: bool,
) -> None:
    stage = StageReport("perturbation")
    report.stages.append(stage)
    started = time.perf_counter()
    try:
        battery = run_perturbation_battery(automaton, ball, config.perturbation_parameters(), config.fixed_t)
    except DOMAIN_ERRORS as e:
        stage.error = f"{type(e).__name__}: {e}"
        logger.error(f"perturbation stage aborted: {e}", exc_info=True)
        battery = None
    stage.seconds = time.perf_counter() - started

    if battery is not None:
        stage.checks = battery.checks
        stage.artifacts = battery.to_dict()
        stage.error = battery.error
        if battery.semiconjugacy is not None:
            stage.measured = {**battery.semiconjugacy.measured, "oracle": battery.semiconjugacy.oracle}
            if csv_path is not None:
                write_phi_csv(battery.semiconjugacy.values, csv_path)
    certified = battery is not None and battery.certified

    if expected_negative:
        if certified:
            report.status = RunStatus.STRUCTURAL_FAILURE
            report.notes.append("negative control produced a semi-conjugacy certificate")
        elif report.status == RunStatus.PASSED:
            report.status = RunStatus.EXPECTED_NEGATIVE
            report.notes.append(f"no certificate, as expected: {stage.error or ', '.join(stage.failing)}")
        return
    if certified:
        return
    if battery is not None and battery.budget_exhausted:
        report.status = RunStatus.BUDGET_EXHAUSTED
        report.notes.append("perturbation word sweeps ran out of budget")
    elif report.status != RunStatus.BUDGET_EXHAUSTED:
        report.status = RunStatus.STRUCTURAL_FAILURE


def _constants(report: RunReport) -> dict:
    """The derived constants that regression files freeze."""
    constants: dict = {}
    geometry = report.stage("geometry")
    if geometry is not None and geometry.measured:
        constants["ball"] = {"vertices": geometry.measured["vertices"], "edges": geometry.measured["edges"]}
        constants["delta_hat"] = geometry.measured["delta"]["delta_hat"]
    automaton = report.stage("automaton")
    if automaton is not None and automaton.measured:
        constants["automaton"] = dict(automaton.measured)
    coding = report.stage("coding")
    if coding is not None:
        for name in ("R_track", "D0", "D1", "D2", "J", "N", "c_nest", "epsilon_prime"):
            if name in coding.measured:
                constants[name] = coding.measured[name]
    cover = report.stage("cover")
    if cover is not None and cover.measured:
        constants["cover"] = {"vertices": cover.measured["vertices"]}
        for name in ("D", "D_pi", "epsilon", "epsilon_target"):
            constants[name] = cover.measured[name]
    perturbation = report.stage("perturbation")
    if perturbation is not None and perturbation.artifacts:
        constants["chosen_t"] = perturbation.artifacts.get("chosen_t")
    return constants
