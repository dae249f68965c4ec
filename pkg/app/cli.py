"""Command-line entry point: one subcommand per pipeline step, plus full runs."""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional

from app.boundary.exceptions import BoundaryError
from app.boundary.points import BoundaryPoint
from app.coding.coder import Coding, Preference, QGSequence, code_point, decode
from app.coding.exceptions import CodingError
from app.coding.finitary import search_N, truncate_to_coder
from app.coding.nesting import verify_uniform_nesting
from app.coding.service import CodingParameters, coding_pairs, sample_points
from app.config import get_settings
from app.cover.automaton import automaton_from_file, automaton_to_file, build_automaton
from app.cover.exceptions import CoverError
from app.cover.service import build_cover, cover_from_file, cover_to_file, initial_constants
from app.cusped.ball import ball_from_file, ball_to_file, build_ball
from app.cusped.exceptions import CuspedSpaceError
from app.cusped.hyperbolicity import estimate_delta
from app.db.models import RunStatus
from app.group.exceptions import GroupError
from app.group.matrices import to_fraction
from app.group.representation import Representation
from app.group.words import parse_word
from app.harness.exceptions import ConfigError, HarnessError
from app.harness.experiment import load_config
from app.harness.pipeline import load_or_build_ball, run_pipeline
from app.harness.regressions import compare_regressions, freeze_regressions, read_json, write_regressions
from app.perturbation.combinatorics import build_perturbed_cover, check_same_combinatorics
from app.perturbation.deformation import deform
from app.perturbation.exceptions import PerturbationError
from app.perturbation.parabolic import build_phi_p
from app.perturbation.semiconjugacy import Semiconjugacy, verify_semiconjugacy, write_phi_csv

logger = logging.getLogger(__name__)

DOMAIN_ERRORS = (GroupError, BoundaryError, CuspedSpaceError, CoverError, CodingError, PerturbationError, HarnessError)


def _emit(data: Any, out: Optional[Path]) -> None:
    text = json.dumps(data, indent=1, sort_keys=True, default=str)
    if out is None:
        print(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        logger.info(f"wrote {out}")


def _config(args: argparse.Namespace):
    path = args.config
    if path is None and get_settings().default_config_path:
        path = Path(get_settings().default_config_path)
    return load_config(path, args.set or [])


def _cusped_ball(args: argparse.Namespace) -> int:
    ball = build_ball(args.radius, args.depth_cap)
    if args.samples:
        delta = estimate_delta(ball, args.samples, args.seed)
        ball.metadata["delta_hat"] = delta.delta_hat
    ball_to_file(ball, args.out)
    logger.info(f"ball with {ball.vertex_count} vertices written to {args.out}")
    return 0


def _estimate_delta(args: argparse.Namespace) -> int:
    ball = ball_from_file(args.ball)
    _emit(estimate_delta(ball, args.samples, args.seed).to_dict(), args.out)
    return 0


def _build_cover(args: argparse.Namespace) -> int:
    config = _config(args)
    if args.ball is not None:
        ball = ball_from_file(args.ball)
    else:
        ball = load_or_build_ball(config.geometry.ball_radius, config.geometry.depth_cap, get_settings().cache_path)
    delta = estimate_delta(ball, config.geometry.delta_sample, config.geometry.seed)
    rep = config.representation.representation()
    constants, shape = initial_constants(
        rep, to_fraction(config.cover.epsilon_target), config.cover.d_sample_size, config.geometry.seed
    )
    constants.delta_hat = delta.delta_hat
    cover = build_cover(rep, constants, shape, config.cover_parameters())
    cover_to_file(cover, args.out)
    return 0 if cover.passed else 1


def _build_automaton(args: argparse.Namespace) -> int:
    cover = cover_from_file(args.cover)
    ball = ball_from_file(args.ball) if args.ball is not None else None
    automaton = build_automaton(cover, ball)
    automaton_to_file(automaton, args.out)
    return 0 if all(check.passed for check in automaton.checks) else 1


def _code_point(args: argparse.Namespace) -> int:
    automaton = automaton_from_file(args.automaton)
    point = BoundaryPoint.parse(args.point)
    coding = code_point(point, automaton, args.cap, parse_word(args.g0), Preference(args.prefer))
    decoded = decode(coding, automaton)
    _emit(
        {
            "coding": coding.to_dict(),
            "decoded": {
                "point": None if decoded.point is None else str(decoded.point),
                "arc": decoded.arc.to_dict(),
                "diameter_sq": str(decoded.diameter_sq),
            },
        },
        args.out,
    )
    return 0


def _verify_nesting(args: argparse.Namespace) -> int:
    automaton = automaton_from_file(args.automaton)
    ball = ball_from_file(args.ball)
    constants = automaton.constants
    D1 = args.d1 if args.d1 is not None else constants.D1
    D2 = args.d2 if args.d2 is not None else constants.D2
    epsilon_prime = to_fraction(args.epsilon_prime) if args.epsilon_prime is not None else constants.epsilon_prime
    if None in (D1, D2, epsilon_prime):
        raise ConfigError("D1, D2 and epsilon' are neither measured in the automaton file nor given")
    first, second = (
        QGSequence.from_coding(Coding.from_dict(read_json(path)), automaton) for path in args.pair
    )
    certificate = verify_uniform_nesting(first, second, automaton, ball, D1, D2, epsilon_prime, args.nmax, args.kmax)
    _emit(certificate.to_dict(), args.out)
    return 0


def _coder_n_search(args: argparse.Namespace) -> int:
    automaton = automaton_from_file(args.automaton)
    ball = ball_from_file(args.ball)
    D2 = args.d2 if args.d2 is not None else automaton.constants.D2
    if D2 is None:
        raise ConfigError("D2 is neither measured in the automaton file nor given")
    F = ("",) + tuple(parse_word(word) for word in args.fset.split(",") if word.strip())
    parameters = CodingParameters(sample_size=args.pairs, parabolic_length=0, cap=args.cap, seed=args.seed)
    codings = [code_point(sample.point, automaton, args.cap) for sample in sample_points(automaton, parameters)]
    sequences = [QGSequence.from_coding(coding, automaton) for coding in codings]
    pairs = coding_pairs(codings, sequences, automaton, args.cap, args.pairs)
    coder = truncate_to_coder(automaton, D2, ball)
    N = search_N(coder, pairs, F, args.nmax)
    summary = {"sets": len(coder), "edges": len(coder.edges), "labels": sorted(coder.labels)}
    _emit({"N": N, "D2": D2, "F": list(F), "pairs": len(pairs), "coder": summary}, args.out)
    return 0


def _deform(args: argparse.Namespace) -> int:
    _emit(deform(args.t).to_dict(), args.out)
    return 0


def _semiconjugacy(args: argparse.Namespace) -> int:
    automaton = automaton_from_file(args.automaton)
    data = read_json(args.rep)
    rep = Representation.from_config(data.get("representation", data))
    cover = automaton.cover
    phi_p = build_phi_p(rep, cover.peripheral, cover.shape.fundamental, automaton.epsilon)
    perturbed = build_perturbed_cover(automaton, phi_p)
    combinatorics = check_same_combinatorics(perturbed)
    report = verify_semiconjugacy(Semiconjugacy(perturbed, args.cap), grid=args.grid, tol=args.tol, seed=args.seed)
    if args.csv is not None:
        write_phi_csv(report.values, args.csv)
    passed = report.passed and all(check.passed for check in combinatorics)
    _emit(
        {
            "phi_p": phi_p.to_dict(),
            "combinatorics": [check.to_dict() for check in combinatorics],
            **report.to_dict(),
            "passed": passed,
        },
        args.out,
    )
    return 0 if passed else 1


def _verify_theorem(args: argparse.Namespace) -> int:
    config = _config(args)
    report = run_pipeline(config, csv_path=args.csv, use_cache=not args.no_cache)
    _emit(report.to_dict(), args.out)
    print(f"{report.status.value}: exit {report.exit_code}, report {report.report_hash[:16]}", file=sys.stderr)
    return report.exit_code


def _freeze(args: argparse.Namespace) -> int:
    write_regressions(freeze_regressions(read_json(args.report)), args.out)
    return 0


def _compare(args: argparse.Namespace) -> int:
    diff = compare_regressions(read_json(args.old), read_json(args.new))
    _emit(diff, args.out)
    return 1 if diff else 0


def _add_config_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="Experiment config JSON.")
    parser.add_argument(
        "--set",
        action="append",
        metavar="BLOCK.FIELD=VALUE",
        help="Override one config field; may be repeated.",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cusp-verify",
        description="Boundary codings and semi-conjugacy verification for the punctured-torus group.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    p = subparsers.add_parser("cusped-ball", help="Build a ball of the cusped space.")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--depth-cap", type=int, default=None)
    p.add_argument("--samples", type=int, default=0, help="Also estimate delta and store it in the metadata.")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_cusped_ball)

    p = subparsers.add_parser("estimate-delta", help="Estimate the hyperbolicity constant on a ball.")
    p.add_argument("--ball", type=Path, required=True)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=_estimate_delta)

    p = subparsers.add_parser("build-cover", help="Build and verify the cover.")
    _add_config_args(p)
    p.add_argument("--ball", type=Path, default=None)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_build_cover)

    p = subparsers.add_parser("build-automaton", help="Edges, edge certificates and parabolic margins of a cover.")
    p.add_argument("--cover", type=Path, required=True)
    p.add_argument("--ball", type=Path, default=None)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_build_automaton)

    p = subparsers.add_parser("code-point", help="Code one boundary point.")
    p.add_argument("--automaton", type=Path, required=True)
    p.add_argument("--point", required=True, help='Point as "x:y".')
    p.add_argument("--cap", type=int, default=64)
    p.add_argument("--g0", default="", help="Generalized coding prefix.")
    p.add_argument("--prefer", choices=[p.value for p in Preference], default=Preference.LOWEST.value)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=_code_point)

    p = subparsers.add_parser("verify-nesting", help="Uniform nesting certificate for two codings of a point.")
    p.add_argument("--pair", type=Path, nargs=2, required=True)
    p.add_argument("--automaton", type=Path, required=True)
    p.add_argument("--ball", type=Path, required=True)
    p.add_argument("--d1", type=int, default=None)
    p.add_argument("--d2", type=int, default=None)
    p.add_argument("--epsilon-prime", default=None)
    p.add_argument("--nmax", type=int, default=32)
    p.add_argument("--kmax", type=int, default=64)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=_verify_nesting)

    p = subparsers.add_parser("coder-n-search", help="Least N for the truncated finitary coder.")
    p.add_argument("--automaton", type=Path, required=True)
    p.add_argument("--ball", type=Path, required=True)
    p.add_argument("--d2", type=int, default=None)
    p.add_argument("--fset", default="a,A,b,B", help="Comma-separated words; the identity is always included.")
    p.add_argument("--nmax", type=int, default=32)
    p.add_argument("--pairs", type=int, default=200)
    p.add_argument("--cap", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=_coder_n_search)

    p = subparsers.add_parser("deform", help="The deformation rho_t and the type of its commutator.")
    p.add_argument("--t", required=True)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=_deform)

    p = subparsers.add_parser("semiconjugacy", help="Build and verify phi for a deformation.")
    p.add_argument("--automaton", type=Path, required=True)
    p.add_argument("--rep", type=Path, required=True)
    p.add_argument("--grid", type=int, default=2048)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--cap", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", type=Path, default=None, help="Also write (x, phi(x)) rows.")
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=_semiconjugacy)

    p = subparsers.add_parser("verify-theorem", help="Run the whole pipeline.")
    _add_config_args(p)
    p.add_argument("--csv", type=Path, default=None)
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=_verify_theorem)

    p = subparsers.add_parser("freeze", help="Write the regression file of a passing report.")
    p.add_argument("--report", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_freeze)

    p = subparsers.add_parser("compare", help="Field-exact diff of two regression files.")
    p.add_argument("old", type=Path)
    p.add_argument("new", type=Path)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=_compare)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    settings = get_settings()
    logging.basicConfig(level=settings.log_level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return int(args.func(args))
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        for item in e.errors:
            print(f"  {item}", file=sys.stderr)
        return RunStatus.STRUCTURAL_FAILURE.exit_code
    except DOMAIN_ERRORS as e:
        logger.error(f"{args.command} failed: {e}", exc_info=True)
        return RunStatus.STRUCTURAL_FAILURE.exit_code


if __name__ == "__main__":
    sys.exit(main())
