"""Cover service layer: candidate atoms, selection, stabilization and files."""
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from app.boundary.arcs import covers
from app.boundary.points import BoundaryPoint
from app.cover.atoms import (
    CoverAtom,
    ParabolicShape,
    build_conical_atom,
    build_parabolic_atom,
    build_parabolic_shape,
    check_stable_intersections,
    enlarge_conical,
    rebuild_parabolic,
    verify_atoms,
)
from app.cover.constants import (
    EPSILON_SCALE,
    Constants,
    build_K_p,
    choose_epsilon,
    estimate_D,
    floor_fraction,
    sample_pairs,
)
from app.cover.exceptions import CoverConstructionError, CoverError, CoverFileError
from app.cover.search import LabelCandidates, label_candidates
from app.cover.selection import GapFiller, candidate_centers, cusp_reach, parabolic_cosets, select_cover
from app.cusped.lemmas import LemmaCheck
from app.group.exceptions import GroupError
from app.group.representation import PeripheralDescriptor, Representation

logger = logging.getLogger(__name__)

C6_SHRINK = Fraction(7, 8)
MAX_STABILIZE_ATTEMPTS = 8


@dataclass
class CoverParameters:
    grid_size: int = 256
    cusp_extent: int = 80
    cusp_step: Fraction = Fraction(2)
    parabolic_length: int = 2
    label_bound: int = 64
    label_length: int = 5
    max_power: int = 24
    enlarge_fraction: Fraction = Fraction(1, 4)
    max_level: int = 2
    fill_gaps: bool = True


@dataclass
class Cover:
    """A verified cover: vertex set Z (anchor first), shared parabolic data and checks."""

    rep: Representation
    constants: Constants
    shape: ParabolicShape
    atoms: list[CoverAtom]
    checks: list[LemmaCheck] = field(default_factory=list)
    rejected: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def epsilon(self) -> Fraction:
        return self.constants.epsilon

    @property
    def peripheral(self) -> PeripheralDescriptor:
        return PeripheralDescriptor(self.rep)

    @property
    def centers(self) -> list[BoundaryPoint]:
        return [atom.center for atom in self.atoms]

    def parabolic_indices(self) -> list[int]:
        return [i for i, atom in enumerate(self.atoms) if atom.is_parabolic]

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> dict:
        return {
            "representation": self.rep.as_config(),
            "constants": self.constants.to_dict(),
            "shape": self.shape.to_dict(),
            "atoms": [atom.to_dict() for atom in self.atoms],
            "checks": [check.to_dict() for check in self.checks],
            "rejected": self.rejected,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Cover":
        try:
            checks = [
                LemmaCheck(c["name"], c["reference"], c["checked"], c["violations"], c["details"])
                for c in data.get("checks", [])
            ]
            return cls(
                Representation.from_config(data["representation"]),
                Constants.from_dict(data["constants"]),
                ParabolicShape.from_dict(data["shape"]),
                [CoverAtom.from_dict(a) for a in data["atoms"]],
                checks,
                data.get("rejected", []),
                data.get("metadata", {}),
            )
        except (KeyError, TypeError, GroupError, CoverError) as e:
            raise CoverFileError(f"Malformed cover data: {e}") from e


def stabilize(
    atoms: list[CoverAtom],
    shape: ParabolicShape,
    rep: Representation,
    peripheral: PeripheralDescriptor,
    epsilon: Fraction,
    enlarge_fraction: Fraction,
) -> tuple[list[CoverAtom], ParabolicShape, list[LemmaCheck], Fraction]:
    """Enlarge every V̂* slightly and re-verify C1–C6, shrinking while C6 fails."""
    fraction = Fraction(enlarge_fraction)
    checks: list[LemmaCheck] = []
    for attempt in range(MAX_STABILIZE_ATTEMPTS):
        radius = floor_fraction(float(fraction) * shape.max_enlargement(epsilon), EPSILON_SCALE)
        enlarged = shape.enlarged(radius)
        stable = [
            rebuild_parabolic(atom, rep, peripheral, enlarged)
            if atom.is_parabolic
            else enlarge_conical(atom, rep, epsilon, fraction)
            for atom in atoms
        ]
        checks = verify_atoms(stable, enlarged, epsilon, rep, peripheral)
        checks.append(check_stable_intersections(stable))
        failed = [check.name for check in checks if not check.passed]
        if not failed:
            logger.info(f"stabilized {len(stable)} atoms with enlargement fraction {fraction}")
            return stable, enlarged, checks, fraction
        if failed != ["C6"]:
            raise CoverConstructionError(f"Enlarged cover fails {', '.join(failed)}")
        logger.warning(f"C6 failed at fraction {fraction} (attempt {attempt + 1}); shrinking")
        fraction *= C6_SHRINK
    raise CoverConstructionError(f"C6 still fails after {MAX_STABILIZE_ATTEMPTS} shrinks")


def gap_filler(
    rep: Representation, epsilon: Fraction, labels: LabelCandidates, rejected: list[dict]
) -> GapFiller:
    """Conical atom centered on an uncovered frontier point, or None when no label fits."""

    def fill(z: BoundaryPoint) -> Optional[CoverAtom]:
        try:
            return build_conical_atom(rep, z, epsilon, labels, origin="gap")
        except CoverConstructionError as e:
            rejected.append({"center": str(z), "kind": "conical", "reason": str(e)})
            return None

    return fill


def stabilize_and_select(
    candidates: list[CoverAtom],
    shape: ParabolicShape,
    rep: Representation,
    peripheral: PeripheralDescriptor,
    epsilon: Fraction,
    enlarge_fraction: Fraction,
    fill: Optional[GapFiller] = None,
) -> tuple[list[int], list[CoverAtom], ParabolicShape, list[LemmaCheck], Fraction]:
    """Greedy Z from the V* (anchor atom at index 0), then stabilization of the chosen atoms.

    Atoms produced by ``fill`` are appended to ``candidates``.
    """
    chosen = select_cover(candidates, anchor=0, fill=fill)
    if chosen is None:
        raise CoverConstructionError("Candidate V* sets do not cover the circle")
    atoms, shape, checks, fraction = stabilize(
        [candidates[i] for i in chosen], shape, rep, peripheral, epsilon, enlarge_fraction
    )
    if not covers([atom.V for atom in atoms]):
        raise CoverConstructionError("Stabilized V sets no longer cover the circle")
    return chosen, atoms, shape, checks, fraction


def build_cover(
    rep: Representation,
    constants: Constants,
    fundamental_shape: ParabolicShape,
    parameters: Optional[CoverParameters] = None,
) -> Cover:
    """Build candidate atoms, escalating the grid until the V* sets cover, then stabilize."""
    parameters = parameters or CoverParameters()
    peripheral = PeripheralDescriptor(rep)
    epsilon = constants.epsilon
    shape = fundamental_shape
    rejected: list[dict] = []

    parabolic: list[CoverAtom] = []
    for coset_rep in parabolic_cosets(parameters.parabolic_length):
        try:
            parabolic.append(
                build_parabolic_atom(rep, peripheral, shape, coset_rep, epsilon, parameters.label_bound)
            )
        except CoverConstructionError as e:
            if not coset_rep:
                raise
            logger.warning(f"parabolic candidate t_q={coset_rep} rejected: {e}")
            rejected.append({"center": coset_rep, "kind": "parabolic", "reason": str(e)})

    labels = label_candidates(rep, parameters.label_length, 2, parameters.max_power)
    fill = gap_filler(rep, epsilon, labels, rejected) if parameters.fill_gaps else None
    extent = max(parameters.cusp_extent, cusp_reach(parabolic[0], peripheral) + int(parameters.cusp_step))
    if extent > parameters.cusp_extent:
        logger.info(f"cusp grid extended to |T| <= {extent} to meet V(p0)")
    conical: list[CoverAtom] = []
    seen = {atom.center for atom in parabolic}
    for level in range(parameters.max_level + 1):
        for z, origin in candidate_centers(level, peripheral, parameters.grid_size, extent, parameters.cusp_step):
            if z in seen:
                continue
            seen.add(z)
            try:
                conical.append(build_conical_atom(rep, z, epsilon, labels, origin))
            except CoverConstructionError as e:
                rejected.append({"center": str(z), "kind": "conical", "reason": str(e)})
        candidates = parabolic + conical
        logger.info(
            f"level {level}: {len(parabolic)} parabolic and {len(conical)} conical candidates, "
            f"{len(rejected)} rejected"
        )
        try:
            chosen, atoms, stable_shape, checks, fraction = stabilize_and_select(
                candidates, shape, rep, peripheral, epsilon, parameters.enlarge_fraction, fill
            )
        except CoverConstructionError as e:
            logger.warning(f"level {level} failed: {e}")
            continue
        filled = candidates[len(parabolic) + len(conical):]
        logger.info(f"cover selected: {len(atoms)} vertices out of {len(candidates)} candidates")
        return Cover(
            rep,
            constants,
            stable_shape,
            atoms,
            checks,
            rejected,
            {
                "level": level,
                "candidates": len(candidates),
                "gap_fills": len(filled),
                "cusp_extent": extent,
                "label_candidates": len(labels),
                "enlarge_fraction": str(fraction),
                "parabolic_enlargement": str(stable_shape.enlargement),
            },
        )
    raise CoverConstructionError(f"No verified cover up to grid level {parameters.max_level}")


def initial_constants(
    rep: Representation,
    epsilon_target: Fraction,
    sample_size: int = 256,
    seed: int = 0,
    word_length: int = 4,
    enumerate_bound: int = 8,
) -> tuple[Constants, ParabolicShape]:
    """D, D_Π and ε, plus the shared parabolic neighborhoods of K_p."""
    peripheral = PeripheralDescriptor(rep)
    D = estimate_D(rep, sample_pairs(sample_size, seed), word_length)
    fundamental = build_K_p(peripheral, enumerate_bound)
    epsilon = choose_epsilon(D, fundamental.D_pi, epsilon_target)
    logger.info(f"D = {float(D):.6f}, D_pi = {float(fundamental.D_pi):.6f}, epsilon = {float(epsilon):.6f}")
    constants = Constants(D, fundamental.D_pi, epsilon, Fraction(epsilon_target))
    return constants, build_parabolic_shape(fundamental, epsilon, peripheral)


def cover_to_file(cover: Cover, path: Path) -> None:
    Path(path).write_text(json.dumps(cover.to_dict(), indent=1, sort_keys=True))


def cover_from_file(path: Path) -> Cover:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise CoverFileError(f"Cannot read cover file {path}: {e}") from e
    return Cover.from_dict(data)
