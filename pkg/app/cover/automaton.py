"""The coding automaton on the vertex set Z with certified edge nesting."""
import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import networkx as nx
import numpy as np

from app.boundary.arcs import Arc, hull_within
from app.boundary.exceptions import BoundaryError
from app.boundary.tails import certify_tail
from app.cover.atoms import MAX_SHRINKS, CoverAtom
from app.cover.constants import EPSILON_SCALE, floor_fraction, uniform_constant
from app.cover.exceptions import CoverFileError, EdgeNestingError
from app.cover.search import PREFILTER_MARGIN, angular_room, bisect_radius
from app.cover.service import Cover
from app.cusped.ball import CuspedBall, norm_upper_bound
from app.cusped.lemmas import LemmaCheck

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EdgeCertificate:
    """E1 on one edge: N̄_ε(W(y)) ⊊ Ŵ(z); the right-hand inclusion is per vertex."""

    source: int
    target: int
    left: bool
    strict: bool

    @property
    def passed(self) -> bool:
        return self.left and self.strict

    def to_dict(self) -> dict:
        return {"source": self.source, "target": self.target, "left": self.left, "strict": self.strict}


@dataclass
class Automaton:
    """Vertices are indices into ``cover.atoms``; index 0 is the parabolic vertex at p₀."""

    cover: Cover
    successors: dict[int, list[int]]
    certificates: list[EdgeCertificate] = field(default_factory=list)
    checks: list[LemmaCheck] = field(default_factory=list)

    @property
    def atoms(self) -> list[CoverAtom]:
        return self.cover.atoms

    @property
    def constants(self):
        return self.cover.constants

    @property
    def epsilon(self) -> Fraction:
        return self.cover.constants.epsilon

    def __len__(self) -> int:
        return len(self.cover.atoms)

    def edges(self) -> list[tuple[int, int]]:
        return [(z, y) for z in sorted(self.successors) for y in self.successors[z]]

    def has_edge(self, source: int, target: int) -> bool:
        return target in self.successors.get(source, ())

    def graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(self)))
        graph.add_edges_from(self.edges())
        return graph

    def to_dict(self) -> dict:
        return {
            "vertices": [
                {
                    "index": i,
                    "center": str(atom.center),
                    "kind": atom.kind.value,
                    "V": atom.V.to_dict(),
                    "W": atom.W.to_dict(),
                    "hat_V": atom.hat_V.to_dict(),
                    "hat_W": atom.hat_W.to_dict(),
                }
                for i, atom in enumerate(self.atoms)
            ],
            "edges": [
                {"source": z, "target": y, "labels": self.atoms[z].descriptor()} for z, y in self.edges()
            ],
            "constants": self.constants.to_dict(),
            "certificates": {
                "edges": [c.to_dict() for c in self.certificates],
                "checks": [c.to_dict() for c in self.checks],
            },
            "cover": self.cover.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Automaton":
        try:
            cover = Cover.from_dict(data["cover"])
            successors: dict[int, list[int]] = {i: [] for i in range(len(cover.atoms))}
            for edge in data["edges"]:
                successors[int(edge["source"])].append(int(edge["target"]))
            certificates = [
                EdgeCertificate(c["source"], c["target"], c["left"], c["strict"])
                for c in data["certificates"]["edges"]
            ]
            checks = [
                LemmaCheck(c["name"], c["reference"], c["checked"], c["violations"], c["details"])
                for c in data["certificates"]["checks"]
            ]
        except (KeyError, TypeError, ValueError) as e:
            raise CoverFileError(f"Malformed automaton data: {e}") from e
        return cls(cover, successors, certificates, checks)


def float_overlaps(source: Arc, targets: list[Arc]) -> np.ndarray:
    starts = np.array([arc.start_angle for arc in targets])
    lengths = np.array([arc.angular_length for arc in targets])
    forward = np.mod(starts - source.start_angle, math.pi)
    backward = np.mod(source.start_angle - starts, math.pi)
    return (forward <= source.angular_length + PREFILTER_MARGIN) | (backward <= lengths + PREFILTER_MARGIN)


def compute_edges(atoms: list[CoverAtom]) -> dict[int, list[int]]:
    """z → y exactly when V̂(z) ∩ V(y) ≠ ∅."""
    targets = [atom.V for atom in atoms]
    successors = {}
    for z, atom in enumerate(atoms):
        shortlist = np.flatnonzero(float_overlaps(atom.hat_V, targets)).tolist()
        successors[z] = [y for y in shortlist if atom.hat_V.intersects(targets[y])]
    return successors


def _label_images_inside(atom: CoverAtom, base: Arc, cover: Cover) -> Optional[str]:
    """First label α with α·base ⊄ W(z), or None; tails are judged by their hulls."""
    rep = cover.rep
    if not atom.is_parabolic:
        image = base.image(rep.evaluate(atom.label))
        return None if atom.W.contains_arc(image) else atom.label
    T = rep.evaluate(atom.coset_rep)
    c = cover.peripheral.matrix
    for k in atom.label_exponents():
        if not atom.W.contains_arc(base.image(T @ c**k)):
            return atom.label_word(k)
    if atom.tail is None or not all(atom.W.contains_arc(h) for h in atom.tail.hull_arcs()):
        return f"{atom.coset_rep}c^k, |k| > {atom.label_bound}"
    return None


def verify_E1(cover: Cover, successors: dict[int, list[int]]) -> tuple[list[EdgeCertificate], LemmaCheck]:
    """Check α N̄_ε(W(y)) ⊊ αŴ(z) ⊂ W(z) for every edge and every label.

    The left inclusion does not depend on α and is checked once per edge; the
    right one is the label condition on Ŵ(z) and is checked once per vertex.
    Raises EdgeNestingError with the offending triple on the first failure.
    """
    epsilon = cover.epsilon
    atoms = cover.atoms
    check = LemmaCheck("E1", "a closed eps-neighborhood of W(y) properly inside a W^(z) inside W(z)")
    for z, atom in enumerate(atoms):
        check.checked += 1
        label = _label_images_inside(atom, atom.hat_W, cover)
        if label is not None:
            raise EdgeNestingError(f"Label {label} moves W^({z}) outside W({z})", z, z, label)

    certificates = []
    for z, y in ((z, y) for z in sorted(successors) for y in successors[z]):
        check.checked += 1
        hat_W = atoms[z].hat_W
        collar = atoms[y].W.neighborhood(epsilon, outward=True, closed=True)
        certificate = EdgeCertificate(z, y, hat_W.contains_arc(collar), not collar.contains_arc(hat_W))
        certificates.append(certificate)
        if not certificate.passed:
            label = atoms[z].label if not atoms[z].is_parabolic else atoms[z].coset_rep + "c^k"
            raise EdgeNestingError(f"Edge {z} -> {y} fails E1 ({certificate.to_dict()})", z, y, label)
    logger.info(f"E1 verified on {len(certificates)} edges")
    return certificates, check.finish()


def compute_epsilon_z(cover: Cover, z: int, successors: list[int]) -> Fraction:
    """Largest ε_z (to bisection resolution, halved) with N_{ε_z}(α N_ε(W(y))) ⊂ W(z).

    All N_ε(W(y)) for edges z → y are first hulled inside Ŵ(p); the hull is
    moved by every enumerated label and the remaining labels are covered by a
    certified tail.
    """
    atom = cover.atoms[z]
    epsilon = cover.epsilon
    rep = cover.rep
    peripheral = cover.peripheral
    T = rep.evaluate(atom.coset_rep)
    c = peripheral.matrix

    try:
        hull = hull_within(atom.hat_W, [cover.atoms[y].W.neighborhood(epsilon, outward=True) for y in successors])
        tail = certify_tail(atom.center, hull.image(T), T @ c @ T.inverse(), atom.label_bound)
    except BoundaryError as e:
        raise EdgeNestingError(f"Neighborhoods at vertex {z} not hulled: {e}", z, -1, atom.coset_rep) from e
    pieces = [hull.image(T @ c**k) for k in atom.label_exponents()] + tail.hull_arcs()

    room = min(angular_room(piece, atom.W) for piece in pieces)
    if room <= 0:
        raise EdgeNestingError(f"No room around the labelled hull at vertex {z}", z, -1, atom.coset_rep)
    radius = floor_fraction(bisect_radius(lambda r: math.asin(r) < room, float(epsilon)) / 2, EPSILON_SCALE)
    for _ in range(MAX_SHRINKS):
        if radius > 0 and all(atom.W.contains_arc(p.neighborhood(radius, outward=True)) for p in pieces):
            logger.debug(f"epsilon_z at vertex {z}: {float(radius):.3g}")
            return radius
        radius /= 2
    raise EdgeNestingError(f"epsilon_z at vertex {z} not certified", z, -1, atom.coset_rep)


def vertex_norms(cover: Cover, ball: Optional[CuspedBall] = None) -> list[int]:
    """|α_z|_X for conical labels and |t_q|_X for parabolic coset representatives."""
    words = [atom.coset_rep if atom.is_parabolic else atom.label for atom in cover.atoms]
    if ball is None:
        return [norm_upper_bound(word) for word in words]
    return [ball.norm(word).value for word in words]


def build_automaton(cover: Cover, ball: Optional[CuspedBall] = None) -> Automaton:
    """Edges, E1 certificates, ε_z per parabolic vertex and the constant C."""
    successors = compute_edges(cover.atoms)
    certificates, check = verify_E1(cover, successors)

    epsilon_z = {}
    for z in cover.parabolic_indices():
        epsilon_z[z] = compute_epsilon_z(cover, z, successors[z])
    positive = LemmaCheck("epsilon_z", "eps_z > 0 at every parabolic vertex", checked=len(epsilon_z))
    for z, value in epsilon_z.items():
        if value <= 0:
            positive.record({"vertex": z})

    constants = cover.constants
    constants.epsilon_z = epsilon_z
    constants.C = uniform_constant(constants.delta_hat, vertex_norms(cover, ball))
    edge_count = sum(len(v) for v in successors.values())
    logger.info(f"automaton built: {len(cover.atoms)} vertices, {edge_count} edges, C = {constants.C}")
    return Automaton(cover, successors, certificates, [*cover.checks, check, positive.finish()])


def automaton_to_file(automaton: Automaton, path: Path) -> None:
    Path(path).write_text(json.dumps(automaton.to_dict(), indent=1, sort_keys=True))


def automaton_from_file(path: Path) -> Automaton:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise CoverFileError(f"Cannot read automaton file {path}: {e}") from e
    return Automaton.from_dict(data)
