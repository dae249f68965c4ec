"""Perturbed cover sets V_ρ, V̂_ρ and the stability checks of a deformation."""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from app.boundary.arcs import Arc, first_gap, hull_within
from app.boundary.exceptions import BoundaryError
from app.boundary.points import BoundaryPoint
from app.boundary.tails import certify_tail
from app.cover.atoms import CoverAtom
from app.cover.automaton import Automaton, float_overlaps
from app.cover.constants import Constants
from app.cover.search import PREFILTER_MARGIN
from app.cusped.ball import CuspedBall
from app.cusped.lemmas import LemmaCheck
from app.cusped.vertices import CayleyVertex
from app.group.matrices import Matrix2
from app.group.representation import Representation
from app.perturbation.parabolic import ParabolicSemiconjugacy, fiber, phi_z_inverse_arc

logger = logging.getLogger(__name__)

DEFAULT_WORD_LIMIT = 4096


@dataclass
class PerturbedCover:
    """V_ρ(z), V̂_ρ(z) for every vertex and the fibers φ_z⁻¹(z) of the parabolic ones."""

    automaton: Automaton
    phi_p: ParabolicSemiconjugacy
    V: list[Arc]
    hat_V: list[Arc]
    fibers: dict[int, Arc] = field(default_factory=dict)

    @property
    def rep(self) -> Representation:
        return self.phi_p.rep

    @property
    def atoms(self) -> list[CoverAtom]:
        return self.automaton.atoms

    def __len__(self) -> int:
        return len(self.V)

    def to_dict(self) -> dict:
        return {
            "t": str(self.rep.t),
            "V": [arc.to_dict() for arc in self.V],
            "hat_V": [arc.to_dict() for arc in self.hat_V],
            "fibers": {str(z): arc.to_dict() for z, arc in sorted(self.fibers.items())},
        }


def build_perturbed_cover(automaton: Automaton, phi_p: ParabolicSemiconjugacy) -> PerturbedCover:
    """Conical: V_ρ = V, V̂_ρ = ρ(α_z)⁻¹V. Parabolic: V_ρ = φ_z⁻¹(V), V̂_ρ = φ_p⁻¹(V̂(p))."""
    rep = phi_p.rep
    V, hat_V, fibers = [], [], {}
    for z, atom in enumerate(automaton.atoms):
        if not atom.is_parabolic:
            V.append(atom.V)
            hat_V.append(atom.V.image(rep.evaluate(atom.label).inverse()))
            continue
        V.append(phi_z_inverse_arc(phi_p, atom, atom.V))
        hat_V.append(phi_p.preimage(atom.hat_V))
        fibers[z] = fiber(phi_p, atom)
    logger.info(f"perturbed cover for t={rep.t}: {len(V)} sets, {len(fibers)} fibers")
    return PerturbedCover(automaton, phi_p, V, hat_V, fibers)


def _labelled_pieces(
    atom: CoverAtom, base: Arc, rep: Representation, c_powers: dict[int, Matrix2], c_t: Matrix2
) -> list[Arc]:
    """ρ(α)·base for every enumerated label of a parabolic atom, plus the certified tail hulls."""
    T = rep.evaluate(atom.coset_rep)
    pieces = [base.image(T @ c_powers[k]) for k in atom.label_exponents()]
    tail = certify_tail(atom.center, base.image(T), T @ c_t @ T.inverse(), atom.label_bound)
    return pieces + tail.hull_arcs()


def _edge_nesting(
    z: int, perturbed: PerturbedCover, c_powers: dict[int, Matrix2], check: LemmaCheck
) -> None:
    automaton = perturbed.automaton
    atom = automaton.atoms[z]
    rep = perturbed.rep
    successors = automaton.successors[z]
    if not successors:
        return
    if not atom.is_parabolic:
        alpha = rep.evaluate(atom.label)
        for y in successors:
            check.checked += 1
            if not atom.W.contains_arc(automaton.atoms[y].W.image(alpha)):
                check.record({"source": z, "target": y, "label": atom.label})
        return

    c_t = perturbed.phi_p.c_t
    check.checked += len(successors)
    try:
        hull = hull_within(atom.hat_W, [automaton.atoms[y].W for y in successors])
        if all(atom.W.contains_arc(piece) for piece in _labelled_pieces(atom, hull, rep, c_powers, c_t)):
            return
    except BoundaryError as e:
        logger.debug(f"hull at vertex {z} unavailable: {e}")
    for y in successors:
        try:
            pieces = _labelled_pieces(atom, automaton.atoms[y].W.closure(), rep, c_powers, c_t)
        except BoundaryError as e:
            check.record({"source": z, "target": y, "label": "tail", "error": str(e)})
            continue
        if not all(atom.W.contains_arc(piece) for piece in pieces):
            check.record({"source": z, "target": y, "label": f"{atom.coset_rep}c^k"})


def _c_powers(perturbed: PerturbedCover) -> dict[int, Matrix2]:
    bound = max((atom.label_bound for atom in perturbed.atoms if atom.is_parabolic), default=0)
    return {k: perturbed.phi_p.power("t", k) for k in range(-bound, bound + 1)}


def check_same_combinatorics(perturbed: PerturbedCover) -> list[LemmaCheck]:
    """Covering, V_ρ(z) ⊂ W(z), the unperturbed intersection pattern and ρ(α)W(y) ⊂ W(z) on edges."""
    automaton = perturbed.automaton
    atoms = automaton.atoms
    covering = LemmaCheck("same_combinatorics_covering", "the sets V_rho(z) cover the circle", checked=1)
    inside = LemmaCheck("same_combinatorics_inside", "V_rho(z) inside W(z)")
    pattern = LemmaCheck("same_combinatorics_pattern", "V^_rho(z) meets V_rho(y) iff V^(z) meets V(y)")
    nesting = LemmaCheck("same_combinatorics_nesting", "rho(alpha) W(y) inside W(z) for every edge")

    gap = first_gap(perturbed.V)
    if gap is not None:
        covering.record({"point": str(gap[0]), "where": gap[1]})

    for z, atom in enumerate(atoms):
        inside.checked += 1
        if not atom.W.contains_arc(perturbed.V[z]):
            inside.record({"vertex": z, "V_rho": str(perturbed.V[z])})

    for z in range(len(atoms)):
        edges = set(automaton.successors[z])
        shortlist = set(np.flatnonzero(float_overlaps(perturbed.hat_V[z], perturbed.V)).tolist())
        for y in sorted(shortlist | edges):
            pattern.checked += 1
            if perturbed.hat_V[z].intersects(perturbed.V[y]) != (y in edges):
                pattern.record({"source": z, "target": y, "unperturbed_edge": y in edges})

    c_powers = _c_powers(perturbed)
    for z in range(len(atoms)):
        _edge_nesting(z, perturbed, c_powers, nesting)

    return [check.finish() for check in (covering, inside, pattern, nesting)]


def _unit_vectors(points: Sequence[BoundaryPoint]) -> np.ndarray:
    angles = np.array([p.angle for p in points], dtype=float)
    return np.stack([np.cos(angles), np.sin(angles)], axis=-1)


def _angles(vectors: np.ndarray) -> np.ndarray:
    return np.mod(np.arctan2(vectors[..., 1], vectors[..., 0]), math.pi)


def _stable_inclusions(
    check: LemmaCheck,
    words: Sequence[str],
    bases: Sequence[tuple[int, Arc]],
    containers: Sequence[Arc],
    rep_0: Representation,
    rep_t: Representation,
) -> LemmaCheck:
    """ρ₀(g)·base ⊂ W(y) implies ρ_t(g)·base ⊂ W(y), over every word, base and container.

    Float images of all bases shortlist the (base, container) pairs of a word;
    each shortlisted pair is decided exactly.
    """
    if not bases or not containers:
        return check
    starts = np.array([arc.start_angle for arc in containers])
    lengths = np.array([arc.angular_length for arc in containers])
    base_starts = _unit_vectors([arc.start for _, arc in bases])
    base_ends = _unit_vectors([arc.end for _, arc in bases])
    for word in words:
        M0 = rep_0.evaluate(word)
        matrix = np.array(M0.as_floats(), dtype=float).reshape(2, 2)
        image_start = _angles(base_starts @ matrix.T)
        image_length = np.mod(_angles(base_ends @ matrix.T) - image_start, math.pi)
        offset = np.mod(image_start[:, None] - starts[None, :], math.pi)
        shortlist = offset + image_length[:, None] <= lengths[None, :] + PREFILTER_MARGIN
        Mt: Optional[Matrix2] = None
        for i in np.flatnonzero(shortlist.any(axis=1)).tolist():
            z, base = bases[i]
            image = base.image(M0)
            perturbed_image = None
            for y in np.flatnonzero(shortlist[i]).tolist():
                if not containers[y].contains_arc(image):
                    continue
                check.checked += 1
                if perturbed_image is None:
                    if Mt is None:
                        Mt = rep_t.evaluate(word)
                    perturbed_image = base.image(Mt)
                if not containers[y].contains_arc(perturbed_image):
                    check.record({"word": word, "base": z, "container": y})
    return check


def _sweep(
    check: LemmaCheck,
    ball: CuspedBall,
    bound: int,
    word_limit: int,
    bases: Sequence[tuple[int, Arc]],
    containers: Sequence[Arc],
    rep_0: Representation,
    rep_t: Representation,
) -> LemmaCheck:
    """Run a stability check over every in-ball word of norm ≤ ``bound``.

    More in-ball words than ``word_limit`` exhaust the budget: the first
    ``word_limit`` are still checked and the check fails with a budget witness.
    """
    radius = min(bound, ball.radius)
    words = [v.word for v in ball.vertices_within(radius) if isinstance(v, CayleyVertex)]
    swept = words[:word_limit]
    _stable_inclusions(check, swept, bases, containers, rep_0, rep_t)
    check.details.update(
        {"norm_bound": bound, "ball_radius": ball.radius, "words": len(words), "swept": len(swept)}
    )
    if bound > ball.radius:
        check.details["clipped_to_ball"] = True
        logger.warning(f"{check.name}: norm bound {bound} exceeds the ball radius {ball.radius}")
    if len(words) > word_limit:
        check.details["budget_exhausted"] = True
        check.record({"reason": "word budget exhausted", "budget": word_limit, "words": len(words)})
    return check.finish()


def _long_parabolic_edges(perturbed: PerturbedCover, epsilon_prime: Fraction) -> LemmaCheck:
    """ρ₀(α)N_ε(W(y)) ⊂ B_ε'(q) implies ρ(α)W(y) ⊂ B_3ε'(q) on parabolic edges, tails included."""
    check = LemmaCheck("V4", "long parabolic labels keep W(y) inside the 3eps' ball")
    automaton = perturbed.automaton
    rep_0 = automaton.cover.rep
    rep_t = perturbed.rep
    epsilon = automaton.epsilon
    c_0 = automaton.cover.peripheral.matrix
    c_t = perturbed.phi_p.c_t
    c_0_powers: dict[int, Matrix2] = {}
    for q, atom in enumerate(automaton.atoms):
        if not atom.is_parabolic:
            continue
        small = Arc.ball(atom.center, epsilon_prime)
        large = Arc.ball(atom.center, 3 * epsilon_prime)
        T0, Tt = rep_0.evaluate(atom.coset_rep), rep_t.evaluate(atom.coset_rep)
        for y in automaton.successors[q]:
            W = automaton.atoms[y].W
            collar = W.neighborhood(epsilon, outward=True)
            for k in atom.label_exponents():
                if k not in c_0_powers:
                    c_0_powers[k] = c_0**k
                if not small.contains_arc(collar.image(T0 @ c_0_powers[k])):
                    continue
                check.checked += 1
                if not large.contains_arc(W.image(Tt @ perturbed.phi_p.power("t", k))):
                    check.record({"vertex": q, "target": y, "label": atom.label_word(k)})
            try:
                tail_0 = certify_tail(atom.center, collar.closure().image(T0), T0 @ c_0 @ T0.inverse(), atom.label_bound)
                if not all(small.contains_arc(h) for h in tail_0.hull_arcs()):
                    continue
                check.checked += 1
                tail_t = certify_tail(atom.center, W.closure().image(Tt), Tt @ c_t @ Tt.inverse(), atom.label_bound)
            except BoundaryError as e:
                check.record({"vertex": q, "target": y, "label": "tail", "error": str(e)})
                continue
            if not all(large.contains_arc(h) for h in tail_t.hull_arcs()):
                check.record({"vertex": q, "target": y, "label": "tail"})
    return check.finish()


def check_V_conditions(
    perturbed: PerturbedCover,
    ball: CuspedBall,
    constants: Constants,
    combinatorics: Optional[list[LemmaCheck]] = None,
    word_limit: int = DEFAULT_WORD_LIMIT,
) -> list[LemmaCheck]:
    """V1 (same combinatorics) and the arc-level stability conditions V2–V4.

    V2 and V3 sweep every in-ball element of the required norm; a norm bound
    beyond the ball radius is clipped to the ball and recorded.
    """
    combinatorics = combinatorics if combinatorics is not None else check_same_combinatorics(perturbed)
    v1 = LemmaCheck("V1", "same combinatorics", checked=1)
    failing = [check.name for check in combinatorics if not check.passed]
    if failing:
        v1.record({"failing": failing})
    checks = [v1.finish()]

    missing = [name for name in ("D1", "D2", "N", "epsilon_prime") if getattr(constants, name) is None]
    if missing:
        for name in ("V2", "V3", "V4"):
            skipped = LemmaCheck(name, "constants not measured")
            skipped.details["missing"] = missing
            checks.append(skipped.finish())
        return checks

    automaton = perturbed.automaton
    rep_0 = automaton.cover.rep
    rep_t = perturbed.rep
    containers = [atom.W for atom in automaton.atoms]

    bound = constants.D1 + constants.D2 * constants.N
    closures = [(z, atom.W.closure()) for z, atom in enumerate(automaton.atoms)]
    v2 = LemmaCheck("V2", "short words keep closed W(z) inside W(y)")
    v2 = _sweep(v2, ball, bound, word_limit, closures, containers, rep_0, rep_t)

    balls = [
        (q, Arc.closed_ball(atom.center, 3 * constants.epsilon_prime))
        for q, atom in enumerate(automaton.atoms)
        if atom.is_parabolic
    ]
    v3 = LemmaCheck("V3", "short words keep the 3eps' ball at q inside W(y)")
    v3 = _sweep(v3, ball, constants.D1, word_limit, balls, containers, rep_0, rep_t)

    v4 = _long_parabolic_edges(perturbed, constants.epsilon_prime)
    return checks + [v2, v3, v4]
