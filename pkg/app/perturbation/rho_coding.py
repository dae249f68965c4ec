"""Codings of points for a deformation ρ with the same combinatorics as ρ₀."""
import logging
from typing import Optional

from app.boundary.arcs import ArcIndex
from app.boundary.points import BoundaryPoint, act
from app.coding.coder import (
    DEFAULT_CAP,
    ESTIMATE_SPREAD,
    FALLBACK_FACTOR,
    Coding,
    Preference,
    Step,
    code_point,
    ordered,
)
from app.coding.exceptions import CodingFailedError
from app.cover.atoms import CoverAtom
from app.perturbation.combinatorics import PerturbedCover

logger = logging.getLogger(__name__)


class RhoRules:
    """x ∈ V_ρ(z); parabolic steps go through φ_p and land in V̂_ρ(z) = φ_p⁻¹(V̂(p)).

    A coding stops at a parabolic vertex z once x lies in the fiber φ_z⁻¹(z).
    """

    def __init__(self, perturbed: PerturbedCover):
        self.perturbed = perturbed
        self.automaton = perturbed.automaton
        self.rep = perturbed.rep
        self.phi_p = perturbed.phi_p
        self.peripheral = self.automaton.cover.peripheral
        self.anchor = self.automaton.cover.shape.fundamental.anchor
        self.index = ArcIndex(perturbed.V)

    def vertices_containing(self, x: BoundaryPoint) -> list[int]:
        return self.index.containing(x)

    def is_terminal(self, z: int, x: BoundaryPoint) -> bool:
        fiber = self.perturbed.fibers.get(z)
        return fiber is not None and fiber.contains(x)

    def step(self, z: int, x: BoundaryPoint, prefer: Preference) -> Step:
        atom = self.automaton.atoms[z]
        if not atom.is_parabolic:
            alpha = self.rep.evaluate(atom.label)
            return Step(atom.label, alpha, act(alpha.inverse(), x))
        return self._parabolic_step(z, atom, x, prefer)

    def _parabolic_step(self, z: int, atom: CoverAtom, x: BoundaryPoint, prefer: Preference) -> Step:
        T = self.rep.evaluate(atom.coset_rep)
        w = act(T.inverse(), x)
        image = self.phi_p(w)
        if image == self.peripheral.p0:
            raise CodingFailedError(f"{x} maps into the fiber of {atom.center} but is not in it")
        estimate = self.peripheral.exponent_estimate(image, self.anchor)
        low, high = atom.k_range
        target = self.perturbed.hat_V[z]

        def admissible(k: int) -> Optional[Step]:
            if low <= k <= high:
                return None
            y = act(self.phi_p.power("t", -k), w)
            if target.contains(y):
                return Step(atom.label_word(k), T @ self.phi_p.power("t", k), y)
            return None

        for k in ordered(range(estimate - ESTIMATE_SPREAD, estimate + ESTIMATE_SPREAD + 1), prefer):
            found = admissible(k)
            if found is not None:
                return found
        bound = FALLBACK_FACTOR * max(atom.label_bound, abs(estimate))
        logger.debug(f"rho exponent estimate {estimate} missed at vertex {z}; scanning up to {bound}")
        for k in ordered(range(-bound, bound + 1), prefer):
            found = admissible(k)
            if found is not None:
                return found
        raise CodingFailedError(f"No label of the parabolic vertex {atom.center} pulls {x} into V^_rho(p)")


def rho_code_point(
    x: BoundaryPoint,
    perturbed: PerturbedCover,
    cap: int = DEFAULT_CAP,
    g0: str = "",
    prefer: Preference = Preference.LOWEST,
    rules: Optional[RhoRules] = None,
) -> Coding:
    """The (G, ρ)-coding of x; finite exactly when x lies in a translated fiber."""
    return code_point(x, perturbed.automaton, cap, g0, prefer, rules or RhoRules(perturbed))
