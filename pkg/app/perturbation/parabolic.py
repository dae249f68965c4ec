"""The semi-conjugacy φ_p from the deformed cusp action ⟨ρ_t(c)⟩ to ⟨ρ₀(c)⟩.

When ρ_t(c) is hyperbolic its two fixed points bound a small arc A around
p₀. φ_p collapses Ā to p₀ and matches the fundamental arc [x₀, ρ_t(c)x₀) of
the complement to K_p = [x₀, ρ₀(c)x₀) by the projective map fixing x₀ and
the anchor point of K_p; the rest of the circle is reached by equivariance
φ_p(ρ_t(c)ᵏx) = ρ₀(c)ᵏφ_p(x).
"""
import logging
import math
from fractions import Fraction
from typing import Iterable, Optional

from app.boundary.arcs import Arc
from app.boundary.points import BoundaryPoint, act, chordal_dist, mobius_from_triples
from app.cover.atoms import CoverAtom
from app.cover.constants import FundamentalArc
from app.group.matrices import Matrix2, TransformationType, classify
from app.group.representation import PeripheralDescriptor, Representation
from app.group.transformations import fixed_points
from app.perturbation.exceptions import ParabolicSemiconjugacyError

logger = logging.getLogger(__name__)

DEFAULT_EXPONENT_CAP = 200
LOCATE_SPREAD = 2


def _log_ratio(angle: float, first: float, second: float) -> float:
    """log |sin(θ − θ₁) / sin(θ − θ₂)|, which ρ_t(c) shifts by a constant."""
    top = abs(math.sin(angle - first))
    bottom = abs(math.sin(angle - second))
    if top == 0.0:
        return -math.inf
    if bottom == 0.0:
        return math.inf
    return math.log(top) - math.log(bottom)


class ParabolicSemiconjugacy:
    """Monotone degree-one φ_p with φ_p ∘ ρ_t(c) = ρ₀(c) ∘ φ_p.

    ``collapsed`` is the closed fiber over p₀: Ā for a hyperbolic ρ_t(c), the
    single point p₀ when ρ_t(c) = ρ₀(c).
    """

    def __init__(
        self,
        rep: Representation,
        peripheral: PeripheralDescriptor,
        fundamental: FundamentalArc,
        collapsed: Arc,
        fixed: tuple[BoundaryPoint, ...],
        domain: Arc,
        matching: Matrix2,
        exponent_cap: int = DEFAULT_EXPONENT_CAP,
    ):
        self.rep = rep
        self.peripheral = peripheral
        self.fundamental = fundamental
        self.collapsed = collapsed
        self.fixed = fixed
        self.domain = domain
        self.matching = matching
        self.exponent_cap = exponent_cap
        self.c_t = rep.evaluate(peripheral.word)
        self.c_0 = peripheral.matrix
        self._domain_exit = act(self.c_t, fundamental.x0)
        self._K_exit = act(self.c_0, fundamental.x0)
        self._matching_inverse = matching.inverse()
        self._powers: dict[tuple[str, int], Matrix2] = {}
        if fixed:
            first, second = (p.angle for p in fixed)
            self._angles = (first, second)
            base = _log_ratio(fundamental.x0.angle, first, second)
            self._base = base
            self._shift = _log_ratio(self._domain_exit.angle, first, second) - base

    @property
    def is_identity(self) -> bool:
        return not self.fixed

    @property
    def p0(self) -> BoundaryPoint:
        return self.peripheral.p0

    def power(self, which: str, k: int) -> Matrix2:
        key = (which, k)
        if key not in self._powers:
            self._powers[key] = (self.c_t if which == "t" else self.c_0) ** k
        return self._powers[key]

    def _in_domain(self, y: BoundaryPoint) -> bool:
        return self.domain.contains(y) and y != self._domain_exit

    def _in_K(self, y: BoundaryPoint) -> bool:
        return self.fundamental.arc.contains(y) and y != self._K_exit

    def _estimate(self, x: BoundaryPoint) -> Optional[int]:
        value = _log_ratio(x.angle, *self._angles)
        if not math.isfinite(value):
            return None
        estimate = math.floor((value - self._base) / self._shift)
        if abs(estimate) > self.exponent_cap + LOCATE_SPREAD:
            return None
        return estimate

    def locate(self, x: BoundaryPoint) -> Optional[int]:
        """k with ρ_t(c)⁻ᵏx in the fundamental domain, or None beyond the exponent cap."""
        estimate = self._estimate(x)
        if estimate is None:
            return None
        window = range(estimate - LOCATE_SPREAD, estimate + LOCATE_SPREAD + 1)
        for k in sorted(window, key=lambda k: abs(k - estimate)):
            if abs(k) <= self.exponent_cap and self._in_domain(act(self.power("t", -k), x)):
                return k
        logger.debug(f"exponent estimate {estimate} missed at {x}; scanning")
        for k in sorted(range(-self.exponent_cap, self.exponent_cap + 1), key=abs):
            if self._in_domain(act(self.power("t", -k), x)):
                return k
        return None

    def __call__(self, x: BoundaryPoint) -> BoundaryPoint:
        if self.is_identity:
            return x
        if self.collapsed.contains(x):
            return self.p0
        k = self.locate(x)
        if k is None:
            return self.p0
        inside = act(self.power("t", -k), x)
        return act(self.power("0", k), act(self.matching, inside))

    def preimage_point(self, q: BoundaryPoint) -> Arc:
        """φ_p⁻¹(q): Ā over p₀, a single point elsewhere."""
        if q == self.p0:
            return self.collapsed
        if self.is_identity:
            return Arc.point(q)
        estimate = self.peripheral.exponent_estimate(q, self.fundamental.anchor)
        for k in sorted(range(estimate - LOCATE_SPREAD, estimate + LOCATE_SPREAD + 1), key=lambda k: abs(k - estimate)):
            y = act(self.power("0", -k), q)
            if not self._in_K(y):
                continue
            if abs(k) > self.exponent_cap:
                raise ParabolicSemiconjugacyError(f"Preimage of {q} lies beyond the exponent cap")
            return Arc.point(act(self.power("t", k), act(self._matching_inverse, y)))
        raise ParabolicSemiconjugacyError(f"No translate of K_p contains {q}")

    def preimage(self, arc: Arc) -> Arc:
        """φ_p⁻¹ of an arc; endpoints at p₀ open or close onto the matching end of Ā."""
        if arc.is_full:
            return arc
        if arc.is_point:
            return self.preimage_point(arc.start)
        A = self.collapsed
        if arc.start == self.p0:
            start = A.start if arc.start_closed else A.end
        else:
            start = self.preimage_point(arc.start).start
        if arc.end == self.p0:
            end = A.end if arc.end_closed else A.start
        else:
            end = self.preimage_point(arc.end).start
        return Arc.make(start, end, arc.start_closed, arc.end_closed)

    def sup_distance(self, points: Iterable[BoundaryPoint]) -> float:
        return max((chordal_dist(x, self(x)) for x in points), default=0.0)

    @property
    def diameter(self) -> float:
        return math.sqrt(float(self.collapsed.diameter_sq()))

    def to_dict(self) -> dict:
        return {
            "t": str(self.rep.t),
            "identity": self.is_identity,
            "collapsed": self.collapsed.to_dict(),
            "collapsed_diameter": self.diameter,
            "fixed_points": [str(p) for p in self.fixed],
            "domain": self.domain.to_dict(),
            "matching": self.matching.rows(),
            "exponent_cap": self.exponent_cap,
        }


def build_phi_p(
    rep: Representation,
    peripheral: PeripheralDescriptor,
    fundamental: FundamentalArc,
    epsilon: Fraction,
    exponent_cap: int = DEFAULT_EXPONENT_CAP,
    enforce_size: bool = True,
) -> ParabolicSemiconjugacy:
    """φ_p for ρ_t = ``rep``; ``peripheral`` and ``fundamental`` describe ρ₀.

    Raises ParabolicSemiconjugacyError when ρ_t(c) is elliptic, or when the
    collapsed arc is not smaller than ε. With ``enforce_size`` off an
    oversized arc is only logged, so the combinatorics checks can still
    report witnesses for it.
    """
    c_t = rep.evaluate(peripheral.word)
    c_0 = peripheral.matrix
    p0 = peripheral.p0
    if c_t == c_0:
        logger.info("rho_t(c) = rho_0(c); phi_p is the identity")
        return ParabolicSemiconjugacy(
            rep, peripheral, fundamental, Arc.point(p0), (), fundamental.arc, Matrix2.identity(), exponent_cap
        )

    kind = classify(c_t)
    if kind != TransformationType.HYPERBOLIC:
        raise ParabolicSemiconjugacyError(f"rho_t(c) is {kind.value}; the cusp action has no collapsing arc")

    first, second = fixed_points(c_t)
    collapsed = min((Arc.closed(first, second), Arc.closed(second, first)), key=lambda arc: arc.angular_length)
    diameter = math.sqrt(float(collapsed.diameter_sq()))
    if not collapsed.diameter_sq() < epsilon * epsilon:
        message = f"Fixed points of rho_t(c) are {diameter:.3g} apart, not below epsilon"
        if enforce_size:
            raise ParabolicSemiconjugacyError(message, measured=diameter)
        logger.warning(message)
    if not collapsed.contains(p0):
        logger.warning(f"collapsed arc {collapsed} does not contain p0")

    x0 = fundamental.x0
    exit_t = act(c_t, x0)
    if fundamental.arc.start == x0:
        domain = Arc.closed(x0, exit_t)
    else:
        domain = Arc.closed(exit_t, x0)
    middle = act(peripheral.conjugator.inverse(), BoundaryPoint.from_coords(fundamental.anchor, 1))
    if domain.intersects(collapsed) or not domain.contains(middle):
        raise ParabolicSemiconjugacyError(f"Fundamental arc {domain} of rho_t(c) does not fit around {middle}")

    matching = mobius_from_triples((x0, middle, exit_t), (x0, middle, act(c_0, x0)))
    if matching.det <= 0 or domain.image(matching) != fundamental.arc:
        raise ParabolicSemiconjugacyError("Matching map does not carry the fundamental arc onto K_p")

    logger.info(f"phi_p for t={rep.t}: collapsed arc of diameter {diameter:.3g}")
    return ParabolicSemiconjugacy(
        rep, peripheral, fundamental, collapsed, (first, second), domain, matching, exponent_cap
    )


def _coset_matrices(phi_p: ParabolicSemiconjugacy, atom: CoverAtom) -> tuple[Matrix2, Matrix2]:
    return phi_p.rep.evaluate(atom.coset_rep), phi_p.peripheral.rep.evaluate(atom.coset_rep)


def phi_z(phi_p: ParabolicSemiconjugacy, atom: CoverAtom, x: BoundaryPoint) -> BoundaryPoint:
    """φ_z = ρ₀(t_z) φ_p ρ_t(t_z)⁻¹ for a parabolic vertex z."""
    T_t, T_0 = _coset_matrices(phi_p, atom)
    return act(T_0, phi_p(act(T_t.inverse(), x)))


def phi_z_inverse_arc(phi_p: ParabolicSemiconjugacy, atom: CoverAtom, arc: Arc) -> Arc:
    """φ_z⁻¹(arc) = ρ_t(t_z) φ_p⁻¹(ρ₀(t_z)⁻¹ arc)."""
    T_t, T_0 = _coset_matrices(phi_p, atom)
    return phi_p.preimage(arc.image(T_0.inverse())).image(T_t)


def fiber(phi_p: ParabolicSemiconjugacy, atom: CoverAtom) -> Arc:
    """φ_z⁻¹(z) = ρ_t(t_z)Ā."""
    T_t, _ = _coset_matrices(phi_p, atom)
    return phi_p.collapsed.image(T_t)
