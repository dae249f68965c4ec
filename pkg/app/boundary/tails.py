"""Certified tails of orbits of arcs under a parabolic or hyperbolic map.

For |k| beyond an enumeration bound K the translates mᵏ(X) of a base arc X
are not listed one by one. They are instead covered by a closed hull arc per
direction, obtained from the monotone drift of the arc's endpoint toward the
limiting fixed point.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from app.boundary.arcs import Arc, hull_within
from app.boundary.exceptions import TailCertificationError
from app.boundary.points import BoundaryPoint, act, chordal_dist_sq, strictly_between
from app.boundary.surds import sqrt_upper
from app.group.matrices import Matrix2, TransformationType, classify

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TailBranch:
    """Hull of ⋃_{k > K} (m^direction)ᵏ(X)."""

    direction: int
    limit: BoundaryPoint
    hull: Arc


@dataclass(frozen=True)
class TailCertificate:
    center: BoundaryPoint
    start_exponent: int
    branches: tuple[TailBranch, ...]
    eta: Fraction

    def hull_arcs(self) -> list[Arc]:
        return [branch.hull for branch in self.branches]

    def image(self, matrix: Matrix2) -> "TailCertificate":
        """Certificate data moved by a projective map (η is not transported)."""
        return TailCertificate(
            act(matrix, self.center),
            self.start_exponent,
            tuple(
                TailBranch(b.direction, act(matrix, b.limit), b.hull.image(matrix))
                for b in self.branches
            ),
            self.eta,
        )

    def to_dict(self) -> dict:
        return {
            "center": str(self.center),
            "start_exponent": self.start_exponent,
            "eta_upper": str(self.eta),
            "branches": [
                {"direction": b.direction, "limit": str(b.limit), "hull": b.hull.to_dict()}
                for b in self.branches
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TailCertificate":
        return cls(
            BoundaryPoint.parse(data["center"]),
            int(data["start_exponent"]),
            tuple(
                TailBranch(int(b["direction"]), BoundaryPoint.parse(b["limit"]), Arc.from_dict(b["hull"]))
                for b in data["branches"]
            ),
            Fraction(data["eta_upper"]),
        )


def _limit_points(m: Matrix2, q: BoundaryPoint) -> dict[int, BoundaryPoint]:
    from app.group.transformations import attracting_repelling, fixed_points

    kind = classify(m)
    if kind == TransformationType.PARABOLIC:
        (fixed,) = fixed_points(m)
        return {1: fixed, -1: fixed}
    if kind == TransformationType.HYPERBOLIC:
        attracting, repelling = attracting_repelling(m)
        return {1: attracting, -1: repelling}
    raise TailCertificationError(f"No convergent orbits for a {kind.value} map")


def _branch(
    base: Arc, step: Matrix2, direction: int, limit: BoundaryPoint, start_exponent: int
) -> TailBranch:
    s, e = base.start, base.end
    image = act(step, s)
    square = act(step, image)
    if strictly_between(s, image, limit) and strictly_between(image, square, limit):
        far = act(step ** (start_exponent + 1), s)
        return TailBranch(direction, limit, Arc.closed(far, limit))
    image = act(step, e)
    square = act(step, image)
    if strictly_between(limit, image, e) and strictly_between(limit, square, image):
        far = act(step ** (start_exponent + 1), e)
        return TailBranch(direction, limit, Arc.closed(limit, far))
    raise TailCertificationError(
        f"Endpoint orbit of {base} is not monotone toward {limit}"
    )


def certify_tail(
    q: BoundaryPoint,
    base: Arc,
    m: Matrix2,
    start_exponent: int,
) -> TailCertificate:
    """Certify mᵏ(base) ⊂ B_η(q) for every |k| > start_exponent.

    ``m`` must be parabolic or hyperbolic and the closed base arc must avoid
    its fixed points. Each direction is certified by the three-point test
    s, m(s), m²(s) drifting monotonically toward the limit point.
    """
    if base.is_full or base.is_point or base.is_punctured:
        raise TailCertificationError(f"Base {base} is not a proper arc")
    limits = _limit_points(m, q)
    closed_base = base.closure()
    for limit in set(limits.values()):
        if closed_base.contains(limit):
            raise TailCertificationError(f"Base {base} contains fixed point {limit}")

    branches = []
    eta = Fraction(0)
    for direction, limit in sorted(limits.items(), reverse=True):
        step = m if direction == 1 else m.inverse()
        branch = _branch(base, step, direction, limit, start_exponent)
        branches.append(branch)
        radius = sqrt_upper(branch.hull.diameter_sq())
        if limit != q:
            radius += sqrt_upper(chordal_dist_sq(limit, q))
        eta = max(eta, radius)

    logger.debug(f"Tail of {base} under {m.rows()} beyond {start_exponent}: eta <= {float(eta):.3g}")
    return TailCertificate(q, start_exponent, tuple(branches), eta)


@dataclass
class SymbolicUnion:
    """Finite union of arcs and points, plus an optional certified tail."""

    arcs: list[Arc] = field(default_factory=list)
    points: list[BoundaryPoint] = field(default_factory=list)
    tail: Optional[TailCertificate] = None

    @property
    def tail_certified(self) -> bool:
        return self.tail is not None

    def pieces(self) -> list[Arc]:
        pieces = list(self.arcs) + [Arc.point(p) for p in self.points]
        if self.tail is not None:
            pieces.extend(self.tail.hull_arcs())
        return pieces

    def contains_enumerated(self, p: BoundaryPoint) -> bool:
        return p in self.points or any(arc.contains(p) for arc in self.arcs)

    def hull(self, within: Arc) -> Arc:
        """One closed arc inside ``within`` holding every piece, tail included."""
        return hull_within(within, self.pieces())

    def is_inside(self, target: Arc) -> bool:
        """Every piece (tail hulls included) lies in ``target``."""
        return all(target.contains_arc(piece) for piece in self.pieces())

    def to_dict(self) -> dict:
        return {
            "arcs": [arc.to_dict() for arc in self.arcs],
            "points": [str(p) for p in self.points],
            "tail": self.tail.to_dict() if self.tail else None,
        }
