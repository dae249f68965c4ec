"""Conical and parabolic atoms of the cover and their conditions C1–C6."""
import enum
import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence

from app.boundary.arcs import Arc
from app.boundary.exceptions import BoundaryError
from app.boundary.points import BoundaryPoint, act
from app.boundary.tails import TailCertificate, certify_tail
from app.cover.constants import EPSILON_SCALE, FundamentalArc, floor_fraction
from app.cover.exceptions import CoverConstructionError, CoverFileError
from app.cover.search import LabelCandidates, angular_room, bisect_radius, prefilter_labels
from app.cusped.lemmas import LemmaCheck
from app.group.matrices import Matrix2, format_fraction, to_fraction
from app.group.representation import PeripheralDescriptor, Representation
from app.group.words import c_power

logger = logging.getLogger(__name__)

MAX_SHRINKS = 12


class AtomKind(str, enum.Enum):
    CONICAL = "conical"
    PARABOLIC = "parabolic"


@dataclass(frozen=True)
class ParabolicShape:
    """V̂(p) ⊂ Ŵ(p), the neighborhoods of K_p shared by every parabolic atom."""

    fundamental: FundamentalArc
    hat_V_star: Arc
    hat_V: Arc
    hat_W: Arc
    enlargement: Fraction = Fraction(0)

    def max_enlargement(self, epsilon: Fraction) -> float:
        room = angular_room(self.hat_V_star, self.hat_W)
        two = math.asin(2 * float(epsilon))
        return bisect_radius(lambda r: room - math.asin(r) - two > 0, float(epsilon))

    def enlarged(self, radius: Fraction) -> "ParabolicShape":
        hat_V = self.hat_V_star if radius <= 0 else self.hat_V_star.neighborhood(radius, outward=True)
        return replace(self, hat_V=hat_V, enlargement=radius)

    def to_dict(self) -> dict:
        return {
            "fundamental": self.fundamental.to_dict(),
            "hat_V_star": self.hat_V_star.to_dict(),
            "hat_V": self.hat_V.to_dict(),
            "hat_W": self.hat_W.to_dict(),
            "enlargement": format_fraction(self.enlargement),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ParabolicShape":
        return cls(
            FundamentalArc.from_dict(data["fundamental"]),
            Arc.from_dict(data["hat_V_star"]),
            Arc.from_dict(data["hat_V"]),
            Arc.from_dict(data["hat_W"]),
            to_fraction(data["enlargement"]),
        )


def shape_violations(shape: ParabolicShape, epsilon: Fraction, peripheral: PeripheralDescriptor) -> list[str]:
    """Conditions on V̂(p), Ŵ(p) that every parabolic atom relies on."""
    problems = []
    if not shape.hat_W.diameter_sq() > 16 * epsilon * epsilon:
        problems.append("diam(W^(p)) <= 4 eps")
    if not shape.hat_W.contains_arc(shape.hat_V.neighborhood(2 * epsilon, outward=True, closed=True)):
        problems.append("closed 2eps-neighborhood of V^(p) leaves W^(p)")
    if shape.hat_W.neighborhood(epsilon, outward=True, closed=True).contains(peripheral.p0):
        problems.append("closed eps-neighborhood of W^(p) contains p0")
    c = peripheral.matrix
    for name, arc in (("V^(p)", shape.hat_V), ("W^(p)", shape.hat_W)):
        if not arc.intersects(arc.image(c)):
            problems.append(f"{name} and its c-translate are disjoint")
    return problems


def build_parabolic_shape(
    fundamental: FundamentalArc, epsilon: Fraction, peripheral: PeripheralDescriptor
) -> ParabolicShape:
    """V̂(p) = N_ε(K_p) rounded outward and Ŵ(p) = N_4ε(K_p) rounded inward."""
    hat_V = fundamental.arc.neighborhood(epsilon, outward=True)
    hat_W = fundamental.arc.neighborhood(4 * epsilon, outward=False)
    shape = ParabolicShape(fundamental, hat_V, hat_V, hat_W)
    problems = shape_violations(shape, epsilon, peripheral)
    if problems:
        raise CoverConstructionError(f"Parabolic neighborhoods of K_p fail: {'; '.join(problems)}")
    return shape


@dataclass(frozen=True)
class CoverAtom:
    """One vertex z of the cover with its sets V ⊂ W and V̂ ⊂ Ŵ.

    Conical atoms carry the label α_z with V = α_z V̂ and W = α_z Ŵ.
    Parabolic atoms at q = t_q p₀ carry the coset representative t_q and the
    excluded exponent window [k_lo, k_hi]; their labels are t_q cᵏ for every
    other k, enumerated up to ``label_bound`` and certified beyond it by
    ``tail``.
    """

    center: BoundaryPoint
    kind: AtomKind
    V: Arc
    W: Arc
    hat_V: Arc
    hat_W: Arc
    V_star: Arc
    hat_V_star: Arc
    label: str = ""
    coset_rep: str = ""
    k_range: tuple[int, int] = (0, -1)
    label_bound: int = 0
    tail: Optional[TailCertificate] = None
    enlargement: Fraction = Fraction(0)
    origin: str = ""

    @property
    def is_parabolic(self) -> bool:
        return self.kind == AtomKind.PARABOLIC

    def excluded_exponents(self) -> list[int]:
        return list(range(self.k_range[0], self.k_range[1] + 1))

    def label_exponents(self) -> list[int]:
        low, high = self.k_range
        return [k for k in range(-self.label_bound, self.label_bound + 1) if not low <= k <= high]

    def label_word(self, k: int) -> str:
        return self.coset_rep + c_power(k)

    def labels(self) -> list[str]:
        """Enumerated part of L(z)."""
        if not self.is_parabolic:
            return [self.label]
        return [self.label_word(k) for k in self.label_exponents()]

    def descriptor(self) -> dict:
        if not self.is_parabolic:
            return {"kind": "single", "label": self.label}
        return {
            "kind": "coset",
            "coset_rep": self.coset_rep,
            "excluded": list(self.k_range),
            "enumerated_up_to": self.label_bound,
            "tail": self.tail.to_dict() if self.tail else None,
        }

    def to_dict(self) -> dict:
        return {
            "center": str(self.center),
            "kind": self.kind.value,
            "V": self.V.to_dict(),
            "W": self.W.to_dict(),
            "hat_V": self.hat_V.to_dict(),
            "hat_W": self.hat_W.to_dict(),
            "V_star": self.V_star.to_dict(),
            "hat_V_star": self.hat_V_star.to_dict(),
            "label": self.label,
            "coset_rep": self.coset_rep,
            "k_range": list(self.k_range),
            "label_bound": self.label_bound,
            "tail": self.tail.to_dict() if self.tail else None,
            "enlargement": format_fraction(self.enlargement),
            "origin": self.origin,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CoverAtom":
        try:
            return cls(
                BoundaryPoint.parse(data["center"]),
                AtomKind(data["kind"]),
                Arc.from_dict(data["V"]),
                Arc.from_dict(data["W"]),
                Arc.from_dict(data["hat_V"]),
                Arc.from_dict(data["hat_W"]),
                Arc.from_dict(data["V_star"]),
                Arc.from_dict(data["hat_V_star"]),
                data.get("label", ""),
                data.get("coset_rep", ""),
                tuple(data.get("k_range", (0, -1))),
                int(data.get("label_bound", 0)),
                TailCertificate.from_dict(data["tail"]) if data.get("tail") else None,
                to_fraction(data.get("enlargement", "0")),
                data.get("origin", ""),
            )
        except (KeyError, ValueError, BoundaryError) as e:
            raise CoverFileError(f"Malformed atom: {e}") from e


def build_conical_atom(
    rep: Representation,
    z: BoundaryPoint,
    epsilon: Fraction,
    candidates: LabelCandidates,
    origin: str = "grid",
) -> CoverAtom:
    """W = B_{ε/2}(z); α_z the first candidate with diam(α⁻¹W) > 4ε and room for V̂.

    V̂* is the ball around α⁻¹z using half of the angular room left after the
    2ε collar, so that the stabilization step has space to enlarge it.
    """
    W = Arc.ball(z, epsilon / 2)
    if not W.diameter_sq() < epsilon * epsilon:
        raise CoverConstructionError(f"W({z}) is not smaller than epsilon")

    collar = math.asin(2 * float(epsilon))
    for index in prefilter_labels(candidates, W, z, float(epsilon)):
        word = candidates.words[index]
        alpha = rep.evaluate(word)
        inverse = alpha.inverse()
        hat_W = W.image(inverse)
        if not hat_W.diameter_sq() > 16 * epsilon * epsilon:
            continue
        w = act(inverse, z)
        room = angular_room(Arc.point(w), hat_W)
        half = (room - collar) / 2
        if half <= 0:
            continue
        radius = floor_fraction(math.sin(half), EPSILON_SCALE)
        if radius <= 0:
            continue
        hat_V = Arc.ball(w, radius)
        if not hat_W.contains_arc(hat_V.neighborhood(2 * epsilon, outward=True, closed=True)):
            continue
        V = hat_V.image(alpha)
        if not (V.contains(z) and W.contains_arc(V.closure())):
            continue
        logger.debug(f"conical atom at {z}: label {word}")
        return CoverAtom(z, AtomKind.CONICAL, V, W, hat_V, hat_W, V, hat_V, label=word, origin=origin)
    raise CoverConstructionError(f"No label within the search set fits the conical center {z}")


def translate_union(q: BoundaryPoint, first: Arc, second: Arc) -> Arc:
    """The open arc through q spanned by the two outermost translates."""
    options = [Arc.open(first.start, second.end), Arc.open(second.start, first.end)]
    good = [
        arc
        for arc in options
        if arc.contains(q) and arc.contains_arc(first) and arc.contains_arc(second)
    ]
    if not good:
        raise CoverConstructionError(f"Translates {first} and {second} do not span an arc through {q}")
    return min(good, key=lambda arc: arc.angular_length)


def _coset_matrix(rep: Representation, coset_rep: str) -> Matrix2:
    return rep.evaluate(coset_rep)


def build_parabolic_atom(
    rep: Representation,
    peripheral: PeripheralDescriptor,
    shape: ParabolicShape,
    coset_rep: str,
    epsilon: Fraction,
    label_bound: int = 64,
    origin: str = "parabolic",
) -> CoverAtom:
    """Atom at q = t_q p₀ with the exclusion window F_q found by scan plus tail."""
    T = _coset_matrix(rep, coset_rep)
    c = peripheral.matrix
    q = act(T, peripheral.p0)
    target = Arc.ball(q, epsilon / 2)
    closed_hat_W = shape.hat_W.closure()

    violations = [
        k
        for k in range(-label_bound, label_bound + 1)
        if not target.contains_arc(closed_hat_W.image(T @ c**k))
    ]
    if not violations:
        raise CoverConstructionError(f"Every translate of W^(p) fits the ball at {q}")
    if max(abs(k) for k in violations) >= label_bound:
        raise CoverConstructionError(f"Exclusion window at {q} reaches the label bound {label_bound}")
    k_lo, k_hi = min(violations), max(violations)

    m = T @ c @ T.inverse()
    try:
        tail = certify_tail(q, closed_hat_W.image(T), m, label_bound)
    except BoundaryError as e:
        raise CoverConstructionError(f"Tail at {q} not certified: {e}") from e
    for hull in tail.hull_arcs():
        if not target.contains_arc(hull):
            raise CoverConstructionError(f"Tail hull {hull} leaves the ball at {q}")

    outer_low, outer_high = T @ c ** (k_lo - 1), T @ c ** (k_hi + 1)
    W = translate_union(q, shape.hat_W.image(outer_low), shape.hat_W.image(outer_high))
    V = translate_union(q, shape.hat_V.image(outer_low), shape.hat_V.image(outer_high))
    logger.debug(f"parabolic atom at {q} (t_q={coset_rep or '1'}): window [{k_lo}, {k_hi}]")
    return CoverAtom(
        q,
        AtomKind.PARABOLIC,
        V,
        W,
        shape.hat_V,
        shape.hat_W,
        V,
        shape.hat_V,
        coset_rep=coset_rep,
        k_range=(k_lo, k_hi),
        label_bound=label_bound,
        tail=tail,
        origin=origin,
    )


def enlarge_conical(
    atom: CoverAtom, rep: Representation, epsilon: Fraction, fraction: Fraction
) -> CoverAtom:
    """Replace V̂* by N_r(V̂*) with r a fixed fraction of the largest admissible radius."""
    alpha = rep.evaluate(atom.label)
    room = angular_room(atom.hat_V_star, atom.hat_W)
    collar = math.asin(2 * float(epsilon))
    r_max = bisect_radius(lambda r: room - math.asin(r) - collar > 0, float(epsilon))
    radius = floor_fraction(float(fraction) * r_max, EPSILON_SCALE)
    for _ in range(MAX_SHRINKS):
        if radius <= 0:
            break
        hat_V = atom.hat_V_star.neighborhood(radius, outward=True)
        if atom.hat_W.contains_arc(hat_V.neighborhood(2 * epsilon, outward=True, closed=True)):
            V = hat_V.image(alpha)
            if atom.W.contains_arc(V.closure()):
                return replace(atom, V=V, hat_V=hat_V, enlargement=radius)
        radius /= 2
    logger.debug(f"no enlargement for {atom.center}")
    return replace(atom, V=atom.V_star, hat_V=atom.hat_V_star, enlargement=Fraction(0))


def rebuild_parabolic(
    atom: CoverAtom, rep: Representation, peripheral: PeripheralDescriptor, shape: ParabolicShape
) -> CoverAtom:
    """Recompute V(q) from an enlarged V̂(p); W(q), F_q and the tail are unchanged."""
    T = _coset_matrix(rep, atom.coset_rep)
    c = peripheral.matrix
    k_lo, k_hi = atom.k_range
    V = translate_union(
        atom.center,
        shape.hat_V.image(T @ c ** (k_lo - 1)),
        shape.hat_V.image(T @ c ** (k_hi + 1)),
    )
    return replace(atom, V=V, hat_V=shape.hat_V, enlargement=shape.enlargement)


def _translates_inside(
    atom: CoverAtom, base: Arc, container: Arc, rep: Representation, peripheral: PeripheralDescriptor
) -> Optional[int]:
    """First enumerated label exponent whose translate of ``base`` leaves ``container``."""
    T = _coset_matrix(rep, atom.coset_rep)
    c = peripheral.matrix
    for k in atom.label_exponents():
        if not container.contains_arc(base.image(T @ c**k)):
            return k
    return None


def _spanned_by_translates(
    atom: CoverAtom, base: Arc, arc: Arc, rep: Representation, peripheral: PeripheralDescriptor
) -> bool:
    """arc ⊆ {z} ∪ ⋃ α·base over the labels α of z.

    Consecutive translates overlap when base meets c·base, so the label
    translates on either side of the window form one chain running into z.
    The arc must then be the span of the two outermost label translates.
    """
    if not base.intersects(base.image(peripheral.matrix)):
        return False
    T = _coset_matrix(rep, atom.coset_rep)
    c = peripheral.matrix
    k_lo, k_hi = atom.k_range
    try:
        span = translate_union(atom.center, base.image(T @ c ** (k_lo - 1)), base.image(T @ c ** (k_hi + 1)))
    except CoverConstructionError:
        return False
    return span == arc


def verify_atoms(
    atoms: Sequence[CoverAtom],
    shape: ParabolicShape,
    epsilon: Fraction,
    rep: Representation,
    peripheral: PeripheralDescriptor,
) -> list[LemmaCheck]:
    """Exact checks of C1–C5 on every atom; C2 and C3 for parabolic atoms are checked once on the shape."""
    c1 = LemmaCheck("C1", "diam W(z) < eps")
    c2 = LemmaCheck("C2", "diam W^(z) > 4 eps")
    c3 = LemmaCheck("C3", "closed 2eps-neighborhood of V^(z) inside W^(z)")
    c4 = LemmaCheck("C4", "W(z) = {z} u labels applied to W^(z)")
    c5 = LemmaCheck("C5", "V(z) = {z} u labels applied to V^(z), closure of V(z) inside W(z)")
    eps_sq = epsilon * epsilon

    shape_problems = shape_violations(shape, epsilon, peripheral)
    if any(atom.is_parabolic for atom in atoms):
        c2.checked += 1
        c3.checked += 1
        for problem in shape_problems:
            target = c2 if "diam" in problem else c3
            target.record({"center": "p0", "problem": problem})

    for index, atom in enumerate(atoms):
        where = {"vertex": index, "center": str(atom.center)}
        c1.checked += 1
        if not atom.W.diameter_sq() < eps_sq:
            c1.record(where)

        if not atom.is_parabolic:
            alpha = rep.evaluate(atom.label)
            c2.checked += 1
            if not atom.hat_W.diameter_sq() > 16 * eps_sq:
                c2.record(where)
            c3.checked += 1
            if not atom.hat_W.contains_arc(atom.hat_V.neighborhood(2 * epsilon, outward=True, closed=True)):
                c3.record(where)
            c4.checked += 1
            if atom.hat_W.image(alpha) != atom.W or not atom.W.contains(atom.center):
                c4.record(where)
            c5.checked += 1
            if (
                atom.hat_V.image(alpha) != atom.V
                or not atom.V.contains(atom.center)
                or not atom.W.contains_arc(atom.V.closure())
            ):
                c5.record(where)
            continue

        c4.checked += 1
        escape = _translates_inside(atom, shape.hat_W, atom.W, rep, peripheral)
        tail_out = atom.tail is None or not all(atom.W.contains_arc(h) for h in atom.tail.hull_arcs())
        spanned = _spanned_by_translates(atom, shape.hat_W, atom.W, rep, peripheral)
        if escape is not None or tail_out or not spanned or not atom.W.contains(atom.center):
            c4.record({**where, "exponent": escape, "tail_outside": tail_out, "spanned": spanned})
        c5.checked += 1
        escape = _translates_inside(atom, shape.hat_V, atom.V, rep, peripheral)
        spanned = _spanned_by_translates(atom, shape.hat_V, atom.V, rep, peripheral)
        if (
            escape is not None
            or not spanned
            or not atom.V.contains(atom.center)
            or not atom.W.contains_arc(atom.V.closure())
        ):
            c5.record({**where, "exponent": escape, "spanned": spanned})

    return [check.finish() for check in (c1, c2, c3, c4, c5)]


def check_stable_intersections(atoms: Sequence[CoverAtom]) -> LemmaCheck:
    """closure(V̂(z)) ∩ closure(V(y)) = ∅ exactly when V̂(z) ∩ V(y) = ∅."""
    check = LemmaCheck("C6", "closures of V^(z) and V(y) meet iff the sets meet")
    for i, source in enumerate(atoms):
        closed_hat = source.hat_V.closure()
        for j, target in enumerate(atoms):
            check.checked += 1
            if source.hat_V.intersects(target.V):
                continue
            if closed_hat.intersects(target.V.closure()):
                check.record({"source": i, "target": j})
    return check.finish()
