"""Tests for boundary points, arcs, surds and certified tails."""
from fractions import Fraction

import pytest

from app.boundary.arcs import Arc, ArcIndex, covers, first_gap, hull_within, rational_tan
from app.boundary.exceptions import ArcError, BoundaryError, PointFormatError, TailCertificationError
from app.boundary.points import (
    BoundaryPoint,
    act,
    ccw_before,
    chordal_dist,
    chordal_dist_sq,
    mobius_from_triples,
    strictly_between,
)
from app.boundary.surds import QuadraticSurd, sign, sqrt_lower, sqrt_upper
from app.boundary.tails import SymbolicUnion, TailCertificate, certify_tail
from app.group.matrices import Matrix2

P0 = BoundaryPoint(0, 1)
C0 = Matrix2.from_rows([[1, 0], [6, 1]])


def point(text: str) -> BoundaryPoint:
    return BoundaryPoint.parse(text)


class TestBoundaryPoint:
    """Tests for canonical projective points."""

    def test_parse_normalizes(self):
        assert point("2:4") == BoundaryPoint(1, 2)
        assert point("-1:-2") == BoundaryPoint(1, 2)
        assert point("1/2:3/4") == BoundaryPoint(2, 3)
        assert point("-1:0") == BoundaryPoint(1, 0)

    def test_parse_rejects_garbage(self):
        with pytest.raises(PointFormatError):
            point("1,2")
        with pytest.raises(PointFormatError):
            point("0:0")

    def test_angle_range(self):
        assert point("1:0").angle == 0.0
        assert abs(point("0:1").angle - 1.5707963267948966) < 1e-15
        assert 0 <= point("1:-1").angle < 3.1416

    def test_surd_point_equality(self):
        root = QuadraticSurd.sqrt(2)
        p = BoundaryPoint.from_coords(root, 1)
        q = BoundaryPoint.from_coords(2 * root, 2)
        assert p == q
        assert not p.is_rational
        assert p != BoundaryPoint(1, 1)

    def test_perpendicular(self):
        assert point("1:0").perpendicular() == P0


class TestDistancesAndOrder:
    """Tests for chordal distance and cyclic order."""

    def test_chordal_distance(self):
        assert chordal_dist_sq(point("1:0"), P0) == 1
        assert chordal_dist_sq(point("1:1"), point("1:1")) == 0
        assert chordal_dist_sq(point("1:0"), point("1:1")) == Fraction(1, 2)
        assert abs(chordal_dist(point("1:0"), point("1:1")) - 0.5 ** 0.5) < 1e-12

    def test_distance_is_symmetric(self):
        p, q = point("3:7"), point("-2:5")
        assert chordal_dist_sq(p, q) == chordal_dist_sq(q, p)

    def test_ccw_order(self):
        base = point("1:0")
        assert ccw_before(base, point("1:1"), P0)
        assert not ccw_before(base, P0, point("1:1"))
        assert strictly_between(base, point("1:1"), P0)
        assert not strictly_between(base, P0, P0)

    def test_action(self):
        assert act(C0, point("1:0")) == point("1:6")
        assert act(C0, P0) == P0

    def test_mobius_from_triples(self):
        source = (point("1:0"), P0, point("1:1"))
        target = (point("1:2"), point("3:1"), point("-1:1"))
        m = mobius_from_triples(source, target)
        for s, t in zip(source, target):
            assert act(m, s) == t


class TestArc:
    """Tests for arcs of the projective line."""

    def test_contains_respects_closedness(self):
        arc = Arc.open(point("1:0"), P0)
        assert arc.contains(point("1:1"))
        assert not arc.contains(point("1:0"))
        assert Arc.closed(point("1:0"), P0).contains(point("1:0"))
        assert not arc.contains(point("-1:1"))

    def test_point_and_full(self):
        assert Arc.point(P0).contains(P0)
        assert not Arc.point(P0).contains(point("1:0"))
        assert Arc.full().contains(point("5:3"))
        assert Arc.make(P0, P0, True, False).is_full

    def test_complement(self):
        arc = Arc.closed(point("1:0"), P0)
        outside = arc.complement()
        assert not outside.contains(point("1:0"))
        assert outside.contains(point("-1:1"))
        assert Arc.full().complement() is None
        assert Arc.point(P0).complement().is_punctured

    def test_contains_arc(self):
        big = Arc.closed(point("1:0"), P0)
        assert big.contains_arc(Arc.open(point("2:1"), point("1:2")))
        assert not big.contains_arc(Arc.open(point("2:1"), point("-1:2")))
        assert Arc.full().contains_arc(big)

    def test_intersects(self):
        first = Arc.open(point("1:0"), point("1:1"))
        assert first.intersects(Arc.open(point("2:1"), P0))
        assert not first.intersects(Arc.open(point("1:1"), P0))
        assert first.closure().intersects(Arc.closed(point("1:1"), P0))

    def test_diameter(self):
        assert Arc.closed(point("1:0"), point("1:1")).diameter_sq() == Fraction(1, 2)
        assert Arc.closed(point("1:0"), point("-1:1")).diameter_sq() == 1
        assert Arc.point(P0).diameter_sq() == 0

    def test_image_preserves_membership(self):
        arc = Arc.open(point("1:0"), point("1:1"))
        moved = arc.image(C0)
        assert moved.contains(act(C0, point("2:1")))
        assert not moved.contains(act(C0, point("-1:1")))

    def test_outward_neighborhood_is_superset(self):
        center = point("1:2")
        radius = Fraction(1, 10)
        outer = Arc.ball(center, radius, outward=True)
        inner = Arc.ball(center, radius, outward=False)
        assert outer.contains_arc(inner)
        assert outer.contains(center)
        assert float(chordal_dist_sq(center, outer.start)) >= float(radius) ** 2 - 1e-12

    def test_large_neighborhood_is_full(self):
        assert Arc.point(P0).neighborhood(Fraction(1)).is_full

    def test_rational_tan_bounds(self):
        r = Fraction(1, 5)
        out, inn = rational_tan(r, True), rational_tan(r, False)
        assert inn <= out
        assert out * out * (1 - r * r) >= r * r
        with pytest.raises(ArcError):
            rational_tan(Fraction(2), True)

    def test_interior_point(self):
        arc = Arc.open(point("1:0"), P0)
        assert arc.contains(arc.interior_point())
        wrap = Arc.open(P0, point("1:0"))
        assert wrap.contains(wrap.interior_point())

    def test_dict_round_trip_kinds(self):
        for arc in (Arc.full(), Arc.point(P0), Arc(point("1:0"), P0, True, False)):
            assert Arc.from_dict(arc.to_dict()) == arc


class TestCoverage:
    """Tests for coverage witnesses and hulls."""

    def test_covers(self):
        arcs = [
            Arc.open(point("-1:1"), point("1:1")),
            Arc.open(point("2:1"), point("-2:1")),
        ]
        assert covers(arcs)

    def test_gap_witness(self):
        arcs = [Arc.open(point("1:0"), P0), Arc.open(P0, point("1:0"))]
        p, where = first_gap(arcs)
        assert where == "at"
        assert p in (P0, point("1:0"))

    def test_no_arcs_leave_a_gap(self):
        assert first_gap([]) is not None

    def test_index_candidates(self):
        arcs = [Arc.open(point("1:0"), point("1:1")), Arc.open(P0, point("-1:1"))]
        index = ArcIndex(arcs)
        assert index.containing(point("2:1")) == [0]
        assert index.containing(point("-1:3")) == [1]

    def test_hull_within(self):
        container = Arc.open(point("1:0"), P0)
        hull = hull_within(container, [Arc.point(point("3:1")), Arc.closed(point("1:1"), point("1:2"))])
        assert hull == Arc.closed(point("3:1"), point("1:2"))
        with pytest.raises(ArcError):
            hull_within(container, [Arc.point(point("-1:1"))])


class TestSurds:
    """Tests for exact quadratic irrationals."""

    def test_make_folds_squares(self):
        value = QuadraticSurd.sqrt(8)
        assert value == QuadraticSurd(Fraction(0), Fraction(2), 2)
        assert QuadraticSurd.sqrt(9) == 3
        assert QuadraticSurd.sqrt(Fraction(1, 2)) == QuadraticSurd(Fraction(0), Fraction(1, 2), 2)

    def test_arithmetic(self):
        root = QuadraticSurd.sqrt(2)
        assert root * root == 2
        assert (1 + root) * (1 - root) == -1
        assert 1 / root == root / 2

    def test_sign(self):
        assert sign(QuadraticSurd(Fraction(-1), Fraction(1), 2)) == 1
        assert sign(QuadraticSurd(Fraction(2), Fraction(-1), 5)) == -1
        assert sign(Fraction(0)) == 0

    def test_mixed_radicands_raise(self):
        with pytest.raises(BoundaryError):
            QuadraticSurd.sqrt(2) + QuadraticSurd.sqrt(3)

    def test_sqrt_bounds(self):
        for value in (Fraction(2), Fraction(1, 3), QuadraticSurd.make(3, 1, 2)):
            low, high = sqrt_lower(value), sqrt_upper(value)
            assert low <= high
            assert low * low <= float(value) + 1e-12
            assert high * high >= float(value) - 1e-12


class TestTails:
    """Tests for certified orbit tails."""

    def test_parabolic_tail(self):
        base = Arc.closed(point("1:0"), point("1:1"))
        tail = certify_tail(P0, base, C0, 4)
        assert len(tail.branches) == 2
        assert tail.eta > 0
        far = [act(C0 ** 10, point("1:0")), act(C0 ** -10, point("1:1"))]
        for p in far:
            assert any(hull.contains(p) for hull in tail.hull_arcs())

    def test_base_containing_fixed_point(self):
        with pytest.raises(TailCertificationError):
            certify_tail(P0, Arc.closed(point("1:0"), point("-1:1")), C0, 4)

    def test_elliptic_map(self):
        with pytest.raises(TailCertificationError):
            certify_tail(P0, Arc.closed(point("1:0"), point("1:1")), Matrix2.from_rows([[0, -1], [1, 0]]), 4)

    def test_certificate_dict_round_trip(self):
        tail = certify_tail(P0, Arc.closed(point("1:0"), point("1:1")), C0, 3)
        restored = TailCertificate.from_dict(tail.to_dict())
        assert restored.center == tail.center
        assert restored.hull_arcs() == tail.hull_arcs()

    def test_symbolic_union(self):
        tail = certify_tail(P0, Arc.closed(point("1:0"), point("1:1")), C0, 4)
        union = SymbolicUnion([Arc.closed(point("1:0"), point("1:1"))], [point("1:3")], tail)
        assert union.tail_certified
        assert union.contains_enumerated(point("1:3"))
        assert union.is_inside(Arc.full())
        assert not union.is_inside(Arc.open(point("1:0"), P0))
