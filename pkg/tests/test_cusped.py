"""Tests for the cusped space: vertices, balls, geodesics and the geometry checks."""
import json

import pytest

from app.cusped.ball import ball_from_file, ball_to_file, build_ball, norm_upper_bound
from app.cusped.exceptions import (
    BallBudgetError,
    BallFileError,
    CuspedSpaceError,
    RegularizationError,
    VertexNotInBallError,
)
from app.cusped.geodesics import hausdorff_upper, horoball_transits, is_regular, regularize
from app.cusped.hyperbolicity import estimate_delta, four_point_defect
from app.cusped.lemmas import (
    MAX_WITNESSES,
    LemmaCheck,
    check_metric,
    check_regularization,
    run_geometry_checks,
)
from app.cusped.vertices import (
    IDENTITY_VERTEX,
    CayleyVertex,
    HoroVertex,
    cayley_vertex,
    horo_vertex,
    horoball_cost,
    neighbors,
    parse_vertex_label,
    vertex_label,
)


class TestVertices:
    """Tests for vertex construction and the horoball edge rule."""

    def test_cayley_vertex_reduces(self):
        assert cayley_vertex("a a^-1 b") == CayleyVertex("b")
        assert cayley_vertex("c") == CayleyVertex("abAB")

    def test_horo_vertex_uses_coset(self):
        assert horo_vertex("ab c c", 3) == HoroVertex("ab", 2, 3)
        assert horo_vertex("ab", 0) == CayleyVertex("ab")
        with pytest.raises(CuspedSpaceError):
            horo_vertex("a", -1)

    def test_identity_neighbors(self):
        """Test the identity has six Cayley neighbours and one vertical one."""
        result = neighbors(IDENTITY_VERTEX, depth_cap=3)
        assert len(result) == 7
        assert CayleyVertex("a") in result
        assert CayleyVertex("abAB") in result
        assert HoroVertex("", 0, 1) in result

    def test_horizontal_span_doubles(self):
        result = neighbors(HoroVertex("", 0, 2), depth_cap=3)
        horizontal = [v for v in result if v.depth == 2]
        assert len(horizontal) == 2 * 4

    def test_depth_cap_stops_rising(self):
        result = neighbors(HoroVertex("", 0, 2), depth_cap=2)
        assert all(v.depth <= 2 for v in result)

    def test_neighbors_are_symmetric(self):
        for vertex in (CayleyVertex("ab"), horo_vertex("a c", 1), HoroVertex("", -2, 2)):
            for w in neighbors(vertex, 4):
                assert vertex in neighbors(w, 4)

    def test_horoball_cost(self):
        assert horoball_cost(4) == (4, 1)
        assert horoball_cost(8)[0] == 6
        assert horoball_cost(0) == (0, 0)

    def test_labels(self):
        for vertex in (CayleyVertex(""), CayleyVertex("aB"), HoroVertex("b", -3, 2)):
            assert parse_vertex_label(vertex_label(vertex)) == vertex
        with pytest.raises(CuspedSpaceError):
            parse_vertex_label("x:1")


class TestBall:
    """Tests for finite balls of the cusped space."""

    def test_levels(self, ball):
        assert ball.norm_of(IDENTITY_VERTEX) == 0
        assert ball.norm_of(CayleyVertex("a")) == 1
        assert ball.norm_of(CayleyVertex("abAB")) == 1
        assert max(ball.base_distance.values()) == ball.radius

    def test_radius_one_ball(self):
        small = build_ball(1)
        assert small.vertex_count == 8
        assert small.is_complete()

    def test_distance_is_certified_near_identity(self, ball):
        result = ball.distance(CayleyVertex("a"), CayleyVertex("b"))
        assert result.value == 2
        assert result.certified

    def test_norm_inside_and_outside(self, ball):
        assert ball.norm("ab") == (2, True)
        deep = ball.norm("c" * 40)
        assert not deep.exact
        assert deep.value == norm_upper_bound("c" * 40)

    def test_norm_upper_bound(self):
        assert norm_upper_bound("") == 0
        assert norm_upper_bound("ab") == 2
        assert norm_upper_bound("c" * 4) == 4
        assert norm_upper_bound("c" * 8) == 6
        assert norm_upper_bound("a" + "C" * 8) == 7

    def test_upper_bound_dominates_exact_norm(self, ball):
        for vertex in ball.vertices_within(2):
            if isinstance(vertex, CayleyVertex):
                assert norm_upper_bound(vertex.word) >= ball.norm_of(vertex)

    def test_missing_vertex(self, ball):
        with pytest.raises(VertexNotInBallError):
            ball.norm_of(CayleyVertex("a" * 20))

    def test_bad_radius(self):
        with pytest.raises(CuspedSpaceError):
            build_ball(-1)
        with pytest.raises(CuspedSpaceError):
            build_ball(4, depth_cap=2)

    def test_budget(self):
        with pytest.raises(BallBudgetError):
            build_ball(5, max_vertices=100)

    def test_file_round_trip(self, tmp_path):
        small = build_ball(2)
        small.metadata["delta_hat"] = 2
        path = tmp_path / "ball.json"
        ball_to_file(small, path)
        restored = ball_from_file(path)
        assert restored.vertex_count == small.vertex_count
        assert restored.edge_count == small.edge_count
        assert restored.metadata["delta_hat"] == 2
        assert restored.base_distance == small.base_distance

    def test_bad_file(self, tmp_path):
        path = tmp_path / "ball.json"
        path.write_text(json.dumps({"metadata": {"radius": 1}}))
        with pytest.raises(BallFileError):
            ball_from_file(path)
        with pytest.raises(BallFileError):
            ball_from_file(tmp_path / "missing.json")


class TestGeodesics:
    """Tests for geodesics, transits and regularization."""

    def test_geodesic_length_matches_distance(self, ball):
        for vertex in ball.vertices_within(2)[:40]:
            path = ball.geodesic(IDENTITY_VERTEX, vertex)
            assert len(path) == ball.norm_of(vertex)
            assert path.start == IDENTITY_VERTEX
            assert path.end == vertex

    def test_regularize_keeps_ends_and_length(self, ball):
        for vertex in ball.vertices_within(ball.radius // 2)[:60]:
            path = ball.geodesic(IDENTITY_VERTEX, vertex)
            regular = regularize(path)
            assert regular.start == path.start
            assert regular.end == path.end
            assert len(regular) == len(path)

    def test_deep_geodesic_transits_one_horoball(self, ball):
        path = ball.geodesic(IDENTITY_VERTEX, CayleyVertex("abAB" * 4))
        transits = horoball_transits(path)
        assert len(transits) <= 1
        assert is_regular(regularize(path))

    def test_regularize_rejects_length_mismatch(self, ball, monkeypatch):
        path = ball.geodesic(IDENTITY_VERTEX, CayleyVertex("abAB" * 4))
        assert horoball_transits(path)
        monkeypatch.setattr("app.cusped.geodesics.regular_segment", lambda start, end: [start, end])
        with pytest.raises(RegularizationError):
            regularize(path)

    def test_hausdorff_of_a_path_with_itself(self, ball):
        path = ball.geodesic(IDENTITY_VERTEX, CayleyVertex("ab"))
        assert hausdorff_upper(path, path) == 0

    def test_hausdorff_requires_common_ends(self, ball):
        first = ball.geodesic(IDENTITY_VERTEX, CayleyVertex("ab"))
        second = ball.geodesic(IDENTITY_VERTEX, CayleyVertex("ba"))
        with pytest.raises(CuspedSpaceError):
            hausdorff_upper(first, second)


class TestHyperbolicity:
    """Tests for the δ estimate."""

    def test_estimate_is_deterministic(self, ball):
        first = estimate_delta(ball, 20, seed=3)
        second = estimate_delta(ball, 20, seed=3)
        assert first.delta_hat == second.delta_hat
        assert first.delta_hat >= 1
        assert first.delta_hat == max(1, first.max_defect + 1)

    def test_report_is_labelled_an_estimate(self, ball):
        data = estimate_delta(ball, 5).to_dict()
        assert "not a certified" in data["note"]
        assert data["samples"] == 5

    def test_four_point_of_collinear_points(self, ball):
        a, b, c = CayleyVertex(""), CayleyVertex("a"), CayleyVertex("aa")
        assert four_point_defect(ball, a, b, c, a) >= 0


class TestLemmaCheck:
    """Tests for the check record shared by every verification step."""

    def test_vacuous_until_checked(self):
        check = LemmaCheck("demo", "demo reference")
        assert check.vacuous
        assert check.passed

    def test_witnesses_are_capped(self):
        check = LemmaCheck("demo", "demo reference", checked=50)
        for i in range(25):
            check.record({"i": i})
        assert len(check.violations) == MAX_WITNESSES
        assert check.details["violation_count"] == 25
        assert not check.passed

    def test_to_dict(self):
        data = LemmaCheck("demo", "ref", checked=1).finish().to_dict()
        assert data == {
            "name": "demo",
            "reference": "ref",
            "checked": 1,
            "vacuous": False,
            "passed": True,
            "violations": [],
            "details": {},
        }


class TestGeometryChecks:
    """Tests for the sampled geometry checks on the small ball."""

    def test_metric_axioms(self, ball):
        check = check_metric(ball, 10_000)
        assert check.checked == 10_000
        assert check.passed

    def test_regularization_counts_mismatched_transits(self, ball, monkeypatch):
        """A transit whose regular replacement has another length is a witness, not a silent keep."""
        monkeypatch.setattr("app.cusped.geodesics.regular_segment", lambda start, end: [start, end])
        check = check_regularization(ball, 200)
        assert check.checked > 0
        assert not check.passed
        assert "regular path has 1" in check.violations[0]["reason"]

    def test_battery_names(self, ball, delta):
        checks = run_geometry_checks(ball, delta.delta_hat, 20)
        assert len(checks) == 6
        assert checks[0].name == "metric_axioms"
        assert checks[0].passed
