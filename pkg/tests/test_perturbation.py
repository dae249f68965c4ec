"""Tests for the deformation ρ_t, the cusp semi-conjugacy φ_p and the semi-conjugacy φ."""
from fractions import Fraction

import pytest

from app.boundary.points import BoundaryPoint, act
from app.group.matrices import TransformationType
from app.cover.constants import Constants
from app.cusped.vertices import CayleyVertex
from app.perturbation.combinatorics import build_perturbed_cover, check_same_combinatorics, check_V_conditions
from app.perturbation.deformation import DEFAULT_CANDIDATES, deform
from app.perturbation.exceptions import ParabolicSemiconjugacyError
from app.perturbation.parabolic import build_phi_p, fiber
from app.perturbation.rho_coding import rho_code_point
from app.perturbation.semiconjugacy import Semiconjugacy, grid_points, verify_semiconjugacy, write_phi_csv
from app.perturbation.service import (
    PerturbationParameters,
    attempt_deformation,
    check_phi_p,
    run_perturbation_battery,
)

P0 = BoundaryPoint(0, 1)
SMALL_T = Fraction(1, 1600)


def phi_p_for(cover, t, epsilon=None, **kwargs):
    return build_phi_p(
        deform(t).rep,
        cover.peripheral,
        cover.shape.fundamental,
        cover.epsilon if epsilon is None else epsilon,
        **kwargs,
    )


class TestDeformation:
    """Tests for the family ρ_t."""

    def test_commutator_types(self):
        assert deform("1/100").commutator == TransformationType.HYPERBOLIC
        assert deform(0).commutator == TransformationType.PARABOLIC
        assert deform("-1/100").commutator == TransformationType.ELLIPTIC

    def test_default_candidates_decrease(self):
        assert list(DEFAULT_CANDIDATES) == sorted(DEFAULT_CANDIDATES, reverse=True)
        assert DEFAULT_CANDIDATES[0] == Fraction(1, 100)

    def test_to_dict(self):
        data = deform("1/400").to_dict()
        assert data["t"] == "1/400"
        assert data["commutator_type"] == "hyperbolic"
        assert set(data["representation"]) >= {"a", "b"}


class TestParabolicSemiconjugacy:
    """Tests for φ_p on the cusp."""

    def test_identity_at_t_zero(self, cover):
        phi_p = phi_p_for(cover, 0)
        assert phi_p.is_identity
        x = BoundaryPoint(3, 7)
        assert phi_p(x) == x
        assert phi_p.preimage_point(P0).is_point

    def test_elliptic_commutator_is_rejected(self, cover):
        with pytest.raises(ParabolicSemiconjugacyError) as info:
            phi_p_for(cover, "-1/100")
        assert info.value.measured is None

    def test_oversized_arc_is_rejected(self, cover):
        with pytest.raises(ParabolicSemiconjugacyError) as info:
            phi_p_for(cover, "1/2", epsilon=Fraction(1, 1000))
        assert info.value.measured > 0.001

    def test_collapsed_arc_maps_to_p0(self, cover):
        phi_p = phi_p_for(cover, SMALL_T)
        assert not phi_p.is_identity
        assert phi_p(phi_p.collapsed.start) == P0
        assert phi_p.diameter < float(cover.epsilon)

    def test_equivariance_off_the_collapsed_arc(self, cover):
        phi_p = phi_p_for(cover, SMALL_T)
        x = cover.shape.fundamental.arc.interior_point()
        assert phi_p(act(phi_p.c_t, x)) == act(phi_p.c_0, phi_p(x))

    def test_check_phi_p(self, cover):
        checks = check_phi_p(phi_p_for(cover, SMALL_T), cover.epsilon, grid=128)
        by_name = {check.name: check for check in checks}
        assert list(by_name) == ["phi_p_equivariance", "phi_p_collapse", "phi_p_closeness"]
        assert by_name["phi_p_equivariance"].passed
        assert by_name["phi_p_collapse"].passed

    def test_anchor_fiber_is_the_collapsed_arc(self, cover):
        phi_p = phi_p_for(cover, SMALL_T)
        assert fiber(phi_p, cover.atoms[0]) == phi_p.collapsed
        assert phi_p.preimage_point(P0) == phi_p.collapsed


class TestUndeformedCover:
    """Tests for the perturbed cover at t = 0, where nothing moves."""

    @pytest.fixture(scope="class")
    def perturbed(self, cover, automaton):
        return build_perturbed_cover(automaton, phi_p_for(cover, 0))

    def test_same_size(self, perturbed, automaton):
        assert len(perturbed) == len(automaton)
        assert perturbed.to_dict()["t"] == "0"

    def test_same_combinatorics(self, perturbed):
        checks = check_same_combinatorics(perturbed)
        assert [check.name for check in checks][0] == "same_combinatorics_covering"
        assert all(check.passed for check in checks)

    def test_V_conditions_without_measured_constants(self, perturbed, ball):
        constants = Constants(Fraction(1), Fraction(1), Fraction(1, 10), Fraction(1, 10))
        checks = check_V_conditions(perturbed, ball, constants)
        assert [check.name for check in checks] == ["V1", "V2", "V3", "V4"]
        assert checks[0].passed
        assert "D1" in checks[1].details["missing"]
        assert checks[1].vacuous

    @staticmethod
    def _measured(D1=1, D2=1, N=1):
        return Constants(
            Fraction(1), Fraction(1), Fraction(1, 10), Fraction(1, 10),
            D1=D1, D2=D2, N=N, epsilon_prime=Fraction(1, 1000),
        )

    @staticmethod
    def _cayley_within(ball, radius):
        return [v for v in ball.vertices_within(radius) if isinstance(v, CayleyVertex)]

    def test_V_conditions_sweep_every_short_word(self, perturbed, ball):
        checks = {check.name: check for check in check_V_conditions(perturbed, ball, self._measured())}
        v2, v3 = checks["V2"], checks["V3"]
        assert v2.details["words"] == v2.details["swept"] == len(self._cayley_within(ball, 2))
        assert v3.details["words"] == v3.details["swept"] == len(self._cayley_within(ball, 1))
        assert "budget_exhausted" not in v2.details
        assert v2.passed and v3.passed

    def test_V_conditions_report_an_exhausted_word_budget(self, perturbed, ball):
        checks = {c.name: c for c in check_V_conditions(perturbed, ball, self._measured(), word_limit=3)}
        v2 = checks["V2"]
        assert v2.details["budget_exhausted"]
        assert v2.details["swept"] == 3
        assert v2.details["words"] > 3
        assert not v2.passed
        assert v2.violations[-1]["reason"] == "word budget exhausted"

    def test_V_conditions_clip_to_the_ball(self, perturbed, ball):
        checks = {c.name: c for c in check_V_conditions(perturbed, ball, self._measured(N=ball.radius))}
        v2 = checks["V2"]
        assert v2.details["norm_bound"] > ball.radius
        assert v2.details["clipped_to_ball"]
        assert v2.details["words"] == len(self._cayley_within(ball, ball.radius))
        assert v2.passed

    def test_rho_coding_of_p0(self, perturbed):
        coding = rho_code_point(P0, perturbed)
        assert coding.is_parabolic
        assert coding.vertices == [0]

    def test_phi_fixes_p0(self, perturbed):
        value = Semiconjugacy(perturbed, cap=16)(P0)
        assert value.exact
        assert value.point == P0
        assert value.radius == 0.0


class TestDeformationAttempts:
    """Tests for single attempts and the negative controls."""

    def test_elliptic_attempt(self, automaton, ball):
        attempt = attempt_deformation(automaton, ball, "-1/100")
        assert attempt.error is not None
        assert attempt.phi_p is None
        assert not attempt.certified

    def test_elliptic_battery_records_the_error(self, automaton, ball):
        battery = run_perturbation_battery(automaton, ball, PerturbationParameters(word_limit=8), fixed_t=Fraction(-1, 100))
        assert battery.error is not None
        assert battery.semiconjugacy is None
        assert not battery.certified
        assert battery.to_dict()["chosen_t"] is None

    def test_large_t_is_not_certified(self, automaton, ball):
        battery = run_perturbation_battery(automaton, ball, PerturbationParameters(word_limit=8), fixed_t=Fraction(1, 2))
        assert not battery.certified
        assert battery.attempts[0].measured["collapsed_diameter"] >= float(automaton.epsilon)


class TestSemiconjugacy:
    """Tests for φ through ρ-codings, on the undeformed representation."""

    @pytest.fixture(scope="class")
    def report(self, cover, automaton):
        phi_p = phi_p_for(cover, 0)
        semiconjugacy = Semiconjugacy(build_perturbed_cover(automaton, phi_p), cap=32)
        return verify_semiconjugacy(semiconjugacy, grid=32, sample_count=3, oracle_level=1)

    def test_grid_points(self):
        points = grid_points(4)
        assert len(points) == 4
        assert points[0] == BoundaryPoint(1, 0)

    def test_identity_is_close_and_degree_one(self, report):
        by_name = {check.name: check for check in report.checks}
        assert by_name["phi_totality"].passed
        assert by_name["closeness"].passed
        assert report.measured["degree"] == 1
        assert report.measured["closeness_max"] < report.measured["epsilon"]

    def test_report_lists_the_oracle(self, report):
        data = report.to_dict()
        assert data["oracle"]["level"] == 1
        assert "sup_distance" in data["oracle"]

    def test_collapse_oracle_is_a_check(self, report):
        by_name = {check.name: check for check in report.checks}
        assert by_name["collapse_oracle"].passed
        assert report.oracle["max_collapsed_diameter"] == 0.0
        assert report.oracle["within_bound"]

    def test_csv(self, report, tmp_path):
        path = tmp_path / "phi.csv"
        write_phi_csv(report.values, path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("x,x_angle,phi")
        assert len(lines) == len(report.values) + 1


class TestHyperbolicSemiconjugacy:
    """Tests for φ at a small deformation with hyperbolic commutator."""

    @pytest.fixture(scope="class")
    def semiconjugacy(self, cover, automaton):
        return Semiconjugacy(build_perturbed_cover(automaton, phi_p_for(cover, SMALL_T)), cap=32)

    @pytest.fixture(scope="class")
    def report(self, semiconjugacy):
        return verify_semiconjugacy(semiconjugacy, grid=32, sample_count=3, oracle_level=2)

    def test_commutator_is_hyperbolic(self):
        assert deform(SMALL_T).commutator == TransformationType.HYPERBOLIC

    def test_total_and_degree_one(self, report):
        by_name = {check.name: check for check in report.checks}
        assert by_name["phi_totality"].passed
        assert report.measured["degree"] == 1
        assert report.measured["closeness_max"] < report.measured["epsilon"]

    def test_oracle_collapses_arcs(self, report):
        assert report.oracle["arcs"] > 0
        assert report.oracle["max_collapsed_diameter"] > 0
        assert report.oracle["bound"] == pytest.approx(3 * report.oracle["max_collapsed_diameter"])

    def test_oracle_bound_fails_the_report(self, semiconjugacy, monkeypatch):
        monkeypatch.setattr("app.perturbation.semiconjugacy.ORACLE_FACTOR", 0)
        report = verify_semiconjugacy(semiconjugacy, grid=32, sample_count=3, oracle_level=2)
        oracle = next(check for check in report.checks if check.name == "collapse_oracle")
        assert not oracle.passed
        assert set(oracle.violations[0]) == {"x", "phi", "distance"}
        assert not report.oracle["within_bound"]
        assert not report.passed
