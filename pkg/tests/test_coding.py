"""Tests for codings, tracking, finitary coders and nesting certificates."""
import pytest

from app.boundary.arcs import Arc
from app.boundary.points import BoundaryPoint, act
from app.coding.coder import (
    Coding,
    CodingKind,
    Preference,
    QGSequence,
    check_nesting,
    code_point,
    decode,
)
from app.coding.exceptions import CoderConstructionError, NestingSearchExhaustedError
from app.coding.finitary import CoderEdge, FinitaryPointCoder, search_N, truncate_to_coder
from app.coding.nesting import NestingVariant, verify_uniform_nesting
from app.coding.service import run_coding_battery, sample_points
from app.coding.tracking import (
    hausdorff_codings,
    measure_tracking,
    same_peripheral_coset,
    verify_backtracking,
)
from app.group.representation import A_MATRIX
from app.group.transformations import attracting_repelling

P0 = BoundaryPoint(0, 1)


@pytest.fixture(scope="module")
def conical_point():
    """Attracting fixed point of ρ₀(a)."""
    return attracting_repelling(A_MATRIX)[0]


@pytest.fixture(scope="module")
def conical_coding(conical_point, automaton):
    return code_point(conical_point, automaton, cap=12)


class TestCodePoint:
    """Tests for the inductive coding procedure."""

    def test_p0_terminates_at_once(self, automaton):
        coding = code_point(P0, automaton)
        assert coding.kind == CodingKind.PARABOLIC
        assert coding.vertices == [0]
        assert coding.labels == []

    def test_parabolic_point_decodes_exactly(self, automaton, rho0):
        q = act(rho0.evaluate("aB"), P0)
        coding = code_point(q, automaton)
        assert coding.is_parabolic
        assert decode(coding, automaton).point == q

    def test_conical_coding_is_capped(self, conical_coding):
        assert conical_coding.kind == CodingKind.CONICAL
        assert len(conical_coding) == 12

    def test_conical_point_lies_in_decoded_arc(self, conical_coding, conical_point, automaton):
        decoded = decode(conical_coding, automaton)
        assert decoded.point is None
        assert decoded.arc.contains(conical_point)
        assert decoded.diameter_sq < automaton.epsilon**2

    def test_edges_follow_the_automaton(self, conical_coding, automaton):
        for source, target, _ in conical_coding.edges():
            assert automaton.has_edge(source, target)

    def test_highest_preference_codes_the_same_point(self, conical_point, automaton):
        coding = code_point(conical_point, automaton, cap=8, prefer=Preference.HIGHEST)
        assert decode(coding, automaton).arc.contains(conical_point)

    def test_generalized_coding(self, conical_point, automaton):
        """Test a coding based at g₀ still decodes to the point."""
        coding = code_point(conical_point, automaton, cap=8, g0="b")
        sequence = QGSequence.from_coding(coding, automaton)
        assert sequence.words[0] == "b"
        assert sequence.arcs[-1].contains(conical_point)

    def test_dict_round_trip(self, automaton, rho0):
        coding = code_point(act(rho0.evaluate("ab"), P0), automaton)
        assert Coding.from_dict(coding.to_dict()) == coding


class TestSequences:
    """Tests for the element sequences g_k of a coding."""

    def test_words_and_matrices_agree(self, conical_coding, automaton, rho0):
        sequence = QGSequence.from_coding(conical_coding, automaton)
        assert len(sequence) == len(conical_coding) + 1
        for word, matrix in zip(sequence.words, sequence.matrices):
            assert rho0.evaluate(word) == matrix

    def test_shifted(self, conical_coding, automaton):
        sequence = QGSequence.from_coding(conical_coding, automaton)
        tail = sequence.shifted(3)
        assert tail.words == sequence.words[3:]
        assert len(tail.labels) == len(sequence.labels) - 3

    def test_nesting_checks_pass(self, conical_coding, automaton):
        codings = [conical_coding, code_point(P0, automaton)]
        nesting, repetition = check_nesting(codings, automaton)
        assert nesting.checked == len(conical_coding)
        assert nesting.passed
        assert repetition.passed


class TestTracking:
    """Tests for tracking, backtracking and Hausdorff distances."""

    def test_tracking_of_trivial_sequence(self, automaton, ball):
        sequence = QGSequence.from_coding(code_point(P0, automaton), automaton)
        result = measure_tracking(sequence, ball)
        assert result.R_obs == 0
        assert result.endpoint == ""
        assert not result.guard_exceeded

    def test_tracking_is_bounded(self, conical_coding, automaton, ball):
        result = measure_tracking(QGSequence.from_coding(conical_coding, automaton), ball)
        assert 0 <= result.R_obs <= 2 * ball.radius

    def test_backtracking_passes_on_increasing_norms(self):
        report = verify_backtracking([0, 1, 2, 3], R_track=1, g0_norm=0, delta_hat=1)
        assert report.passed
        assert report.bound == 9
        assert report.slack == 9

    def test_backtracking_bound(self):
        assert verify_backtracking([], R_track=2, g0_norm=1, delta_hat=1).bound == 14

    def test_backtracking_violation(self):
        report = verify_backtracking([20, 5], R_track=1, g0_norm=0, delta_hat=1)
        assert not report.passed
        assert report.violations == [(0, 1)]
        assert report.slack < 0

    def test_hausdorff_of_identical_sequences(self, conical_coding, automaton, ball):
        sequence = QGSequence.from_coding(conical_coding, automaton)
        result = hausdorff_codings(sequence, sequence, ball)
        assert result.value == 0
        assert result.exact

    def test_same_peripheral_coset(self):
        assert same_peripheral_coset("ab", "ab" + "abAB")
        assert same_peripheral_coset("a", "aC")
        assert not same_peripheral_coset("a", "b")


class TestFinitaryCoder:
    """Tests for finitary point coders."""

    def test_edge_inclusion_is_verified(self, rho0):
        sets = [Arc.open(BoundaryPoint(1, 0), BoundaryPoint(1, 1)), Arc.full()]
        with pytest.raises(CoderConstructionError):
            FinitaryPointCoder(sets, [CoderEdge(0, 1, "a")], rho0)

    def test_valid_coder(self, rho0):
        sets = [Arc.full(), Arc.open(BoundaryPoint(1, 0), BoundaryPoint(1, 1))]
        coder = FinitaryPointCoder(sets, [CoderEdge(0, 1, "a")], rho0)
        assert coder.has_edge(0, 1, "a")
        assert not coder.has_edge(1, 0, "a")
        assert coder.labels == frozenset({"a"})

    def test_truncation_keeps_automaton_edges(self, automaton, ball):
        coder = truncate_to_coder(automaton, 3, ball)
        assert len(coder) == len(automaton)
        for edge in coder.edges:
            assert automaton.has_edge(edge.source, edge.target)
            assert ball.norm(edge.label).value <= 3

    def test_search_without_usable_pairs(self, automaton, ball, conical_coding):
        coder = truncate_to_coder(automaton, 0, ball)
        sequence = QGSequence.from_coding(conical_coding, automaton)
        with pytest.raises(NestingSearchExhaustedError):
            search_N(coder, [(sequence, sequence)], N_max=4)


class TestUniformNesting:
    """Tests for nesting certificates of two codings."""

    def test_identical_codings_nest_with_N_one(self, conical_coding, automaton, ball):
        sequence = QGSequence.from_coding(conical_coding, automaton)
        certificate = verify_uniform_nesting(
            sequence, sequence, automaton, ball, D1=1, D2=1000, epsilon_prime=automaton.epsilon / 4
        )
        assert certificate.variant == NestingVariant.SHORT_WORDS
        assert (certificate.N, certificate.M) == (1, 0)
        assert certificate.to_dict()["variant"] == "short_words"


class TestCodingBattery:
    """Tests for the battery run on the small configuration."""

    @pytest.fixture(scope="class")
    def battery(self, automaton, ball, small_config):
        return run_coding_battery(automaton, ball, small_config.coding_parameters())

    def test_sample_points(self, automaton, small_config):
        samples = sample_points(automaton, small_config.coding_parameters())
        parabolic = [s for s in samples if s.parabolic]
        assert parabolic[0].point == P0
        assert parabolic[0].source == ""
        assert len({s.point for s in samples}) == len(samples)
        assert samples == sample_points(automaton, small_config.coding_parameters())

    def test_check_names(self, battery):
        names = [check.name for check in battery.checks]
        assert names == [
            "totality",
            "decode",
            "nesting",
            "repetition",
            "tracking",
            "generalized_tracking",
            "backtracking",
            "D0_stability",
            "jumps",
            "uniform_nesting",
            "coder_N",
        ]

    def test_core_checks_pass(self, battery):
        by_name = {check.name: check for check in battery.checks}
        for name in ("totality", "decode", "nesting", "repetition"):
            assert by_name[name].passed
            assert not by_name[name].vacuous

    def test_measured_constants(self, battery, automaton):
        measured = battery.measured
        assert measured["D1"] == measured["D0"] + 1
        assert measured["D2"] == measured["J"] + 2 * measured["D1"]
        assert measured["R_track"] >= 1
        assert automaton.constants.D2 == measured["D2"]
