"""Tests for the separation constants, the verified cover and the automaton."""
import json
from dataclasses import replace
from fractions import Fraction
from types import SimpleNamespace

import pytest

from app.boundary.arcs import Arc, covers
from app.boundary.points import BoundaryPoint, act
from app.cover.automaton import automaton_from_file, automaton_to_file
from app.cover.constants import (
    Constants,
    build_K_p,
    choose_epsilon,
    estimate_D,
    sample_pairs,
    uniform_constant,
)
from app.cover.atoms import verify_atoms
from app.cover.exceptions import ConstantsError, CoverFileError
from app.cover.selection import candidate_centers, cusp_reach, select_cover
from app.cover.service import CoverParameters, build_cover, cover_from_file, cover_to_file, initial_constants
from app.group.matrices import to_fraction
from app.group.representation import PeripheralDescriptor
from app.harness.experiment import ExperimentConfig

P0 = BoundaryPoint(0, 1)


@pytest.fixture(scope="module")
def peripheral(rho0):
    return PeripheralDescriptor(rho0)


@pytest.fixture(scope="module")
def fundamental(peripheral):
    return build_K_p(peripheral)


class TestSeparation:
    """Tests for the D estimate."""

    def test_sample_pairs_are_deterministic(self):
        assert sample_pairs(10, seed=4) == sample_pairs(10, seed=4)
        assert all(x != y for x, y in sample_pairs(10))

    def test_estimate_D(self, rho0):
        value = estimate_D(rho0, sample_pairs(16), word_length=3)
        assert 0 < value <= 1
        assert value == estimate_D(rho0, sample_pairs(16), word_length=3)

    def test_longer_words_separate_more(self, rho0):
        pairs = sample_pairs(16)
        assert estimate_D(rho0, pairs, word_length=4) >= estimate_D(rho0, pairs, word_length=2)

    def test_empty_sample(self, rho0):
        with pytest.raises(ConstantsError):
            estimate_D(rho0, [])

    def test_degenerate_pair(self, rho0):
        with pytest.raises(ConstantsError):
            estimate_D(rho0, [(P0, P0)])


class TestFundamentalArc:
    """Tests for K_p and its translates."""

    def test_avoids_p0(self, fundamental):
        assert not fundamental.arc.contains(P0)
        assert fundamental.D_pi > 0

    def test_translate_shares_endpoint(self, fundamental, peripheral):
        moved = fundamental.arc.image(peripheral.matrix)
        assert moved.closure().intersects(fundamental.arc.closure())
        assert not moved.interior().intersects(fundamental.arc.interior())

    def test_translates_with_tail_cover(self, fundamental, peripheral):
        c = peripheral.matrix
        bound = fundamental.enumerate_bound
        translates = [fundamental.arc.image(c**k) for k in range(-bound, bound + 1)]
        assert covers(translates + fundamental.tail.hull_arcs())

    def test_exponent_estimate(self, fundamental, peripheral):
        inside = fundamental.arc.interior_point()
        for k in (-3, 0, 5):
            moved = act(peripheral.matrix**k, inside)
            assert peripheral.exponent_estimate(moved, fundamental.anchor) == k


class TestEpsilon:
    """Tests for the choice of ε and the constant C."""

    def test_target_bounds_epsilon(self):
        assert choose_epsilon(Fraction(1), Fraction(1), Fraction(1, 10)) == Fraction(9, 100)

    def test_separation_bounds_epsilon(self):
        assert choose_epsilon(Fraction(1, 10), Fraction(1), Fraction(1)) == Fraction(9, 500)

    def test_target_must_be_positive(self):
        with pytest.raises(ConstantsError):
            choose_epsilon(Fraction(1), Fraction(1), Fraction(0))

    def test_uniform_constant(self):
        assert uniform_constant(2, [3, 1]) == 13
        assert uniform_constant(1, []) == 8

    def test_constants_round_trip(self):
        constants = Constants(Fraction(1, 3), Fraction(1, 5), Fraction(1, 100), Fraction(1, 10), delta_hat=3)
        constants.epsilon_z = {0: Fraction(1, 1000)}
        constants.R_track = 7
        assert Constants.from_dict(json.loads(json.dumps(constants.to_dict()))) == constants

    def test_constants_defaults_delta(self):
        data = Constants(Fraction(1), Fraction(1), Fraction(1, 10), Fraction(1, 10)).to_dict()
        data["delta_hat"] = None
        assert Constants.from_dict(data).delta_hat == 1


class TestCover:
    """Tests for the cover of ρ₀ built by the session fixture."""

    def test_anchor_is_parabolic_at_p0(self, cover):
        anchor = cover.atoms[0]
        assert anchor.is_parabolic
        assert anchor.center == P0
        assert 0 in cover.parabolic_indices()

    def test_checks_pass(self, cover):
        names = [check.name for check in cover.checks]
        for name in ("C1", "C2", "C3", "C4", "C5", "C6"):
            assert name in names
        assert cover.passed

    def test_V_sets_cover_the_circle(self, cover):
        assert covers([atom.V for atom in cover.atoms])

    def test_sets_are_nested(self, cover):
        for atom in cover.atoms:
            assert atom.W.contains_arc(atom.V)
            assert atom.hat_W.contains_arc(atom.hat_V)
            assert atom.V.contains(atom.center)

    def test_epsilon_respects_separation(self, cover):
        constants = cover.constants
        assert constants.epsilon <= constants.D / 5
        assert constants.epsilon <= constants.D_pi / 5

    def test_conical_atoms_have_one_label(self, cover):
        for atom in cover.atoms:
            if not atom.is_parabolic:
                assert atom.labels() == [atom.label]

    def test_file_round_trip(self, cover, tmp_path):
        path = tmp_path / "cover.json"
        cover_to_file(cover, path)
        restored = cover_from_file(path)
        assert restored.centers == cover.centers
        assert restored.constants == cover.constants
        assert [c.name for c in restored.checks] == [c.name for c in cover.checks]

    def test_bad_file(self, tmp_path):
        path = tmp_path / "cover.json"
        path.write_text("{}")
        with pytest.raises(CoverFileError):
            cover_from_file(path)

    def test_build_metadata(self, cover):
        assert cover.metadata["cusp_extent"] >= CoverParameters().cusp_extent
        assert cover.metadata["gap_fills"] >= 0

    def test_cusp_grid_meets_V_of_p0(self, cover):
        anchor = cover.atoms[0]
        reach = cusp_reach(anchor, cover.peripheral)
        assert reach >= abs(float(cover.peripheral.translation_coordinate(anchor.V.end)))
        centers = candidate_centers(0, cover.peripheral, grid_size=8, cusp_extent=reach + 2)
        assert any(anchor.V.contains(z) for z, origin in centers if origin == "cusp")

    def test_wider_W_fails_C4(self, cover):
        """A parabolic W with points outside every label translate is rejected."""
        anchor = cover.atoms[0]
        wide = replace(anchor, W=anchor.W.neighborhood(cover.epsilon / 100, outward=True))
        checks = {c.name: c for c in verify_atoms([wide], cover.shape, cover.epsilon, cover.rep, cover.peripheral)}
        assert not checks["C4"].passed
        assert checks["C4"].violations[0]["spanned"] is False
        assert checks["C4"].violations[0]["exponent"] is None

    def test_stored_atoms_pass_C4_and_C5(self, cover):
        checks = verify_atoms(cover.atoms, cover.shape, cover.epsilon, cover.rep, cover.peripheral)
        assert all(check.passed for check in checks)


class TestCoverOfRho0:
    """Tests for building the cover of ρ₀ with the shipped default parameters."""

    @pytest.fixture(scope="class")
    def reference_cover(self, rho0):
        config = ExperimentConfig()
        constants, shape = initial_constants(
            rho0,
            to_fraction(config.cover.epsilon_target),
            config.cover.d_sample_size,
            config.geometry.seed,
        )
        return build_cover(rho0, constants, shape, config.cover_parameters())

    def test_reference_cover_passes(self, reference_cover):
        assert reference_cover.passed
        assert covers([atom.V for atom in reference_cover.atoms])
        assert reference_cover.atoms[0].center == P0

    def test_reference_cusp_grid(self, reference_cover):
        assert reference_cover.metadata["cusp_extent"] >= CoverParameters().cusp_extent


class TestSelection:
    """Tests for the greedy choice of Z and gap filling."""

    ARCS = {
        "anchor": (BoundaryPoint.from_coords(-1, 1), BoundaryPoint.from_coords(1, 1)),
        "next": (BoundaryPoint.from_coords(2, 1), BoundaryPoint.from_coords(-1, 2)),
        "fill": (BoundaryPoint.from_coords(0, 1), BoundaryPoint.from_coords(-2, 1)),
    }

    def _atom(self, name):
        return SimpleNamespace(V=Arc.open(*self.ARCS[name]))

    def test_gap_without_filler(self):
        assert select_cover([self._atom("anchor"), self._atom("next")]) is None

    def test_filler_closes_the_gap(self):
        atoms = [self._atom("anchor"), self._atom("next")]
        frontiers = []

        def fill(z):
            frontiers.append(z)
            return self._atom("fill")

        chosen = select_cover(atoms, fill=fill)
        assert chosen == [0, 1, 2]
        assert len(atoms) == 3
        assert frontiers == [BoundaryPoint.from_coords(-1, 2)]
        assert covers([atoms[i].V for i in chosen])

    def test_filler_must_contain_the_frontier(self):
        atoms = [self._atom("anchor"), self._atom("next")]
        assert select_cover(atoms, fill=lambda z: self._atom("next")) is None

    def test_filler_may_give_up(self):
        assert select_cover([self._atom("anchor"), self._atom("next")], fill=lambda z: None) is None


class TestAutomaton:
    """Tests for the edge set and the E1 certificates."""

    def test_checks(self, automaton):
        names = [check.name for check in automaton.checks]
        assert "E1" in names
        assert "epsilon_z" in names
        assert all(check.passed for check in automaton.checks)

    def test_every_edge_is_certified(self, automaton):
        certified = {(c.source, c.target) for c in automaton.certificates if c.passed}
        assert automaton.edges()
        assert set(automaton.edges()) <= certified

    def test_epsilon_z_for_parabolic_vertices(self, automaton):
        epsilon_z = automaton.constants.epsilon_z
        assert set(epsilon_z) == set(automaton.cover.parabolic_indices())
        assert all(0 < value < automaton.epsilon for value in epsilon_z.values())

    def test_uniform_constant_is_set(self, automaton):
        constants = automaton.constants
        assert constants.C >= 2 * constants.delta_hat + 6

    def test_every_vertex_has_a_successor(self, automaton):
        graph = automaton.graph()
        assert all(graph.out_degree(z) > 0 for z in graph.nodes)

    def test_file_round_trip(self, automaton, tmp_path):
        path = tmp_path / "automaton.json"
        automaton_to_file(automaton, path)
        restored = automaton_from_file(path)
        assert restored.edges() == automaton.edges()
        assert len(restored) == len(automaton)
        assert restored.epsilon == automaton.epsilon
