"""Property-based tests for words, the projective action and arcs."""
from hypothesis import given, settings, strategies as st

from app.boundary.arcs import Arc
from app.boundary.points import BoundaryPoint, act, chordal_dist_sq
from app.boundary.surds import sqrt_lower, sqrt_upper
from app.group.matrices import classify
from app.group.representation import standard_representation
from app.group.words import ALPHABET, c_power, inverse_word, peripheral_coset_decompose, reduce

RHO = standard_representation()

words = st.text(alphabet=ALPHABET, max_size=10)


@st.composite
def rational_points(draw):
    """Canonical rational points with small coordinates."""
    x = draw(st.integers(min_value=-50, max_value=50))
    y = draw(st.integers(min_value=-50, max_value=50))
    if x == 0 and y == 0:
        y = 1
    return BoundaryPoint.from_coords(x, y)


class TestWordProperties:
    """Tests for reduction and ⟨c⟩-cosets on random words."""

    @given(words)
    def test_reduce_is_idempotent(self, word):
        assert reduce(reduce(word)) == reduce(word)

    @given(words)
    def test_word_times_inverse_is_trivial(self, word):
        assert reduce(word + inverse_word(word)) == ""

    @given(words)
    def test_coset_decomposition_reconstructs(self, word):
        rep, exponent = peripheral_coset_decompose(word)
        assert reduce(rep + c_power(exponent)) == reduce(word)
        assert len(rep) <= len(reduce(word))


class TestActionProperties:
    """Tests for ρ₀ and its action on the projective line."""

    @settings(max_examples=50)
    @given(words, words)
    def test_evaluation_is_multiplicative(self, u, v):
        assert RHO.evaluate(u + v) == RHO.evaluate(u) @ RHO.evaluate(v)

    @settings(max_examples=50)
    @given(words, words, rational_points())
    def test_action_composes(self, u, v, p):
        assert act(RHO.evaluate(u + v), p) == act(RHO.evaluate(u), act(RHO.evaluate(v), p))

    @given(words, words)
    def test_classification_is_conjugation_invariant(self, g, h):
        conjugate = g + h + inverse_word(g)
        assert classify(RHO.evaluate(conjugate)) == classify(RHO.evaluate(h))

    @given(words, rational_points())
    def test_inverse_undoes_action(self, word, p):
        assert act(RHO.evaluate(inverse_word(word)), act(RHO.evaluate(word), p)) == p


class TestChordalProperties:
    """Tests for the chordal metric."""

    @given(rational_points(), rational_points())
    def test_symmetric_and_bounded(self, p, q):
        d = chordal_dist_sq(p, q)
        assert d == chordal_dist_sq(q, p)
        assert 0 <= d <= 1
        assert (d == 0) == (p == q)

    @settings(max_examples=10_000)
    @given(rational_points(), rational_points(), rational_points())
    def test_triangle_inequality(self, p, q, r):
        """Certified roots: upper bounds on two sides dominate a lower bound on the third."""
        left = sqrt_upper(chordal_dist_sq(p, q)) + sqrt_upper(chordal_dist_sq(q, r))
        assert sqrt_lower(chordal_dist_sq(p, r)) <= left

    @given(rational_points(), rational_points(), rational_points())
    def test_arc_and_complement_partition(self, start, end, p):
        if start == end:
            return
        arc = Arc.closed(start, end)
        assert arc.contains(p) != arc.complement().contains(p)
