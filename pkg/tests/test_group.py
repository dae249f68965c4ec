"""Tests for words, matrices and the representations ρ_t."""
from fractions import Fraction

import pytest

from app.boundary.points import BoundaryPoint, act
from app.group.exceptions import FixedPointError, NotInvertibleError, RepresentationError, WordParseError
from app.group.matrices import Matrix2, TransformationType, classify, format_fraction, to_fraction
from app.group.representation import (
    A_MATRIX,
    PeripheralDescriptor,
    Representation,
    deformed_representation,
    evaluate,
    standard_representation,
)
from app.group.transformations import attracting_repelling, eigenvalue_at, fixed_points
from app.group.words import (
    GENERATORS,
    GroupElement,
    c_power,
    enumerate_words,
    format_word,
    free_reduce,
    inverse_word,
    parse_word,
    peripheral_coset_decompose,
    reduce,
)


class TestWords:
    """Tests for parsing and reducing words."""

    def test_parse_compact_and_exponents(self):
        """Test the accepted spellings of inverses and powers."""
        assert parse_word("ab") == "ab"
        assert parse_word("a^-1 b²") == "Abb"
        assert parse_word("a⁻¹·b") == "Ab"
        assert parse_word("c^(3)") == "ccc"
        assert parse_word("") == ""

    def test_parse_rejects_unknown_letter(self):
        """Test an unknown letter raises WordParseError."""
        with pytest.raises(WordParseError):
            parse_word("ax")

    def test_parse_rejects_unclosed_exponent(self):
        with pytest.raises(WordParseError):
            parse_word("a^(2")

    def test_free_reduce_cancels_pairs(self):
        assert free_reduce("aAbB") == ""
        assert free_reduce("abBA") == ""
        assert free_reduce("abA") == "abA"

    def test_reduce_expands_commutator_letters(self):
        """Test c stands for a b a⁻¹ b⁻¹."""
        assert reduce("c") == "abAB"
        assert reduce("cC") == ""
        assert reduce("Bc") == "BabAB"

    def test_inverse_word(self):
        assert inverse_word("abAB") == "baBA"
        assert reduce("ab" + inverse_word("ab")) == ""

    def test_enumerate_words_counts(self):
        """Test reduced words of length ≤ 2 over four letters."""
        words = list(enumerate_words(2, GENERATORS))
        assert len(words) == 1 + 4 + 12
        assert words[0] == ""
        assert all(free_reduce(w) == w for w in words)

    def test_format_word(self):
        assert format_word("") == "1"
        assert format_word("aB", unicode=True) == "a b⁻¹"

    def test_c_power(self):
        assert c_power(2) == "cc"
        assert c_power(-1) == "C"
        assert c_power(0) == ""


class TestCosets:
    """Tests for the ⟨c⟩-coset decomposition."""

    def test_peripheral_element(self):
        """Test a power of c decomposes with the trivial representative."""
        assert peripheral_coset_decompose("ccc") == ("", 3)
        assert peripheral_coset_decompose("CC") == ("", -2)

    def test_representative_and_exponent(self):
        rep, exponent = peripheral_coset_decompose("abcc")
        assert rep == "ab"
        assert exponent == 2

    def test_decomposition_reconstructs_element(self):
        for word in ("aab", "bAc", "abAB", "BBcA"):
            rep, exponent = peripheral_coset_decompose(word)
            assert reduce(rep + c_power(exponent)) == reduce(word)

    def test_representative_depends_on_coset_only(self):
        """Test g and g·c⁵ get the same representative."""
        assert peripheral_coset_decompose("ba")[0] == peripheral_coset_decompose("ba" + "c" * 5)[0]


class TestGroupElement:
    """Tests for the GroupElement wrapper."""

    def test_multiply_and_inverse(self):
        g = GroupElement.from_word("a b")
        h = GroupElement.from_word("b^-1 a")
        assert (g * h).word == "aa"
        assert (g * g.inverse()).is_identity

    def test_rejects_unreduced_word(self):
        with pytest.raises(WordParseError):
            GroupElement("aA")

    def test_ordering_is_length_then_lex(self):
        assert GroupElement("a") < GroupElement("b")
        assert GroupElement("B") < GroupElement("aa")


class TestMatrices:
    """Tests for exact projective matrices."""

    def test_to_fraction(self):
        assert to_fraction("-1/6") == Fraction(-1, 6)
        assert to_fraction(3) == Fraction(3)
        assert format_fraction(Fraction(4, 2)) == "2"

    def test_projective_equality(self):
        m = Matrix2.from_rows([[1, 2], [3, 4]])
        assert m == Matrix2.from_rows([[-2, -4], [-6, -8]])
        assert hash(m) == hash(Matrix2.from_rows([[2, 4], [6, 8]]))

    def test_powers_and_inverse(self):
        assert A_MATRIX ** 3 == A_MATRIX @ A_MATRIX @ A_MATRIX
        assert A_MATRIX ** -1 @ A_MATRIX == Matrix2.identity()

    def test_singular_inverse_raises(self):
        with pytest.raises(NotInvertibleError):
            Matrix2.from_rows([[1, 2], [2, 4]]).inverse()

    def test_classify(self):
        assert classify(A_MATRIX) == TransformationType.HYPERBOLIC
        assert classify(Matrix2.from_rows([[1, 1], [0, 1]])) == TransformationType.PARABOLIC
        assert classify(Matrix2.from_rows([[0, -1], [1, 0]])) == TransformationType.ELLIPTIC
        assert classify(Matrix2.identity()) == TransformationType.IDENTITY


class TestRepresentation:
    """Tests for ρ₀, ρ_t and the peripheral descriptor."""

    def test_standard_commutator_is_parabolic(self):
        rho = standard_representation()
        c = rho.evaluate("abAB")
        assert c == Matrix2.from_rows([[1, 0], [6, 1]])
        assert classify(c) == TransformationType.PARABOLIC

    def test_c_letter_matches_expansion(self):
        rho = standard_representation()
        assert rho.evaluate("c") == rho.evaluate("abAB")
        assert rho.evaluate("cC") == Matrix2.identity()

    def test_evaluate_human_word(self):
        rho = standard_representation()
        assert evaluate(rho, "a b a^-1 b^-1") == rho.evaluate("c")

    def test_long_words_split_consistently(self):
        rho = standard_representation()
        word = "ab" * 50
        assert rho.evaluate(word) == rho.evaluate("ab") ** 50

    def test_deformed_generator(self):
        rho = deformed_representation("1/100")
        assert rho.b == Matrix2.from_rows([[1, -1], ["-101/100", "201/100"]])
        assert rho.t == Fraction(1, 100)

    @pytest.mark.parametrize("t", ["0", "1/100", "1/2", "-1/100", "-3"])
    def test_commutator_trace(self, t):
        """Test tr ρ_t(c) = ±(7 − (3 + t)²)."""
        value = to_fraction(t)
        c = deformed_representation(value).evaluate("c")
        assert c.det == 1
        assert c.trace ** 2 == (7 - (3 + value) ** 2) ** 2

    def test_commutator_type_by_sign_of_t(self):
        assert classify(deformed_representation("1/100").evaluate("c")) == TransformationType.HYPERBOLIC
        assert classify(deformed_representation("-1/100").evaluate("c")) == TransformationType.ELLIPTIC
        assert classify(deformed_representation(0).evaluate("c")) == TransformationType.PARABOLIC

    def test_rejects_wrong_determinant(self):
        with pytest.raises(RepresentationError):
            Representation(Matrix2.from_rows([[2, 0], [0, 1]]), A_MATRIX)

    def test_config_round_trip(self):
        rho = deformed_representation("1/400")
        assert Representation.from_config(rho.as_config()) == rho

    def test_bad_config(self):
        with pytest.raises(RepresentationError):
            Representation.from_config({"a": [[1, 1], [1, 2]]})

    def test_peripheral_fixed_point(self):
        peripheral = PeripheralDescriptor(standard_representation())
        assert peripheral.p0 == BoundaryPoint(0, 1)
        assert peripheral.translation_length != 0

    def test_translation_coordinate_shifts(self):
        """Test c acts on the affine coordinate by a constant translation."""
        peripheral = PeripheralDescriptor(standard_representation())
        x = BoundaryPoint(1, 3)
        moved = act(peripheral.matrix, x)
        shift = peripheral.translation_coordinate(moved) - peripheral.translation_coordinate(x)
        assert shift == peripheral.translation_length

    def test_peripheral_requires_parabolic(self):
        with pytest.raises(RepresentationError):
            PeripheralDescriptor(deformed_representation("1/100"))


class TestFixedPoints:
    """Tests for fixed points and dynamics of single matrices."""

    def test_hyperbolic_fixed_points_are_fixed(self):
        points = fixed_points(A_MATRIX)
        assert len(points) == 2
        for p in points:
            assert not p.is_rational
            assert act(A_MATRIX, p) == p

    def test_parabolic_single_fixed_point(self):
        (p,) = fixed_points(Matrix2.from_rows([[1, 0], [6, 1]]))
        assert p == BoundaryPoint(0, 1)

    def test_elliptic_has_none(self):
        assert fixed_points(Matrix2.from_rows([[0, -1], [1, 0]])) == ()

    def test_identity_rejected(self):
        with pytest.raises(FixedPointError):
            fixed_points(Matrix2.identity())

    def test_attracting_point(self):
        """Test iterates of a generic point approach the attracting fixed point."""
        attracting, repelling = attracting_repelling(A_MATRIX)
        assert abs(float(eigenvalue_at(A_MATRIX, attracting))) > abs(float(eigenvalue_at(A_MATRIX, repelling)))
        x = act(A_MATRIX ** 12, BoundaryPoint(1, 0))
        assert abs(x.angle - attracting.angle) < 1e-6

    def test_attracting_requires_hyperbolic(self):
        with pytest.raises(FixedPointError):
            attracting_repelling(Matrix2.from_rows([[1, 1], [0, 1]]))
