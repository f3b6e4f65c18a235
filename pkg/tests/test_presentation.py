"""Tests for presentations and the numbering of rational points."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pylpstruct.errors import UnsupportedSpace
from pylpstruct.exact import pow2
from pylpstruct.lebesgue import LpSpace, LpVector
from pylpstruct.presentation import (
    BanachPresentation,
    FiniteMetricPresentation,
    PerturbedPresentation,
    StandardPresentation,
    Term,
    atom_generator,
    calkin_wilf,
    calkin_wilf_index,
    canonical_index,
    cantor_pair,
    cantor_unpair,
    dyadic_piece,
    dyadic_piece_number,
    enumerate_rational_points,
    eval_metric,
    index_of,
    nth_rational,
    piece_generator,
    rational_number,
    term_of,
)


# ---------------------------------------------------------------------------
# Numbering
# ---------------------------------------------------------------------------

class TestNumbering:

    def test_first_indices(self):
        one = Fraction(1)
        assert term_of(0) == Term()
        assert term_of(1) == Term(((0, one),))
        assert term_of(2) == Term(((1, one),))
        assert term_of(3) == Term(((0, one), (1, one)))
        assert term_of(4) == Term(((0, -one),))

    def test_rational_order(self):
        expected = ["1", "-1", "1/2", "-1/2", "2", "-2", "1/3", "-1/3", "3/2", "-3/2"]
        assert [str(nth_rational(m)) for m in range(10)] == expected

    @given(st.integers(min_value=0, max_value=5000))
    def test_calkin_wilf_inverse(self, n):
        assert calkin_wilf_index(calkin_wilf(n)) == n

    @given(st.integers(min_value=0, max_value=5000))
    def test_rational_number_inverse(self, m):
        assert rational_number(nth_rational(m)) == m

    @given(st.integers(min_value=0, max_value=400), st.integers(min_value=0, max_value=400))
    def test_cantor_pairing(self, a, m):
        assert cantor_unpair(cantor_pair(a, m)) == (a, m)

    @given(st.integers(min_value=0, max_value=2 ** 40))
    def test_index_round_trip(self, index):
        assert index_of(term_of(index)) == index

    def test_zero_has_no_number(self):
        with pytest.raises(ValueError):
            rational_number(0)

    def test_negative_index(self):
        with pytest.raises(ValueError):
            term_of(-1)

    def test_duplicate_summand(self):
        with pytest.raises(ValueError):
            index_of(Term(((0, Fraction(1)), (0, Fraction(1)))))

    def test_canonical_index(self):
        assert canonical_index({0: 1, 1: 1}) == 3
        assert canonical_index({0: -1, 3: 0}) == 4
        assert canonical_index({}) == 0

    def test_term_coefficients(self):
        term = Term(((2, Fraction(1)), (0, Fraction(1, 2)), (2, Fraction(-1))))
        assert term.coefficients() == {0: Fraction(1, 2)}
        assert term.generators == (0, 2)
        assert str(Term()) == "0"

    def test_dyadic_pieces(self):
        half = Fraction(1, 2)
        assert dyadic_piece(0) == (0, 1)
        assert dyadic_piece(1) == (0, half)
        assert dyadic_piece(2) == (half, 1)
        assert dyadic_piece(3) == (0, Fraction(1, 4))
        for n in range(64):
            assert dyadic_piece_number(*dyadic_piece(n)) == n

    def test_not_a_dyadic_piece(self):
        with pytest.raises(ValueError):
            dyadic_piece_number(Fraction(1, 4), Fraction(3, 4))


# ---------------------------------------------------------------------------
# Standard presentations
# ---------------------------------------------------------------------------

class TestStandardPresentation:

    def test_lp_n_generators(self):
        space = LpSpace.of("lp_n", 1, 2)
        presentation = StandardPresentation(space)
        assert presentation.generator_count == 2
        assert presentation.generator(1) == LpVector.basis(space, 1)
        assert presentation.generator(5).is_zero
        assert presentation.point(3) == LpVector.basis(space, 0) + LpVector.basis(space, 1)

    def test_lp01_generators(self):
        space = LpSpace.of("Lp01", 2)
        presentation = StandardPresentation(space)
        assert presentation.generator_count is None
        assert presentation.generator(1) == LpVector.indicator(space, 0, Fraction(1, 2))
        assert presentation.point(4) == -LpVector.indicator(space, 0, 1)

    def test_lp_sum_interleaves(self):
        space = LpSpace.of("lp_sum", 1)
        presentation = StandardPresentation(space)
        assert presentation.generator(4) == LpVector.basis(space, 2)
        assert presentation.generator(3) == LpVector.indicator(space, 0, Fraction(1, 2))
        assert atom_generator(space, 2) == 4
        assert piece_generator(space, 1) == 3

    def test_lpn_sum_layout(self):
        space = LpSpace.of("lpn_sum", 1, 3)
        presentation = StandardPresentation(space)
        assert presentation.generator(2) == LpVector.basis(space, 2)
        assert presentation.generator(3) == LpVector.indicator(space, 0, 1)
        assert piece_generator(space, 0) == 3

    def test_generator_helpers_need_the_part(self):
        with pytest.raises(UnsupportedSpace):
            atom_generator(LpSpace.of("Lp01", 1), 0)
        with pytest.raises(UnsupportedSpace):
            piece_generator(LpSpace.of("lp", 1), 0)

    def test_metric_in_l2(self):
        presentation = StandardPresentation(LpSpace.of("lp", 2))
        # d(e0, e1) = sqrt(2)
        enclosure = eval_metric(presentation, 1, 2, 20)
        assert enclosure.width <= pow2(20)
        assert enclosure.lo ** 2 <= 2 <= enclosure.hi ** 2

    def test_norm_functional(self):
        presentation = StandardPresentation(LpSpace.of("lp", 1))
        assert presentation.has_norm
        assert presentation.eval_functional("norm", [3], 10).contains(2)

    def test_repeated_points_agree(self):
        presentation = StandardPresentation(LpSpace.of("lp_sum", "3/2"))
        assert presentation.point(77) is presentation.point(77)
        assert presentation.eval_metric(77, 77, 10).contains(0)

    def test_point_memo_is_bounded(self, monkeypatch):
        monkeypatch.setattr("pylpstruct.presentation.POINT_CACHE_SIZE", 4)
        presentation = StandardPresentation(LpSpace.of("lp", 1))
        first = presentation.point(9)
        for index in range(10):
            presentation.point(index)
        info = presentation._cached_point.cache_info()
        assert info.maxsize == 4
        assert info.currsize == 4
        assert presentation.point(9) == first

    def test_memo_is_per_instance(self):
        space = LpSpace.of("lp", 1)
        a, b = StandardPresentation(space), StandardPresentation(space)
        a.point(3)
        assert b._cached_point.cache_info().currsize == 0

    def test_document_is_required(self):
        class Bare(BanachPresentation):
            generator_count = None

            def generator(self, a):
                return LpVector.basis(self.space, a)

        class Described(Bare):
            def to_document(self):
                return {"generators": "bare"}

        with pytest.raises(TypeError):
            Bare(LpSpace.of("lp", 1))
        assert Described(LpSpace.of("lp", 1)).point(2) == LpVector.basis(LpSpace.of("lp", 1), 1)

    def test_enumerate(self):
        presentation = StandardPresentation(LpSpace.of("lp", 1))
        terms = enumerate_rational_points(presentation, 5)
        assert [str(t) for t in terms] == ["0", "1*x0", "1*x1", "1*x0 + 1*x1", "-1*x0"]
        with pytest.raises(ValueError):
            enumerate_rational_points(presentation, -1)

    def test_document(self):
        doc = StandardPresentation(LpSpace.of("lpn_sum", "3/2", 2)).to_document()
        assert doc == {
            "format": "pylpstruct-presentation/1",
            "signature": "banach",
            "structure": "lpn_sum",
            "p": "3/2",
            "dimension": 2,
            "generators": "standard",
        }


# ---------------------------------------------------------------------------
# Perturbed and finite metric presentations
# ---------------------------------------------------------------------------

class TestPerturbedPresentation:

    @pytest.fixture
    def pair(self):
        base = StandardPresentation(LpSpace.of("lp", 1))
        return base, PerturbedPresentation(base, "1/2")

    def test_distances_grow_by_shift(self, pair):
        base, perturbed = pair
        assert base.eval_metric(1, 2, 10).contains(2)
        assert perturbed.eval_metric(1, 2, 10).contains(Fraction(5, 2))

    def test_equal_points_stay_at_zero(self, pair):
        _, perturbed = pair
        assert perturbed.eval_metric(1, 1, 10).contains(0)
        assert perturbed.eval_metric(1, 1, 10).is_point

    def test_norm_grows_by_shift(self, pair):
        _, perturbed = pair
        assert perturbed.eval_functional("norm", [1], 10).contains(Fraction(3, 2))
        assert perturbed.eval_functional("norm", [0], 10).contains(0)

    def test_shift_must_be_positive(self):
        with pytest.raises(ValueError):
            PerturbedPresentation(StandardPresentation(LpSpace.of("lp", 1)), 0)

    def test_document(self, pair):
        _, perturbed = pair
        assert perturbed.to_document()["perturbation"] == "1/2"
        assert "perturbed by 1/2" in perturbed.describe()


class TestFiniteMetricPresentation:

    @pytest.fixture
    def path3(self):
        return FiniteMetricPresentation([[0, 1, 2], [1, 0, 1], [2, 1, 0]])

    def test_points(self, path3):
        assert path3.generator_count == 3
        assert not path3.has_norm
        assert len(path3.enumerate_rational_points(10)) == 3
        assert path3.eval_metric(0, 2, 5).contains(2)

    def test_out_of_range(self, path3):
        with pytest.raises(IndexError):
            path3.eval_metric(0, 3, 5)
        with pytest.raises(IndexError):
            path3.term(5)

    def test_no_functionals(self, path3):
        with pytest.raises(KeyError):
            path3.eval_functional("norm", [0], 5)

    @pytest.mark.parametrize(
        "rows",
        [
            [[0, 1], [2, 0]],
            [[1, 1], [1, 0]],
            [[0, -1], [-1, 0]],
            [[0, 1, 1], [1, 0]],
        ],
    )
    def test_invalid_matrices(self, rows):
        with pytest.raises(ValueError):
            FiniteMetricPresentation(rows)

    def test_document(self, path3):
        doc = path3.to_document()
        assert doc["structure"] == "finite_metric"
        assert doc["signature"] == "metric"
        assert doc["distances"][0] == ["0", "1", "2"]
