"""Tests for hidden isometries and scrambled presentations."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pylpstruct.errors import MalformedInputError
from pylpstruct.lebesgue import LpSpace, LpVector, exact_norm_p_power, norm
from pylpstruct.presentation import StandardPresentation, standard_generator
from pylpstruct.scramble import (
    HiddenIsometry,
    ScrambledPresentation,
    dyadic_decomposition,
)
from pylpstruct.signature import random_vector

SPACES = [
    LpSpace.of("lp_n", 1, 3),
    LpSpace.of("lp", 3),
    LpSpace.of("Lp01", 1),
    LpSpace.of("lpn_sum", 3, 2),
    LpSpace.of("lp_sum", 1),
]

seeds = st.integers(min_value=0, max_value=10 ** 6)


class UnscrambledPresentation(ScrambledPresentation):
    """Keeps the hidden map but presents the standard generators."""

    def generator(self, a):
        return standard_generator(self.space, a)


@pytest.fixture
def documented():
    """The signed swap used in the module docstring."""
    space = LpSpace.of("lpn_sum", 1, 2)
    return HiddenIsometry(space, (1, 0), (1, 1), 1, (1, 0), (1, -1))


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

class TestConstruction:

    def test_identity_fixes_vectors(self):
        space = LpSpace.of("lp_sum", 1)
        v = LpVector.basis(space, 7, 2) + LpVector.indicator(space, 0, Fraction(3, 8))
        assert HiddenIsometry.identity(space).apply(v) == v

    def test_random_is_reproducible(self):
        space = LpSpace.of("lp_sum", 1)
        assert HiddenIsometry.random(space, seed=4) == HiddenIsometry.random(space, seed=4)

    def test_random_shapes(self):
        iso = HiddenIsometry.random(LpSpace.of("lpn_sum", 1, 3), seed=2, level=3)
        assert sorted(iso.atom_permutation) == [0, 1, 2]
        assert len(iso.piece_permutation) == 8
        unsigned = HiddenIsometry.random(LpSpace.of("lp", 1), seed=2, atoms=5, signed=False)
        assert unsigned.atom_signs == (1,) * 5
        assert unsigned.piece_level == 0

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"space": LpSpace.of("lp", 1), "atom_permutation": (0, 0), "atom_signs": (1, 1)},
            {"space": LpSpace.of("lp", 1), "atom_permutation": (1, 0), "atom_signs": (1, 2)},
            {"space": LpSpace.of("lp", 1), "atom_permutation": (0,), "atom_signs": ()},
            {
                "space": LpSpace.of("Lp01", 1),
                "piece_level": 1,
                "piece_permutation": (0, 1, 2),
                "piece_signs": (1, 1, 1),
            },
            {"space": LpSpace.of("Lp01", 1), "atom_permutation": (0,), "atom_signs": (1,)},
            {"space": LpSpace.of("lp_n", 1, 2), "atom_permutation": (2, 0, 1), "atom_signs": (1, 1, 1)},
            {"space": LpSpace.of("lp", 1), "piece_signs": (-1,)},
        ],
    )
    def test_invalid_tables(self, kwargs):
        with pytest.raises(ValueError):
            HiddenIsometry(**kwargs)

    def test_vector_from_other_space(self):
        iso = HiddenIsometry.identity(LpSpace.of("lp", 1))
        with pytest.raises(ValueError):
            iso.apply(LpVector.basis(LpSpace.of("lp", 3), 0))


# ---------------------------------------------------------------------------
# Action on vectors
# ---------------------------------------------------------------------------

class TestAction:

    def test_documented_swap(self, documented):
        space = documented.space
        left = LpVector.indicator(space, 0, Fraction(1, 2))
        right = LpVector.indicator(space, Fraction(1, 2), 1)
        assert documented.apply(left) == right
        assert documented.apply(right) == -left
        assert documented.apply(LpVector.basis(space, 0)) == LpVector.basis(space, 1)

    def test_fine_step_function_is_carried_along(self, documented):
        space = documented.space
        v = LpVector.indicator(space, Fraction(1, 8), Fraction(3, 8), 5)
        assert documented.apply(v) == LpVector.indicator(space, Fraction(5, 8), Fraction(7, 8), 5)

    @settings(deadline=None)
    @given(st.sampled_from(SPACES), seeds, seeds)
    def test_norm_is_preserved(self, space, iso_seed, vector_seed):
        iso = HiddenIsometry.random(space, iso_seed, level=3)
        v = random_vector(space, random.Random(vector_seed))
        assert exact_norm_p_power(iso.apply(v)) == exact_norm_p_power(v)

    @settings(deadline=None)
    @given(seeds, seeds)
    def test_norm_is_preserved_for_fractional_p(self, iso_seed, vector_seed):
        space = LpSpace.of("lp_sum", "3/2")
        iso = HiddenIsometry.random(space, iso_seed)
        v = random_vector(space, random.Random(vector_seed))
        assert norm(iso.apply(v), 16).overlaps(norm(v, 16))

    @settings(deadline=None)
    @given(st.sampled_from(SPACES), seeds, seeds)
    def test_linear(self, space, iso_seed, vector_seed):
        iso = HiddenIsometry.random(space, iso_seed)
        rng = random.Random(vector_seed)
        u, v = random_vector(space, rng), random_vector(space, rng)
        assert iso.apply(u + v) == iso.apply(u) + iso.apply(v)
        assert iso.apply(Fraction(-2, 3) * u) == Fraction(-2, 3) * iso.apply(u)

    @settings(deadline=None)
    @given(st.sampled_from(SPACES), seeds, seeds)
    def test_inverse(self, space, iso_seed, vector_seed):
        iso = HiddenIsometry.random(space, iso_seed, level=2)
        v = random_vector(space, random.Random(vector_seed))
        assert iso.inverse().apply(iso.apply(v)) == v
        assert iso.compose(iso.inverse()).apply(v) == v

    @settings(deadline=None)
    @given(seeds, seeds, seeds)
    def test_compose_mixed_levels_and_sizes(self, first_seed, second_seed, vector_seed):
        space = LpSpace.of("lp_sum", 1)
        first = HiddenIsometry.random(space, first_seed, level=1, atoms=3)
        second = HiddenIsometry.random(space, second_seed, level=3, atoms=5)
        v = random_vector(space, random.Random(vector_seed))
        assert second.compose(first).apply(v) == second.apply(first.apply(v))

    def test_compose_needs_same_space(self):
        with pytest.raises(ValueError):
            HiddenIsometry.identity(LpSpace.of("lp", 1)).compose(
                HiddenIsometry.identity(LpSpace.of("lp", 3))
            )


# ---------------------------------------------------------------------------
# Standard-layout images
# ---------------------------------------------------------------------------

class TestStandardImages:

    def test_dyadic_decomposition(self):
        half, quarter = Fraction(1, 2), Fraction(1, 4)
        assert dyadic_decomposition(Fraction(0), 3 * quarter) == [(0, half), (half, 3 * quarter)]
        assert dyadic_decomposition(quarter, Fraction(1)) == [(quarter, half), (half, 1)]
        assert dyadic_decomposition(Fraction(0), Fraction(1)) == [(0, 1)]

    @pytest.mark.parametrize("space", SPACES, ids=str)
    def test_induced_index_matches_scrambled_point(self, space):
        hidden = HiddenIsometry.random(space, seed=17, level=2)
        scrambled = ScrambledPresentation(hidden)
        standard = StandardPresentation(space)
        for m in range(40):
            assert standard.point(hidden.induced_index(m)) == scrambled.point(m)

    def test_oracle_tables(self):
        space = LpSpace.of("lpn_sum", 1, 2)
        hidden = HiddenIsometry.random(space, seed=3, level=1)
        table = hidden.oracle_table(6, 3)
        assert table.is_stationary
        assert (table.rows, table.cols) == (6, 3)
        assert table.f_at(0, 2) == 0
        identity = ScrambledPresentation(hidden).oracle_table(6, 3)
        assert [row[0] for row in identity.f] == list(range(6))

    def test_scrambled_oracle_follows_the_generators(self):
        space = LpSpace.of("lp_n", 1, 2)
        swap = HiddenIsometry(space, (1, 0), (1, 1))

        table = UnscrambledPresentation(swap).oracle_table(4, 5)
        assert [row[0] for row in table.f] == [0, 2, 1, 3]
        assert [row[0] for row in table.g] == [0, 2, 1, 3]
        matched = ScrambledPresentation(swap).oracle_table(4, 5)
        assert [row[0] for row in matched.f] == [0, 1, 2, 3]

    def test_scrambled_oracle_needs_a_match(self):
        space = LpSpace.of("lp_n", 1, 2)
        flip = HiddenIsometry(space, (0, 1), (-1, 1))

        # -x0 is index 4, outside the first two points
        with pytest.raises(ValueError):
            UnscrambledPresentation(flip).oracle_table(2, 3)


# ---------------------------------------------------------------------------
# Scrambled presentations and documents
# ---------------------------------------------------------------------------

class TestScrambledPresentation:

    def test_generators_keep_their_norms(self):
        hidden = HiddenIsometry.random(LpSpace.of("lp_sum", "3/2"), seed=8)
        presentation = ScrambledPresentation(hidden)
        assert presentation.certify_generators(12, 16)
        assert presentation.generator_count is None
        assert presentation.describe() == "scrambled lp_sum(p=3/2)"

    def test_finite_generator_count(self):
        hidden = HiddenIsometry.random(LpSpace.of("lp_n", 1, 3), seed=8)
        assert ScrambledPresentation(hidden).generator_count == 3

    def test_presentation_document(self, documented):
        doc = ScrambledPresentation(documented).to_document()
        assert doc["generators"] == "scrambled"
        assert doc["scramble"]["pieces"] == {"level": 1, "permutation": [1, 0], "signs": [1, -1]}

    def test_document_round_trip(self, documented):
        doc = documented.to_document()
        assert doc["format"] == "pylpstruct-scramble/1"
        assert "signature" not in doc
        assert HiddenIsometry.from_document(doc) == documented

    def test_wrong_format(self, documented):
        doc = {**documented.to_document(), "format": "pylpstruct-presentation/1"}
        with pytest.raises(MalformedInputError):
            HiddenIsometry.from_document(doc)

    @pytest.mark.parametrize(
        "patch",
        [
            {"atoms": {"permutation": [0, 0], "signs": [1, 1]}},
            {"pieces": {"level": 2, "permutation": [1, 0], "signs": [1, 1]}},
            {"structure": "Linf"},
            {"p": "1/2"},
        ],
    )
    def test_inconsistent_documents(self, documented, patch):
        with pytest.raises(MalformedInputError):
            HiddenIsometry.from_document({**documented.to_document(), **patch}, "s.yaml")
