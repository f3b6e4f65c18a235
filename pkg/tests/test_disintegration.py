"""Tests for vector trees, disintegrations, chain partitions and limits."""

from fractions import Fraction

import pytest

from pylpstruct.enums import AtomVerdict, Certainty
from pylpstruct.errors import MalformedInputError, UnsupportedSpace, ValidationMissing
from pylpstruct.lebesgue import LpSpace, LpVector
from pylpstruct.disintegration import (
    ROOT,
    VectorTree,
    chain_limit,
    chain_limits,
    default_probes,
    disintegrate,
    format_address,
    is_prefix,
    parse_address,
    parse_tree_dump,
    partition_chains,
    standard_disintegration,
    validate_disintegration,
)
from pylpstruct.scramble import HiddenIsometry, ScrambledPresentation

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


@pytest.fixture
def lp01():
    return LpSpace.of("Lp01", 1)


@pytest.fixture
def lp01_tree(lp01):
    return standard_disintegration(lp01, 2)


def validated(tree, probes=16, tolerance_bits=10):
    return validate_disintegration(
        tree, 10, tolerance_bits, default_probes(tree.space, probes)
    )


# ---------------------------------------------------------------------------
# Addresses
# ---------------------------------------------------------------------------

class TestAddresses:

    def test_format_and_parse(self):
        assert format_address(ROOT) == "-"
        assert format_address((0, 1, 1)) == "0.1.1"
        assert parse_address("-") == ROOT
        assert parse_address("2.0") == (2, 0)

    def test_bad_address(self):
        with pytest.raises(MalformedInputError):
            parse_address("0.x")

    def test_prefix(self):
        assert is_prefix((), (1, 0))
        assert is_prefix((1,), (1, 0))
        assert is_prefix((1, 0), (1, 0))
        assert not is_prefix((0,), (1, 0))


# ---------------------------------------------------------------------------
# Tree invariants
# ---------------------------------------------------------------------------

class TestVectorTree:

    def test_needs_root(self, lp01):
        with pytest.raises(ValueError):
            VectorTree.from_labels(lp01, 1, {(0,): LpVector.indicator(lp01, 0, 1)})

    def test_needs_parents(self, lp01):
        labels = {ROOT: LpVector.indicator(lp01, 0, 1), (0, 1): LpVector.indicator(lp01, 0, HALF)}
        with pytest.raises(ValueError):
            VectorTree.from_labels(lp01, 2, labels)

    def test_depth_budget(self, lp01):
        labels = {ROOT: LpVector.indicator(lp01, 0, 1), (0,): LpVector.indicator(lp01, 0, HALF)}
        with pytest.raises(ValueError):
            VectorTree.from_labels(lp01, 0, labels)

    def test_labels_are_injective(self, lp01):
        one = LpVector.indicator(lp01, 0, 1)
        with pytest.raises(ValueError):
            VectorTree.from_labels(lp01, 1, {ROOT: one, (0,): one})

    def test_labels_share_the_space(self, lp01):
        with pytest.raises(ValueError):
            VectorTree.from_labels(lp01, 0, {ROOT: LpVector.basis(LpSpace.of("lp", 1), 0)})

    def test_navigation(self, lp01_tree):
        assert len(lp01_tree) == 7
        assert lp01_tree.addresses()[:3] == [ROOT, (0,), (1,)]
        assert lp01_tree.children((1,)) == [(1, 0), (1, 1)]
        assert lp01_tree.leaves() == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert lp01_tree.label((0, 1)) == LpVector.indicator(lp01_tree.space, QUARTER, HALF)


# ---------------------------------------------------------------------------
# Shipped disintegrations
# ---------------------------------------------------------------------------

class TestStandardDisintegrations:

    def test_lp01_bisection(self, lp01_tree):
        assert lp01_tree.atom_horizon is None
        assert lp01_tree.nodes[ROOT].index == 1
        assert lp01_tree.label(ROOT) == LpVector.indicator(lp01_tree.space, 0, 1)

    def test_lp_n_fan(self):
        space = LpSpace.of("lp_n", 1, 3)
        tree = standard_disintegration(space, 4)
        assert tree.children(ROOT) == [(0,), (1,), (2,)]
        assert tree.label(ROOT) == sum(
            (LpVector.basis(space, i) for i in range(3)), LpVector.zero(space)
        )

    def test_lp_fan_is_cut_at_depth_plus_one(self):
        tree = standard_disintegration(LpSpace.of("lp", 3), 2)
        assert tree.atom_horizon == 3
        assert len(tree.children(ROOT)) == 3

    def test_single_atom_is_one_node(self):
        tree = standard_disintegration(LpSpace.of("lp_n", 1, 1), 3)
        assert len(tree) == 1

    def test_sum_space_layout(self):
        space = LpSpace.of("lpn_sum", 1, 1)
        tree = standard_disintegration(space, 2)
        assert tree.addresses() == [ROOT, (0,), (1,), (1, 0), (1, 1)]
        assert tree.label((0,)) == LpVector.basis(space, 0)
        assert tree.label((1,)) == LpVector.indicator(space, 0, 1)
        assert tree.label((1, 1)) == LpVector.indicator(space, HALF, 1)

    def test_depth_zero_sum(self):
        tree = standard_disintegration(LpSpace.of("lp_sum", 1), 0)
        assert len(tree) == 1

    def test_zero_space(self):
        with pytest.raises(UnsupportedSpace):
            standard_disintegration(LpSpace.of("lp_n", 1, 0), 2)

    def test_negative_depth(self, lp01):
        with pytest.raises(ValueError):
            standard_disintegration(lp01, -1)

    def test_scrambled_tree_is_the_image(self):
        space = LpSpace.of("lp_sum", 1)
        hidden = HiddenIsometry.random(space, seed=6, level=2)
        scrambled = disintegrate(ScrambledPresentation(hidden), 3)
        standard = standard_disintegration(space, 3)
        assert scrambled.addresses() == standard.addresses()
        for address in standard.addresses():
            assert scrambled.label(address) == hidden.apply(standard.label(address))
            assert scrambled.nodes[address].index == standard.nodes[address].index

    def test_default_probes(self, lp01):
        assert default_probes(lp01, 3) == [
            LpVector.indicator(lp01, 0, 1),
            LpVector.indicator(lp01, 0, HALF),
            LpVector.indicator(lp01, HALF, 1),
        ]
        assert len(default_probes(LpSpace.of("lp_n", 1, 3), 16)) == 3


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

class TestValidation:

    @pytest.mark.parametrize(
        "space",
        [
            LpSpace.of("Lp01", 1),
            LpSpace.of("Lp01", "3/2"),
            LpSpace.of("lp_n", 3, 3),
            LpSpace.of("lpn_sum", 1, 2),
            LpSpace.of("lp_sum", 3),
        ],
        ids=str,
    )
    def test_standard_trees_are_disintegrations(self, space):
        tree = standard_disintegration(space, 5)
        report = validated(tree, probes=8)
        assert report.nonvanishing and report.separating and report.summative
        assert report.linearly_dense is Certainty.HOLDS
        assert report.passed
        assert report.failures == []

    def test_probes_beyond_the_horizon_are_skipped(self):
        report = validated(standard_disintegration(LpSpace.of("lp", 1), 2))
        assert report.probes_checked == 3
        assert report.probes_skipped == 13
        assert report.passed

    def test_shallow_tree_is_inconclusive(self, lp01_tree):
        # level-3 pieces are not in the span of the level-2 leaves
        report = validated(lp01_tree)
        assert report.linearly_dense is Certainty.INCONCLUSIVE
        assert not report.passed

    def test_missing_support_is_a_violation(self, lp01):
        tree = VectorTree.from_labels(lp01, 0, {ROOT: LpVector.indicator(lp01, 0, HALF)})
        report = validated(tree, probes=1)
        assert report.linearly_dense is Certainty.VIOLATED
        assert "probe 0" in report.failures[0]

    def test_zero_label(self, lp01):
        tree = VectorTree.from_labels(lp01, 0, {ROOT: LpVector.zero(lp01)})
        assert not validated(tree, probes=0).nonvanishing

    def test_overlapping_children(self, lp01):
        labels = {
            ROOT: LpVector.indicator(lp01, 0, 1),
            (0,): LpVector.indicator(lp01, 0, 3 * QUARTER),
            (1,): LpVector.indicator(lp01, HALF, 1),
        }
        report = validated(VectorTree.from_labels(lp01, 1, labels), probes=0)
        assert not report.separating
        with pytest.raises(ValidationMissing):
            partition_chains(VectorTree.from_labels(lp01, 1, labels), report)

    def test_children_must_sum_to_parent(self, lp01):
        labels = {
            ROOT: LpVector.indicator(lp01, 0, 1),
            (0,): LpVector.indicator(lp01, 0, HALF),
            (1,): LpVector.indicator(lp01, HALF, 3 * QUARTER),
        }
        report = validated(VectorTree.from_labels(lp01, 1, labels), probes=0)
        assert report.separating
        assert not report.summative

    def test_partition_needs_a_report(self, lp01_tree):
        with pytest.raises(ValidationMissing):
            partition_chains(lp01_tree, None)


# ---------------------------------------------------------------------------
# Chains
# ---------------------------------------------------------------------------

class TestChainPartition:

    def test_lp01_depth_two(self, lp01_tree):
        partition = partition_chains(lp01_tree, validated(lp01_tree))
        assert len(partition) == 4
        assert partition.chains == [
            (ROOT, (0,), (0, 0)),
            ((1,), (1, 0)),
            ((0, 1),),
            ((1, 1),),
        ]
        assert partition.chain_of((1, 0)) == 1
        assert partition.chosen[ROOT] == (0,)
        assert partition.all_certified

    def test_every_node_in_exactly_one_chain(self):
        tree = standard_disintegration(LpSpace.of("lp_sum", "3/2"), 4)
        partition = partition_chains(tree, validated(tree, probes=4))
        members = [a for chain in partition.chains for a in chain]
        assert sorted(members) == sorted(tree.addresses())
        for chain_id, chain in enumerate(partition.chains):
            for parent, child in zip(chain, chain[1:]):
                assert child[:-1] == parent
                assert partition.assignment[child] == chain_id

    def test_heavier_child_continues_the_chain(self, lp01):
        labels = {
            ROOT: LpVector.indicator(lp01, 0, 1),
            (0,): LpVector.indicator(lp01, 0, QUARTER),
            (1,): LpVector.indicator(lp01, QUARTER, 1),
        }
        tree = VectorTree.from_labels(lp01, 1, labels)
        partition = partition_chains(tree, validated(tree, probes=0))
        assert partition.chains[0] == (ROOT, (1,))

    def test_strict_mode(self, lp01_tree):
        partition = partition_chains(lp01_tree, validated(lp01_tree), strict=True)
        assert partition.strict
        assert set(partition.strict_certified) == set(partition.certified)
        assert partition.all_certified

    def test_dump_round_trip(self, lp01_tree):
        partition = partition_chains(lp01_tree, validated(lp01_tree))
        lines = lp01_tree.dump_lines(partition.assignment)
        assert lines[0] == "- ; {0 1 1} ; 0"
        tree, chains = parse_tree_dump(lines, lp01_tree.space)
        assert chains == partition.assignment
        assert tree.addresses() == lp01_tree.addresses()
        for address in tree.addresses():
            assert tree.label(address) == lp01_tree.label(address)

    def test_dump_without_chain_ids(self, lp01_tree):
        tree, chains = parse_tree_dump(lp01_tree.dump_lines(), lp01_tree.space)
        assert chains is None
        assert len(tree) == 7

    @pytest.mark.parametrize(
        "lines",
        [
            [],
            ["- ; {0 1 1}"],
            ["- ; {0 1 1} ; x"],
            ["- ; {0 1 1} ; 0", "- ; {0 1 1/2 0 1} ; 0"],
            ["- ; {0 1 1} ; 0", "0.0 ; {0 1 1/2 0 1} ; 0"],
            ["- ; [0:1] ; 0"],
        ],
    )
    def test_bad_dumps(self, lp01, lines):
        with pytest.raises(MalformedInputError):
            parse_tree_dump(lines, lp01)


class TestChainLimits:

    def test_lp_n_chains_end_in_atoms(self):
        tree = standard_disintegration(LpSpace.of("lp_n", 1, 3), 2)
        limits = chain_limits(tree, partition_chains(tree, validated(tree)), 10)
        assert [limit.verdict for limit in limits] == [AtomVerdict.ATOM] * 3
        first = limits[0]
        assert first.witness == LpVector.basis(tree.space, 0)
        assert first.witness_error == 0
        assert first.depths == (0, 1)
        assert first.stage_bound(0) >= 3
        assert first.stage_bound(1) >= 1
        assert first.upper_bound == first.stage_bound(1)
        assert not first.atom_at(0)
        assert first.atom_at(1)

    def test_shallow_continuum_is_unknown(self, lp01_tree):
        limits = chain_limits(lp01_tree, partition_chains(lp01_tree, validated(lp01_tree)), 10)
        assert {limit.verdict for limit in limits} == {AtomVerdict.UNKNOWN}
        assert limits[0].witness_error >= HALF * HALF

    def test_coarse_precision_certifies_zero(self, lp01_tree):
        partition = partition_chains(lp01_tree, validated(lp01_tree))
        limits = chain_limits(lp01_tree, partition, 1)
        assert {limit.verdict for limit in limits} == {AtomVerdict.ZERO}
        assert limits[0].witness.is_zero

    def test_sum_space_mixes_verdicts(self):
        tree = standard_disintegration(LpSpace.of("lpn_sum", 1, 1), 2)
        partition = partition_chains(tree, validated(tree))
        verdicts = [limit.verdict for limit in chain_limits(tree, partition, 10)]
        assert verdicts == [AtomVerdict.ATOM, AtomVerdict.UNKNOWN, AtomVerdict.UNKNOWN]

    def test_chain_id_out_of_range(self, lp01_tree):
        partition = partition_chains(lp01_tree, validated(lp01_tree))
        with pytest.raises(IndexError):
            chain_limit(lp01_tree, partition, 4, 10)

    @pytest.mark.parametrize(
        "space",
        [
            LpSpace.of("Lp01", 1),
            LpSpace.of("Lp01", "3/2"),
            LpSpace.of("lpn_sum", 1, 2),
            LpSpace.of("lp_sum", 3),
        ],
        ids=str,
    )
    def test_chain_bounds_do_not_increase(self, space):
        tree = standard_disintegration(space, 4)
        limits = chain_limits(tree, partition_chains(tree, validated(tree)), 12)
        for limit in limits:
            highs = [bound.hi for bound in limit.norm_upper_bounds]
            assert all(b1 >= b2 for b1, b2 in zip(highs, highs[1:]))
            assert list(limit.depths) == sorted(limit.depths)
