"""Acceptance-scale runs across seeds, spaces and small graphs.

Run with ``python -m pytest -m acceptance``; they also run in the default
suite.
"""

import itertools

import pytest

from pylpstruct.enums import Certainty
from pylpstruct.graph_bridge import Graph, all_isometries, all_isomorphisms, encode
from pylpstruct.isometry_codes import (
    IsometryTable,
    TermMaps,
    check_conditions,
    search_tables,
)
from pylpstruct.lebesgue import LpSpace, sub
from pylpstruct.presentation import StandardPresentation
from pylpstruct.scramble import HiddenIsometry, ScrambledPresentation
from pylpstruct.synthesis import synthesize_isometry, verify_isometry

pytestmark = [pytest.mark.acceptance, pytest.mark.timeout(600)]

SEEDS = range(10)


@pytest.mark.parametrize("seed", SEEDS)
def test_hidden_tables_are_never_refuted(seed):
    space = LpSpace.of("lpn_sum", 1, 2)
    standard = StandardPresentation(space)
    hidden = HiddenIsometry.random(space, seed, level=2)
    depth = 4
    table = hidden.oracle_table(depth + 1, depth + 2)
    verdict = check_conditions(
        table, standard, standard, TermMaps(standard, standard), depth, 10
    )
    assert verdict.violated == []


@pytest.mark.parametrize(
    "space", [LpSpace.of("lp_n", 1, 2), LpSpace.of("lpn_sum", 1, 2)], ids=str
)
@pytest.mark.parametrize("seed", SEEDS)
def test_search_keeps_the_hidden_table(space, seed):
    # unsigned scrambles keep x0, x1 and x0 + x1 inside the first four indices
    standard = StandardPresentation(space)
    hidden = HiddenIsometry.random(space, seed, level=2, signed=False)
    result = search_tables(standard, standard, TermMaps(standard, standard), 3, 10, 100_000)
    assert hidden.oracle_table(4, 5) in result.survivors


@pytest.mark.parametrize("seed", SEEDS)
def test_search_keeps_the_scrambled_identity(seed):
    space = LpSpace.of("lpn_sum", 1, 2)
    source = StandardPresentation(space)
    target = ScrambledPresentation(HiddenIsometry.random(space, seed, level=2))
    result = search_tables(source, target, TermMaps(source, target), 3, 10, 100_000)
    assert target.oracle_table(4, 5) in result.survivors


def test_identity_holds_at_depth_six():
    plane = StandardPresentation(LpSpace.of("lp_n", 1, 2))
    verdict = check_conditions(
        IsometryTable.identity(7, 8), plane, plane, TermMaps(plane, plane), 6, 10
    )
    assert verdict.overall is Certainty.HOLDS


@pytest.mark.parametrize(
    "space",
    [LpSpace.of("lpn_sum", 1, 2), LpSpace.of("lp_sum", 3)],
    ids=str,
)
@pytest.mark.parametrize("seed", SEEDS)
def test_synthesis_matches_the_hidden_isometry(space, seed):
    target = ScrambledPresentation(HiddenIsometry.random(space, seed, level=2, atoms=3))
    iso = synthesize_isometry(target, 2, 10)
    assert [iso.image_index(m) for m in range(32)] == list(range(32))
    standard = StandardPresentation(space)
    for m in range(32):
        assert sub(iso.apply_index(m), target.hidden.apply(standard.point(m))).is_zero
    report = verify_isometry(
        iso.index_table(32), StandardPresentation(space), target, 32, 10
    )
    assert report.verdict is Certainty.HOLDS


def _graphs(n):
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield Graph.from_edges(n, [p for i, p in enumerate(pairs) if mask >> i & 1])


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_isometries_are_isomorphisms(n):
    graphs = list(_graphs(n))
    spaces = [encode(g) for g in graphs]
    for (g0, m0), (g1, m1) in itertools.product(zip(graphs, spaces), repeat=2):
        assert all_isomorphisms(g0, g1) == all_isometries(m0, m1)
