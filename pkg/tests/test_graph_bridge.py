"""Tests for graphs as metric spaces and the isomorphism transfers."""

import itertools
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from networkx.algorithms.isomorphism import GraphMatcher

from pylpstruct.errors import LoopDetected, MalformedInputError, NotIsomorphism
from pylpstruct.graph_bridge import (
    Graph,
    all_isometries,
    all_isomorphisms,
    encode,
    isometry_to_isomorphism,
    isomorphism_to_isometry,
)


@st.composite
def graphs(draw, max_vertices=5, min_vertices=1):
    n = draw(st.integers(min_value=min_vertices, max_value=max_vertices))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, chosen)


def to_networkx(graph):
    g = nx.Graph()
    g.add_nodes_from(range(graph.vertex_count))
    g.add_edges_from(graph.edges)
    return g


def networkx_isomorphisms(g0, g1):
    matcher = GraphMatcher(to_networkx(g0), to_networkx(g1))
    return sorted(
        tuple(m[v] for v in range(g0.vertex_count)) for m in matcher.isomorphisms_iter()
    )


@pytest.fixture
def path():
    return Graph.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def bent_path():
    return Graph.from_edges(3, [(1, 0), (0, 2)])


# ---------------------------------------------------------------------------
# Graphs and their files
# ---------------------------------------------------------------------------

class TestGraph:

    def test_edges_are_normalized(self):
        graph = Graph.from_edges(3, [(2, 0), (0, 2)])
        assert graph.edges == frozenset({(0, 2)})
        assert graph.has_edge(2, 0)

    def test_loop(self):
        with pytest.raises(LoopDetected) as info:
            Graph.from_edges(2, [(1, 1)])
        assert info.value.vertex == 1

    def test_vertex_out_of_range(self):
        with pytest.raises(ValueError):
            Graph.from_edges(2, [(0, 2)])

    def test_file_round_trip(self, path):
        lines = path.to_lines()
        assert lines == ["3", "0 1", "1 2"]
        assert Graph.from_lines(["# a path", ""] + lines) == path

    def test_file_loop(self):
        with pytest.raises(LoopDetected):
            Graph.from_lines(["3", "1 1"])

    @pytest.mark.parametrize(
        "lines",
        [[], ["# nothing"], ["3 1"], ["3", "0"], ["3", "0 x"], ["3", "0 3"]],
    )
    def test_bad_files(self, lines):
        with pytest.raises(MalformedInputError):
            Graph.from_lines(lines, "g.txt")


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------

class TestEncode:

    def test_distances(self, path):
        space = encode(path)
        assert space.point_count == 3
        assert space.distance(0, 1) == 1
        assert space.distance(0, 2) == 2
        assert space.distance(2, 2) == 0
        assert space.presentation.eval_metric(0, 2, 5).contains(Fraction(2))

    def test_empty_graph(self):
        assert encode(Graph(0)).point_count == 0

    @given(graphs())
    def test_triangle_inequality(self, graph):
        space = encode(graph)
        n = space.point_count
        for u, v, w in itertools.product(range(n), repeat=3):
            assert space.distance(u, w) <= space.distance(u, v) + space.distance(v, w)


# ---------------------------------------------------------------------------
# Transfers
# ---------------------------------------------------------------------------

class TestTransfers:

    def test_isomorphism_is_isometry(self, path, bent_path):
        # the middle vertex 1 goes to the middle vertex 0
        report = isomorphism_to_isometry((1, 0, 2), path, bent_path)
        assert report.ok
        assert report.mapping == (1, 0, 2)

    def test_identity_is_not_an_isomorphism(self, path, bent_path):
        with pytest.raises(NotIsomorphism) as info:
            isomorphism_to_isometry((0, 1, 2), path, bent_path)
        assert info.value.witness == (0, 2)

    def test_edge_counts_differ(self, path):
        with pytest.raises(NotIsomorphism):
            isomorphism_to_isometry((0, 1, 2), path, Graph(3))

    def test_not_a_bijection(self, path):
        with pytest.raises(NotIsomorphism):
            isomorphism_to_isometry((0, 0, 2), path, path)

    def test_isometry_report(self, path, bent_path):
        report = isometry_to_isomorphism((0, 1, 2), path, bent_path)
        assert not report.ok
        assert report.witness == (0, 2)
        assert "d(0,2) = 2" in report.reason

    def test_isometry_report_size_mismatch(self, path):
        report = isometry_to_isomorphism((0, 1), path, path)
        assert not report.ok
        assert report.witness is None


# ---------------------------------------------------------------------------
# Brute force against networkx
# ---------------------------------------------------------------------------

class TestBruteForce:

    def test_path_automorphisms(self, path):
        assert all_isomorphisms(path, path) == [(0, 1, 2), (2, 1, 0)]
        assert all_isometries(encode(path), encode(path)) == [(0, 1, 2), (2, 1, 0)]

    def test_different_sizes(self, path):
        assert all_isomorphisms(path, Graph(4)) == []
        assert all_isometries(encode(path), encode(Graph(2))) == []

    @settings(deadline=None)
    @given(graphs(), st.data())
    def test_matches_networkx(self, graph, data):
        n = graph.vertex_count
        perm = data.draw(st.permutations(range(n)))
        relabeled = Graph.from_edges(n, [(perm[u], perm[v]) for u, v in graph.edges])
        expected = networkx_isomorphisms(graph, relabeled)
        assert tuple(perm) in expected
        assert all_isomorphisms(graph, relabeled) == expected
        assert all_isometries(encode(graph), encode(relabeled)) == expected

    @settings(deadline=None)
    @given(graphs(4), graphs(4))
    def test_transfers_agree(self, g0, g1):
        if g0.vertex_count != g1.vertex_count:
            return
        isomorphisms = set(networkx_isomorphisms(g0, g1))
        for perm in itertools.permutations(range(g0.vertex_count)):
            assert isometry_to_isomorphism(perm, g0, g1).ok == (perm in isomorphisms)
