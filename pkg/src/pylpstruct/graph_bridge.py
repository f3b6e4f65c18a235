"""Graphs as metric spaces.

A loop-free undirected graph ``G`` on vertices ``0 .. n-1`` is encoded as
the finite metric space ``M(G)`` with

    d(u, v) = 0  if u == v
    d(u, v) = 1  if {u, v} is an edge
    d(u, v) = 2  otherwise

Any ``{1, 2}``-valued symmetric function satisfies the triangle
inequality, so ``M(G)`` is a metric space, and a bijection of vertices is
an isometry ``M(G0) -> M(G1)`` exactly when it is a graph isomorphism
``G0 -> G1``.  The transfer functions check this pair by pair with exact
rational distances.

Graph file format: the vertex count on the first line, then one edge
``u v`` per line; blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from pylpstruct.errors import LoopDetected, MalformedInputError, NotIsomorphism
from pylpstruct.presentation import FiniteMetricPresentation

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
VertexMap = Tuple[int, ...]


@dataclass(frozen=True)
class Graph:
    """A finite undirected graph without loops.

    Edges are stored as sorted pairs, so ``(1, 0)`` and ``(0, 1)`` are
    the same edge.

    Raises
    ------
    LoopDetected
        For an edge ``(v, v)``.
    ValueError
        For a vertex outside ``0 .. vertex_count - 1``.
    """

    vertex_count: int
    edges: FrozenSet[Edge] = frozenset()

    def __post_init__(self) -> None:
        if self.vertex_count < 0:
            raise ValueError(f"vertex_count must be >= 0, got {self.vertex_count}")
        normalized = set()
        for u, v in self.edges:
            if u == v:
                raise LoopDetected(u)
            for w in (u, v):
                if not 0 <= w < self.vertex_count:
                    raise ValueError(f"Vertex {w} outside 0..{self.vertex_count - 1}")
            normalized.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(normalized))

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Edge]) -> Graph:
        return cls(vertex_count, frozenset(tuple(e) for e in edges))  # type: ignore[misc]

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    # ---- graph files -------------------------------------------------

    @classmethod
    def from_lines(cls, lines: Iterable[str], source: str = "<graph>") -> Graph:
        """Parse the graph file format.

        Raises
        ------
        MalformedInputError
            On a bad line or a vertex out of range.
        LoopDetected
            For an edge ``v v``.
        """
        count: Optional[int] = None
        edges: List[Edge] = []
        for number, raw in enumerate(lines, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if not all(p.isdigit() for p in parts):
                raise MalformedInputError(f"expected integers, got {text!r}", source, number)
            if count is None:
                if len(parts) != 1:
                    raise MalformedInputError("first line must be the vertex count", source, number)
                count = int(parts[0])
                continue
            if len(parts) != 2:
                raise MalformedInputError(f"expected an edge 'u v', got {text!r}", source, number)
            u, v = int(parts[0]), int(parts[1])
            if u == v:
                raise LoopDetected(u)
            if max(u, v) >= count:
                raise MalformedInputError(
                    f"edge {u} {v} outside {count} vertices", source, number
                )
            edges.append((u, v))
        if count is None:
            raise MalformedInputError("graph file is empty", source)
        return cls.from_edges(count, edges)

    def to_lines(self) -> List[str]:
        return [str(self.vertex_count)] + [f"{u} {v}" for u, v in sorted(self.edges)]


@dataclass(frozen=True)
class GraphMetricSpace:
    """``M(G)`` together with its presentation over the metric signature."""

    graph: Graph
    presentation: FiniteMetricPresentation

    @property
    def point_count(self) -> int:
        return self.graph.vertex_count

    def distance(self, u: int, v: int) -> Fraction:
        return self.presentation.distances[u][v]


def graph_distance(graph: Graph, u: int, v: int) -> Fraction:
    if u == v:
        return Fraction(0)
    return Fraction(1) if graph.has_edge(u, v) else Fraction(2)


def encode(graph: Graph) -> GraphMetricSpace:
    """Build ``M(graph)``.

    Raises
    ------
    LoopDetected
        If the graph carries a loop (only possible for graphs built
        around the constructor).
    """
    for u, v in graph.edges:
        if u == v:
            raise LoopDetected(u)
    n = graph.vertex_count
    table = [[graph_distance(graph, u, v) for v in range(n)] for u in range(n)]
    return GraphMetricSpace(graph, FiniteMetricPresentation(table))


# ---------------------------------------------------------------------------
# Transfers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransferReport:
    """Result of checking a vertex map in one direction.

    ``witness`` is the first offending pair when ``ok`` is false.
    """

    mapping: VertexMap
    ok: bool
    witness: Optional[Edge] = None
    reason: str = ""


def _bijection_problem(mapping: Sequence[int], g0: Graph, g1: Graph) -> Optional[str]:
    if len(mapping) != g0.vertex_count:
        return f"map has {len(mapping)} entries for {g0.vertex_count} vertices"
    if g0.vertex_count != g1.vertex_count:
        return f"vertex counts differ ({g0.vertex_count} vs {g1.vertex_count})"
    if sorted(mapping) != list(range(g1.vertex_count)):
        return "map is not a bijection onto the target vertices"
    return None


def isometry_to_isomorphism(
    mapping: Sequence[int], g0: Graph, g1: Graph
) -> TransferReport:
    """Read a point map ``M(g0) -> M(g1)`` as a vertex map.

    Distances of every pair are compared exactly; the first pair whose
    distance changes is reported.
    """
    image = tuple(mapping)
    problem = _bijection_problem(image, g0, g1)
    if problem is not None:
        return TransferReport(image, False, None, problem)
    m0, m1 = encode(g0), encode(g1)
    for u, v in itertools.combinations(range(g0.vertex_count), 2):
        if m0.distance(u, v) != m1.distance(image[u], image[v]):
            logger.debug("Pair (%d, %d) changes distance under %s", u, v, image)
            return TransferReport(
                image,
                False,
                (u, v),
                f"d({u},{v}) = {m0.distance(u, v)} but "
                f"d({image[u]},{image[v]}) = {m1.distance(image[u], image[v])}",
            )
    return TransferReport(image, True)


def isomorphism_to_isometry(
    mapping: Sequence[int], g0: Graph, g1: Graph
) -> TransferReport:
    """Certify a graph isomorphism as an isometry of the encoded spaces.

    Raises
    ------
    NotIsomorphism
        If *mapping* is not a bijection or breaks the edge relation; the
        offending pair is attached.
    """
    image = tuple(mapping)
    if len(g0.edges) != len(g1.edges):
        raise NotIsomorphism(
            f"edge counts differ ({len(g0.edges)} vs {len(g1.edges)})"
        )
    problem = _bijection_problem(image, g0, g1)
    if problem is not None:
        raise NotIsomorphism(problem)
    for u, v in itertools.combinations(range(g0.vertex_count), 2):
        if g0.has_edge(u, v) != g1.has_edge(image[u], image[v]):
            raise NotIsomorphism(f"edge relation of ({u}, {v}) not kept", (u, v))
    report = isometry_to_isomorphism(image, g0, g1)
    if not report.ok:
        raise NotIsomorphism(report.reason, report.witness)
    return report


# ---------------------------------------------------------------------------
# Brute force
# ---------------------------------------------------------------------------

def all_isomorphisms(g0: Graph, g1: Graph) -> List[VertexMap]:
    """Every isomorphism ``g0 -> g1`` in lexicographic order."""
    if g0.vertex_count != g1.vertex_count or len(g0.edges) != len(g1.edges):
        return []
    found = []
    for perm in itertools.permutations(range(g1.vertex_count)):
        if all(g1.has_edge(perm[u], perm[v]) for u, v in g0.edges):
            found.append(perm)
    return found


def all_isometries(m0: GraphMetricSpace, m1: GraphMetricSpace) -> List[VertexMap]:
    """Every distance-preserving bijection ``m0 -> m1`` in lexicographic order."""
    if m0.point_count != m1.point_count:
        return []
    n = m0.point_count
    found = []
    for perm in itertools.permutations(range(n)):
        if all(
            m0.distance(u, v) == m1.distance(perm[u], perm[v])
            for u, v in itertools.combinations(range(n), 2)
        ):
            found.append(perm)
    return found
