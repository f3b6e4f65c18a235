"""Vector trees, disintegrations, chain partitions and chain limits.

A *vector tree* labels the nodes of a finite prefix-closed set of integer
addresses with nonzero vectors.  It is a *disintegration* when it is

nonvanishing
    no label is zero;
separating
    labels of incomparable nodes are disjointly supported;
summative
    every nonterminal label is the sum of its children's labels;
linearly dense
    rational combinations of labels approximate every vector.

The shipped trees follow the generator layout of
:mod:`pylpstruct.presentation`:

* ``Lp01``: the dyadic bisection tree, node ``s`` in ``{0,1}^<=D`` labelled
  by the indicator of its dyadic interval;
* ``lp_n`` / ``lp``: the basis fan, root ``e_0 + ... + e_{n-1}`` with the
  atoms as leaf children (``lp`` is cut at ``D + 1`` atoms);
* sums: root ``(e_0 + ..., 1_[0,1])`` whose children are the atoms
  (leaves) followed by ``1_[0,1]``, which bisects.

Tree dump format, one line per node in breadth-first order::

    address ; vector-literal ; chain-id

with the root written ``-``, other addresses as dot-separated child
numbers (``0.1.1``) and ``-`` for a missing chain id.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from pylpstruct.enums import AtomVerdict, Certainty, SpaceKind
from pylpstruct.errors import MalformedInputError, UnsupportedSpace, ValidationMissing
from pylpstruct.exact import DyadicInterval, pow2, root_fraction
from pylpstruct.lebesgue import (
    LpSpace,
    LpVector,
    SeqVector,
    StepFunction,
    add,
    disjointly_supported,
    is_component,
    norm,
    norm_p_power,
    scale,
    sub,
)
from pylpstruct.literals import parse_vector
from pylpstruct.presentation import (
    BanachPresentation,
    StandardPresentation,
    atom_generator,
    canonical_index,
    dyadic_piece_number,
    piece_generator,
    standard_generator,
)

logger = logging.getLogger(__name__)

Address = Tuple[int, ...]

ROOT: Address = ()


def format_address(address: Address) -> str:
    return ".".join(str(i) for i in address) if address else "-"


def parse_address(text: str, source: str = "<tree>", line: Optional[int] = None) -> Address:
    text = text.strip()
    if text == "-":
        return ROOT
    parts = text.split(".")
    if not all(p.isdigit() for p in parts):
        raise MalformedInputError(f"bad node address {text!r}", source, line)
    return tuple(int(p) for p in parts)


def is_prefix(a: Address, b: Address) -> bool:
    """``a`` is a (not necessarily proper) prefix of ``b``."""
    return len(a) <= len(b) and b[: len(a)] == a


# ---------------------------------------------------------------------------
# Vector trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TreeNode:
    """One labelled node; *index* is the label's rational point index in
    the presentation the tree was built from, if known."""

    address: Address
    label: LpVector
    index: Optional[int] = None

    @property
    def depth(self) -> int:
        return len(self.address)


@dataclass(frozen=True)
class VectorTree:
    """An injective labelling of a prefix-closed address set.

    Parameters
    ----------
    space:
        Space of all labels.
    depth:
        Depth budget ``D``; no address is longer than ``D``.
    nodes:
        ``address -> TreeNode``.
    atom_horizon:
        For ``lp`` and ``lp_sum`` trees, the number of atoms the fan
        covers; ``None`` otherwise.

    Raises
    ------
    ValueError
        If the address set is not prefix-closed, exceeds the depth budget
        or two nodes share a label.
    """

    space: LpSpace
    depth: int
    nodes: Mapping[Address, TreeNode]
    atom_horizon: Optional[int] = None
    _children: Dict[Address, List[Address]] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        if ROOT not in self.nodes:
            raise ValueError("A vector tree needs a root")
        seen: Dict[LpVector, Address] = {}
        for address, node in self.nodes.items():
            if node.address != address:
                raise ValueError(f"Node stored under {address} claims {node.address}")
            if len(address) > self.depth:
                raise ValueError(f"Node {format_address(address)} deeper than {self.depth}")
            if address and address[:-1] not in self.nodes:
                raise ValueError(f"Node {format_address(address)} has no parent")
            if node.label.space != self.space:
                raise ValueError(f"Label of {format_address(address)} is not in {self.space}")
            if node.label in seen:
                raise ValueError(
                    f"Nodes {format_address(seen[node.label])} and "
                    f"{format_address(address)} share a label"
                )
            seen[node.label] = address
        kids: Dict[Address, List[Address]] = {a: [] for a in self.nodes}
        for address in self.nodes:
            if address:
                kids[address[:-1]].append(address)
        object.__setattr__(
            self, "_children", {a: sorted(c) for a, c in kids.items()}
        )

    @classmethod
    def from_labels(
        cls,
        space: LpSpace,
        depth: int,
        labels: Mapping[Address, LpVector],
        atom_horizon: Optional[int] = None,
    ) -> VectorTree:
        return cls(
            space,
            depth,
            {a: TreeNode(a, v) for a, v in labels.items()},
            atom_horizon,
        )

    # ---- navigation --------------------------------------------------

    def addresses(self) -> List[Address]:
        """All addresses in breadth-first order."""
        return sorted(self.nodes, key=lambda a: (len(a), a))

    def label(self, address: Address) -> LpVector:
        return self.nodes[address].label

    def children(self, address: Address) -> List[Address]:
        return list(self._children[address])

    def is_terminal(self, address: Address) -> bool:
        return not self.children(address)

    def leaves(self) -> List[Address]:
        return [a for a in self.addresses() if self.is_terminal(a)]

    def __len__(self) -> int:
        return len(self.nodes)

    # ---- dump format -------------------------------------------------

    def dump_lines(self, chains: Optional[Mapping[Address, int]] = None) -> List[str]:
        lines = []
        for address in self.addresses():
            chain = "-" if chains is None else str(chains[address])
            lines.append(f"{format_address(address)} ; {self.label(address)} ; {chain}")
        return lines


def parse_tree_dump(
    lines: Iterable[str], space: LpSpace, source: str = "<tree>"
) -> Tuple[VectorTree, Optional[Dict[Address, int]]]:
    """Read a tree dump; returns the tree and the chain ids if every line
    carries one.

    Raises
    ------
    MalformedInputError
        On a bad line or a tree that violates the tree invariants.
    """
    labels: Dict[Address, LpVector] = {}
    chains: Dict[Address, int] = {}
    for number, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        parts = [p.strip() for p in text.split(";")]
        if len(parts) != 3:
            raise MalformedInputError(
                "expected 'address ; vector ; chain-id'", source, number
            )
        address = parse_address(parts[0], source, number)
        if address in labels:
            raise MalformedInputError(
                f"duplicate node {format_address(address)}", source, number
            )
        labels[address] = parse_vector(parts[1], space, source, number)
        if parts[2] != "-":
            if not parts[2].isdigit():
                raise MalformedInputError(f"bad chain id {parts[2]!r}", source, number)
            chains[address] = int(parts[2])
    if not labels:
        raise MalformedInputError("tree dump is empty", source)
    depth = max(len(a) for a in labels)
    try:
        tree = VectorTree.from_labels(space, depth, labels)
    except ValueError as exc:
        raise MalformedInputError(str(exc), source) from None
    return tree, (chains if len(chains) == len(labels) else None)


# ---------------------------------------------------------------------------
# Standard disintegrations
# ---------------------------------------------------------------------------

def _bisection(
    space: LpSpace, prefix: Address, levels: int
) -> List[Tuple[Address, Dict[int, Fraction]]]:
    shape = []
    frontier: List[Address] = [()]
    for level in range(levels + 1):
        for bits in frontier:
            start = sum((Fraction(b, 2 ** (i + 1)) for i, b in enumerate(bits)), Fraction(0))
            piece = dyadic_piece_number(start, start + Fraction(1, 2**level))
            shape.append((prefix + bits, {piece_generator(space, piece): Fraction(1)}))
        frontier = [bits + (b,) for bits in frontier for b in (0, 1)]
    return shape


def _atom_count(space: LpSpace, depth: int) -> int:
    if space.kind.is_finite_dimensional_atomic:
        return space.dimension or 0
    return depth + 1


def _standard_shape(
    space: LpSpace, depth: int
) -> List[Tuple[Address, Dict[int, Fraction]]]:
    """Addresses with their labels as standard-generator coefficients."""
    kind = space.kind
    one = Fraction(1)
    if kind is SpaceKind.LP01:
        return _bisection(space, ROOT, depth)
    atoms = _atom_count(space, depth)
    atom_terms = [{atom_generator(space, i): one} for i in range(atoms)]
    if kind in (SpaceKind.LP_N, SpaceKind.LP):
        if atoms == 0:
            raise UnsupportedSpace(f"{space} is the zero space")
        if atoms == 1 or depth == 0:
            root = {a: one for t in atom_terms for a in t}
            return [(ROOT, root)]
        root = {a: one for t in atom_terms for a in t}
        return [(ROOT, root)] + [((i,), t) for i, t in enumerate(atom_terms)]
    if atoms == 0:
        return _bisection(space, ROOT, depth)
    root = {a: one for t in atom_terms for a in t}
    root[piece_generator(space, 0)] = one
    shape = [(ROOT, root)]
    if depth == 0:
        return shape
    shape += [((i,), t) for i, t in enumerate(atom_terms)]
    shape += _bisection(space, (atoms,), depth - 1)
    return shape


def disintegrate(presentation: BanachPresentation, depth: int) -> VectorTree:
    """Build the fan / bisection tree over the generators of *presentation*.

    The presentation must use the standard generator layout of its space
    (standard or scrambled); node labels are the corresponding rational
    points and each node records its rational point index.

    Raises
    ------
    UnsupportedSpace
        For the zero space.
    ValueError
        If *depth* is negative.
    """
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    space = presentation.space
    nodes = {}
    for address, coefficients in _standard_shape(space, depth):
        index = canonical_index(coefficients)
        nodes[address] = TreeNode(address, presentation.point(index), index)
    horizon = None
    if space.kind.has_atoms and not space.kind.is_finite_dimensional_atomic:
        horizon = _atom_count(space, depth)
    tree = VectorTree(space, depth, nodes, horizon)
    logger.debug("Built %d-node tree for %s at depth %d", len(tree), space, depth)
    return tree


def standard_disintegration(space: LpSpace, depth: int) -> VectorTree:
    """The shipped disintegration of the standard presentation of *space*."""
    return disintegrate(StandardPresentation(space), depth)


def default_probes(space: LpSpace, count: int) -> List[LpVector]:
    """The first *count* nonzero standard generators."""
    probes = []
    a = 0
    while len(probes) < count:
        vector = standard_generator(space, a)
        if vector.is_zero:
            break
        probes.append(vector)
        a += 1
    return probes


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass
class DisintegrationReport:
    """The four disintegration properties of one tree.

    ``linearly_dense`` is three-valued: ``HOLDS`` means every checked probe
    is certified within ``2**-tolerance_bits`` at this depth.
    """

    depth: int
    nonvanishing: bool
    separating: bool
    summative: bool
    linearly_dense: Certainty
    tolerance_bits: int
    probes_checked: int = 0
    probes_skipped: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            self.nonvanishing
            and self.separating
            and self.summative
            and self.linearly_dense is Certainty.HOLDS
        )


def _inner(f: LpVector, g: LpVector) -> Fraction:
    total = sum(
        (v * g.atomic.coefficient(i) for i, v in f.atomic.entries), Fraction(0)
    )
    product = f.continuous.combine_with(g.continuous, lambda x, y: x * y)
    for a, b, value in product.pieces():
        total += (b - a) * value
    return total


def _separating(tree: VectorTree, failures: List[str]) -> bool:
    # Disjoint siblings that are components of their parents separate the
    # whole tree; otherwise fall back to all incomparable pairs.
    lattice = True
    for address in tree.addresses():
        kids = tree.children(address)
        for child in kids:
            if not is_component(tree.label(child), tree.label(address)):
                lattice = False
        for i, a in enumerate(kids):
            for b in kids[i + 1:]:
                if not disjointly_supported(tree.label(a), tree.label(b)):
                    failures.append(
                        f"separating: {format_address(a)} and {format_address(b)} overlap"
                    )
                    return False
    if lattice:
        return True
    addresses = tree.addresses()
    for i, a in enumerate(addresses):
        for b in addresses[i + 1:]:
            if is_prefix(a, b) or is_prefix(b, a):
                continue
            if not disjointly_supported(tree.label(a), tree.label(b)):
                failures.append(
                    f"separating: {format_address(a)} and {format_address(b)} overlap"
                )
                return False
    return True


def _label_support(tree: VectorTree) -> Tuple[frozenset, StepFunction]:
    """Union of all label supports: atom indices and a 0/1 step mask."""
    atoms: set = set()
    mask = StepFunction.zero()
    for node in tree.nodes.values():
        atoms |= node.label.atomic.support
        mask = mask.combine_with(
            node.label.continuous, lambda m, y: Fraction(1) if m or y else Fraction(0)
        )
    return frozenset(atoms), mask


def _outside(probe: LpVector, atoms: frozenset, mask: StepFunction) -> LpVector:
    """The part of *probe* off the given support."""
    return LpVector(
        probe.space,
        atomic=SeqVector(tuple((i, v) for i, v in probe.atomic.entries if i not in atoms)),
        continuous=probe.continuous.combine_with(
            mask, lambda x, m: x if m == 0 else Fraction(0)
        ),
    )


def _density(
    tree: VectorTree,
    probes: Sequence[LpVector],
    tolerance_bits: int,
    report: DisintegrationReport,
) -> Certainty:
    tolerance = pow2(tolerance_bits)
    leaves = [tree.label(a) for a in tree.leaves()]
    weights = [_inner(leaf, leaf) for leaf in leaves]
    atoms, mask = _label_support(tree)
    verdict = Certainty.HOLDS
    for n, probe in enumerate(probes):
        outside = _outside(probe, atoms, mask)
        if not outside.is_zero:
            beyond = (
                tree.atom_horizon is not None
                and outside.continuous.is_zero
                and all(i >= tree.atom_horizon for i, _ in outside.atomic.entries)
            )
            if beyond:
                report.probes_skipped += 1
                continue
            if norm(outside, tolerance_bits + 2).certainly_gt(tolerance):
                report.failures.append(f"linearly dense: probe {n} leaves the label span")
                verdict = Certainty.VIOLATED
                report.probes_checked += 1
                continue
        report.probes_checked += 1
        approximation = LpVector.zero(tree.space)
        for leaf, weight in zip(leaves, weights):
            overlap = _inner(probe, leaf)
            if overlap and weight:
                approximation = add(approximation, scale(overlap / weight, leaf))
        residual = norm(sub(probe, approximation), tolerance_bits + 2)
        if not residual.certainly_le(tolerance) and verdict is Certainty.HOLDS:
            verdict = Certainty.INCONCLUSIVE
    return verdict


def validate_disintegration(
    tree: VectorTree,
    k: int,
    tolerance_bits: int,
    probes: Sequence[LpVector],
) -> DisintegrationReport:
    """Check the four disintegration properties.

    Nonvanishing, separating and summative are decided exactly.  Linear
    density is tested per probe: each probe is projected leafwise onto the
    leaf labels and the residual norm enclosed at ``tolerance_bits + 2``
    bits.  A probe with a part outside every label support of norm above
    the tolerance is a violation; probes beyond the atom horizon of an
    ``lp`` fan are skipped.

    Parameters
    ----------
    k:
        Precision of the norm enclosures used elsewhere in the pipeline;
        recorded for the report only.
    """
    failures: List[str] = []
    nonvanishing = True
    for address in tree.addresses():
        if tree.label(address).is_zero:
            failures.append(f"nonvanishing: {format_address(address)} is zero")
            nonvanishing = False
            break
    separating = _separating(tree, failures)
    summative = True
    for address in tree.addresses():
        kids = tree.children(address)
        if not kids:
            continue
        total = LpVector.zero(tree.space)
        for child in kids:
            total = add(total, tree.label(child))
        if total != tree.label(address):
            failures.append(f"summative: children of {format_address(address)} miss the label")
            summative = False
            break
    report = DisintegrationReport(
        tree.depth, nonvanishing, separating, summative, Certainty.HOLDS, tolerance_bits
    )
    report.failures = failures
    report.linearly_dense = _density(tree, probes, tolerance_bits, report)
    logger.debug(
        "Validated %d-node tree at k=%d: %s", len(tree), k, "pass" if report.passed else failures
    )
    return report


# ---------------------------------------------------------------------------
# Chain partitions
# ---------------------------------------------------------------------------

@dataclass
class ChainPartition:
    """Chains ``C_0, C_1, ...`` partitioning the nodes of a tree.

    Attributes
    ----------
    chains:
        Node addresses of each chain, root-most first.
    assignment:
        ``address -> chain id``.
    chosen:
        ``parent -> child`` continuing the parent's chain.
    certified:
        Per chosen child, whether ``||phi(s)||^p <= ||phi(c)||^p + 2^-|c|``
        was certified for every sibling ``s``.
    strict_certified:
        Per chosen child, the strict condition
        ``||phi(s)||^p < ||phi(c)||^p + ||phi(parent)||^p / 2`` (only
        filled in strict mode).
    """

    chains: List[Tuple[Address, ...]] = field(default_factory=list)
    assignment: Dict[Address, int] = field(default_factory=dict)
    chosen: Dict[Address, Address] = field(default_factory=dict)
    certified: Dict[Address, bool] = field(default_factory=dict)
    strict: bool = False
    strict_certified: Dict[Address, bool] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.chains)

    def chain_of(self, address: Address) -> int:
        return self.assignment[address]

    @property
    def all_certified(self) -> bool:
        ok = all(self.certified.values())
        if self.strict:
            ok = ok and all(self.strict_certified.values())
        return ok


def partition_chains(
    tree: VectorTree,
    report: Optional[DisintegrationReport],
    strict: bool = False,
) -> ChainPartition:
    """Greedy breadth-first partition into almost norm-maximizing chains.

    At each nonterminal node the children's p-th power norms are enclosed
    at ``2**-(d+2)`` (``d`` the child depth); the chain continues into the
    child with the largest midpoint, the lowest child number winning ties,
    and every other child opens a new chain.  Chain ids follow creation
    order.

    Raises
    ------
    ValidationMissing
        Unless *report* shows the tree separating and summative.
    """
    if report is None or not (report.separating and report.summative):
        raise ValidationMissing(
            "partition_chains needs a tree validated as separating and summative"
        )
    partition = ChainPartition(strict=strict)
    partition.chains.append((ROOT,))
    partition.assignment[ROOT] = 0
    for address in tree.addresses():
        kids = tree.children(address)
        if not kids:
            continue
        d = len(address) + 1
        powers = [norm_p_power(tree.label(c), d + 2) for c in kids]
        best = max(range(len(kids)), key=lambda i: (powers[i].midpoint, -i))
        child = kids[best]
        chain_id = partition.assignment[address]
        partition.chains[chain_id] += (child,)
        partition.assignment[child] = chain_id
        partition.chosen[address] = child
        slack = pow2(d)
        partition.certified[child] = all(
            p.hi <= powers[best].lo + slack for p in powers
        )
        if strict:
            parent = norm_p_power(tree.label(address), d + 2)
            partition.strict_certified[child] = all(
                p.hi < powers[best].lo + parent.lo / 2
                for i, p in enumerate(powers)
                if i != best
            )
        for other in kids:
            if other != child:
                partition.assignment[other] = len(partition.chains)
                partition.chains.append((other,))
    logger.debug("Partitioned %d nodes into %d chains", len(tree), len(partition))
    return partition


# ---------------------------------------------------------------------------
# Chain limits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChainLimit:
    """What the labels along one chain reveal about its limit ``g``.

    Attributes
    ----------
    norm_upper_bounds:
        Enclosure of ``||phi(v)||_p^p`` per chain node; ``||g||_p^p`` lies
        below every upper endpoint.
    depths:
        Node depth per entry of *norm_upper_bounds*.
    verdict:
        ``ATOM`` when the last label is an exact atom, ``ZERO`` when the
        last label is purely continuous with p-th power below ``2**-k``.
    witness, witness_error:
        An approximation of ``g`` and a bound on ``||g - witness||_p``.
    """

    chain_id: int
    norm_upper_bounds: Tuple[DyadicInterval, ...]
    depths: Tuple[int, ...]
    verdict: AtomVerdict
    witness: LpVector
    witness_error: Fraction
    k: int

    @property
    def upper_bound(self) -> Fraction:
        return min(b.hi for b in self.norm_upper_bounds)

    def stage_bound(self, stage: int) -> Optional[Fraction]:
        """Least p-th power upper bound among nodes of depth ``<= stage``."""
        bounds = [b.hi for b, d in zip(self.norm_upper_bounds, self.depths) if d <= stage]
        return min(bounds) if bounds else None

    def atom_at(self, stage: int) -> bool:
        return self.verdict is AtomVerdict.ATOM and self.depths[-1] <= stage


def chain_limit(
    tree: VectorTree, partition: ChainPartition, chain_id: int, k: int
) -> ChainLimit:
    """Bounds and atom verdict for chain *chain_id*."""
    if not 0 <= chain_id < len(partition):
        raise IndexError(f"Chain {chain_id} outside 0..{len(partition) - 1}")
    chain = partition.chains[chain_id]
    bounds = tuple(norm_p_power(tree.label(a), k + 2) for a in chain)
    last = tree.label(chain[-1])
    p = tree.space.p
    if last.is_atom:
        verdict = AtomVerdict.ATOM
        witness, error = last, Fraction(0)
    elif last.atomic.is_zero and bounds[-1].hi < pow2(k):
        verdict = AtomVerdict.ZERO
        witness = LpVector.zero(tree.space)
        error = root_fraction(bounds[-1].hi, p, k).hi
    else:
        verdict = AtomVerdict.UNKNOWN
        witness, error = last, root_fraction(bounds[-1].hi, p, k).hi
    return ChainLimit(
        chain_id, bounds, tuple(len(a) for a in chain), verdict, witness, error, k
    )


def chain_limits(
    tree: VectorTree, partition: ChainPartition, k: int
) -> List[ChainLimit]:
    return [chain_limit(tree, partition, n, k) for n in range(len(partition))]

