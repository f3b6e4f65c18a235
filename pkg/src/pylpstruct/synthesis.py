"""Recovering isometries of L^p-sum spaces from disintegrations.

Given a presentation ``P`` of ``ell^p_n (+)_p L^p[0,1]`` (or of a pure
atomic space), :func:`synthesize_isometry` builds the disintegration of
``P``'s generators, partitions it into almost norm-maximizing chains and
reads off

* the atoms ``g_j`` as the limits of the atom-certified chains, and
* the continuous part as the correspondence between the dyadic pieces
  of the standard tree and the pieces of ``P``'s tree.

The resulting map sends the standard generator of ``e_k`` to
``g_{j_k} / ||g_{j_k}||`` and the standard generator of a dyadic piece to
the matching label of ``P``.  It is exported as an
:class:`~pylpstruct.isometry_codes.IsometryTable` so it can be checked by
:func:`verify_isometry` and :func:`~pylpstruct.isometry_codes.check_conditions`.

The module also evaluates the stage-bounded sets

* ``A1 = {(n, k) : ||g_n||_p >= 2^-k}`` and
* ``A2 = {(v, M, k) : ||sum_{n >= M} chi_{C_n}(v) g_n||_p <= 2^-k}``.
"""

from __future__ import annotations

import concurrent.futures
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from pylpstruct.disintegration import (
    Address,
    ChainLimit,
    ChainPartition,
    VectorTree,
    chain_limits,
    default_probes,
    disintegrate,
    format_address,
    is_prefix,
    partition_chains,
    validate_disintegration,
)
from pylpstruct.enums import AtomVerdict, Certainty, SpaceKind, StageVerdict
from pylpstruct.errors import (
    AtomCountMismatch,
    GridTooSmall,
    PrecisionExhausted,
    UnknownChainLimit,
    UnsupportedSpace,
)
from pylpstruct.exact import (
    DyadicInterval,
    Exponent,
    interval_abs,
    interval_sub,
    pow2,
    pow_fraction,
)
from pylpstruct.isometry_codes import IsometryTable, TermMaps
from pylpstruct.lebesgue import LpSpace, LpVector, norm, sub
from pylpstruct.presentation import (
    BanachPresentation,
    Presentation,
    Term,
    atom_generator,
    index_of,
    term_of,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Projection onto the continuous part
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Approximation:
    """A vector with a bound on its distance to the exact value."""

    vector: LpVector
    error_bound: Fraction


def recover_projection(
    tree: VectorTree,
    partition: ChainPartition,
    limits: Sequence[ChainLimit],
    address: Address,
    k: int,
) -> Approximation:
    """``P(phi(v))``: the label of *address* minus its atomic chain limits.

    Every atom-certified chain with a node at or below *address* has a
    limit under ``phi(v)``; those witnesses are subtracted.

    Raises
    ------
    UnknownChainLimit
        If the chain through *address* is still ``unknown-at-depth``.
    """
    own = partition.chain_of(address)
    if limits[own].verdict is AtomVerdict.UNKNOWN:
        raise UnknownChainLimit(own)
    vector = tree.label(address)
    error = pow2(k)
    below = {
        partition.chain_of(a) for a in tree.nodes if is_prefix(address, a)
    }
    for chain_id in sorted(below):
        limit = limits[chain_id]
        if limit.verdict is AtomVerdict.ATOM:
            vector = sub(vector, limit.witness)
            error += limit.witness_error
    return Approximation(vector, error)


# ---------------------------------------------------------------------------
# Synthesis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AtomImage:
    """Where the standard atom ``e_index`` goes."""

    index: int
    chain_id: int
    witness: LpVector
    norm: DyadicInterval
    term: Term


@dataclass
class SynthesizedIsometry:
    """A map from the standard presentation onto a target presentation.

    Attributes
    ----------
    atom_images:
        One entry per standard atom, in atom order.
    continuous_map:
        Standard piece number ``n`` -> the target term of ``T_1(1_{D_n})``.
    generator_terms:
        Standard generator -> target term; the map on rational points is
        the linear extension of this table.
    """

    target: BanachPresentation
    depth: int
    k: int
    atom_images: List[AtomImage] = field(default_factory=list)
    continuous_map: Dict[int, Term] = field(default_factory=dict)
    generator_terms: Dict[int, Term] = field(default_factory=dict)

    def image_index(self, index: int) -> int:
        """Target index of the image of standard rational point *index*.

        Each summand ``q * x_a`` becomes ``q`` times the summands of the
        image of ``x_a``, so term syntax is kept.

        Raises
        ------
        PrecisionExhausted
            If a generator of the term is not reached by the tree.
        """
        summands = []
        for a, q in term_of(index).summands:
            image = self.generator_terms.get(a)
            if image is None:
                raise PrecisionExhausted(
                    f"Generator x{a} is not reached at depth {self.depth}"
                )
            summands.extend((b, q * c) for b, c in image.summands)
        return index_of(Term(tuple(summands)))

    def apply_index(self, index: int) -> LpVector:
        return self.target.point(self.image_index(index))

    def index_table(self, count: int, cols: Optional[int] = None) -> IsometryTable:
        """Stationary table of the map on the first *count* points.

        The inverse side is filled by searching for each target point
        among the images; points whose preimage is not among the first
        *count* images map to ``0``.
        """
        width = self.k + 2 if cols is None else cols
        forward = [self.image_index(m) for m in range(count)]
        vectors = {}
        for m, j in enumerate(forward):
            vectors.setdefault(self.target.point(j), m)
        backward = [vectors.get(self.target.point(m), 0) for m in range(count)]
        return IsometryTable.stationary(forward, backward, width)


def _expected_atoms(target: BanachPresentation, tree: VectorTree) -> int:
    kind = target.space.kind
    if kind.is_finite_dimensional_atomic:
        return target.space.dimension or 0
    if kind.has_atoms:
        return tree.atom_horizon or 0
    return 0


def synthesize_isometry(
    target: BanachPresentation, depth: int, k: int
) -> SynthesizedIsometry:
    """Build the isometry from the standard presentation onto *target*.

    Parameters
    ----------
    target:
        A presentation in the standard generator layout of an ``lp_n``,
        ``lp``, ``lpn_sum`` or ``lp_sum`` space (typically a
        :class:`~pylpstruct.scramble.ScrambledPresentation`).
    depth:
        Depth budget of the disintegration.
    k:
        Precision of every norm enclosure.

    Raises
    ------
    UnsupportedSpace
        For ``Lp01`` targets (no atoms to recover).
    AtomCountMismatch
        If the number of atom-certified chains differs from the number of
        atoms of the tree.
    PrecisionExhausted
        If an atom witness has no certified norm.
    """
    space = target.space
    if space.kind is SpaceKind.LP01:
        raise UnsupportedSpace("Lp01 presentations carry no atoms to synthesize from")
    if space.p.value == 2:
        logger.warning("p = 2: Hilbert space isometries are not lattice maps")
    tree = disintegrate(target, depth)
    report = validate_disintegration(tree, k, k, default_probes(space, 0))
    partition = partition_chains(tree, report)
    limits = chain_limits(tree, partition, k)
    atom_chains = [lim for lim in limits if lim.verdict is AtomVerdict.ATOM]
    expected = _expected_atoms(target, tree)
    if len(atom_chains) != expected:
        raise AtomCountMismatch(expected, len(atom_chains))

    result = SynthesizedIsometry(target, depth, k)
    for i, limit in enumerate(atom_chains):
        enclosure = norm(limit.witness, k)
        if not enclosure.certainly_gt(0):
            raise PrecisionExhausted(f"Atom chain {limit.chain_id} has no certified norm")
        # atom witnesses are single coordinates, so the norm is exact
        size = abs(limit.witness.atomic.entries[0][1])
        last = partition.chains[limit.chain_id][-1]
        node_index = tree.nodes[last].index
        if node_index is None:
            raise PrecisionExhausted(f"Node {format_address(last)} has no term")
        term = Term(tuple((b, c / size) for b, c in term_of(node_index).summands))
        result.atom_images.append(AtomImage(i, limit.chain_id, limit.witness, enclosure, term))
        result.generator_terms[atom_generator(space, i)] = term

    if space.kind.has_continuum:
        for address, node in tree.nodes.items():
            if node.index is None or not node.label.atomic.is_zero:
                continue
            summands = term_of(node.index).summands
            if len(summands) != 1:
                continue
            generator = summands[0][0]
            piece = _piece_of(space, generator)
            if piece is not None:
                result.continuous_map[piece] = term_of(node.index)
                result.generator_terms[generator] = term_of(node.index)
    logger.info(
        "Synthesized isometry onto %s: %d atoms, %d pieces",
        target.describe(),
        len(result.atom_images),
        len(result.continuous_map),
    )
    return result


def _piece_of(space: LpSpace, generator: int) -> Optional[int]:
    kind = space.kind
    if kind is SpaceKind.LPN_SUM:
        n = space.dimension or 0
        return generator - n if generator >= n else None
    if kind is SpaceKind.LP_SUM:
        return generator // 2 if generator % 2 else None
    return None


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairCheck:
    """One distance or algebra clause on a pair of indices."""

    clause: str
    i: int
    j: int
    verdict: Certainty
    discrepancy: DyadicInterval


@dataclass
class VerificationReport:
    """Outcome of :func:`verify_isometry`, checks in index order."""

    count: int
    k: int
    tolerance: Fraction
    checks: List[PairCheck] = field(default_factory=list)

    @property
    def violations(self) -> List[PairCheck]:
        return [c for c in self.checks if c.verdict is Certainty.VIOLATED]

    @property
    def first_violation(self) -> Optional[PairCheck]:
        violations = self.violations
        return violations[0] if violations else None

    @property
    def verdict(self) -> Certainty:
        if self.violations:
            return Certainty.VIOLATED
        if any(c.verdict is Certainty.INCONCLUSIVE for c in self.checks):
            return Certainty.INCONCLUSIVE
        return Certainty.HOLDS


def verify_isometry(
    table: IsometryTable,
    source: Presentation,
    target: Presentation,
    count: int,
    k: int,
    workers: int = 1,
    slack: int = 4,
) -> VerificationReport:
    """Certify that *table* is isometric and algebraic on the first points.

    ``F(m)`` is read from column ``min(k, cols - 1)``.  Checked clauses:

    ``distance``
        ``|d(x_i, x_j) - d(F(x_i), F(x_j))| <= slack * 2^-k`` for ``i < j``;
    ``sum``
        ``d(F(x_i + x_j), F(x_i) + F(x_j)) <= slack * 2^-k`` whenever the
        index of ``x_i + x_j`` is below *count*;
    ``zero``
        ``d(F(0), 0) <= slack * 2^-k``.

    Pairs are independent and may be fanned out to *workers* threads;
    the report lists checks in index order regardless.

    Raises
    ------
    GridTooSmall
        If the table has fewer than *count* rows.
    """
    if table.rows < count:
        raise GridTooSmall(("f", count - 1, 0))
    column = min(k, table.cols - 1)
    image = [table.f[m][column] for m in range(count)]
    tolerance = slack * pow2(k)
    maps = TermMaps(source, target)

    def distance_check(pair: Tuple[int, int]) -> PairCheck:
        i, j = pair
        gap = interval_abs(
            interval_sub(source.eval_metric(i, j, k), target.eval_metric(image[i], image[j], k))
        )
        return PairCheck("distance", i, j, gap.check_at_most(tolerance), gap)

    def sum_check(pair: Tuple[int, int]) -> PairCheck:
        i, j = pair
        combined = maps.zeta("+", (i, j))
        value = target.eval_metric(
            image[combined], maps.zeta_prime("+", (image[i], image[j])), k
        )
        return PairCheck("sum", i, j, value.check_at_most(tolerance), value)

    pairs = list(itertools.combinations(range(count), 2))
    sums = []
    if maps.banach:
        sums = [
            (i, j)
            for i, j in itertools.product(range(count), repeat=2)
            if i <= j and maps.zeta("+", (i, j)) < count
        ]
    report = VerificationReport(count, k, tolerance)
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
            report.checks.extend(executor.map(distance_check, pairs))
            report.checks.extend(executor.map(sum_check, sums))
    else:
        report.checks.extend(map(distance_check, pairs))
        report.checks.extend(map(sum_check, sums))
    if maps.banach and count:
        value = target.eval_metric(image[0], maps.zeta_constant("0", k), k)
        report.checks.append(PairCheck("zero", 0, 0, value.check_at_most(tolerance), value))
    logger.debug(
        "Verified %d points at k=%d: %d checks, verdict %s",
        count,
        k,
        len(report.checks),
        report.verdict.value,
    )
    return report


# ---------------------------------------------------------------------------
# Stage sets
# ---------------------------------------------------------------------------

def _power_threshold(k: int, p: Exponent, bits: int) -> DyadicInterval:
    """Enclosure of ``2**(-k p)``."""
    return pow_fraction(pow2(k), p, bits)


def evaluate_a1(
    limits: Sequence[ChainLimit], n: int, k: int, stage: int
) -> StageVerdict:
    """Stage-*stage* verdict on ``(n, k)`` in ``A1``.

    ``OUT`` once the p-th power upper bound of ``g_n`` from nodes of depth
    ``<= stage`` is below ``2^-kp``; ``IN`` once an atom witness of norm
    at least ``2^-k`` is reached.
    """
    limit = limits[n]
    p = limit.witness.space.p
    threshold = _power_threshold(k, p, limit.k + 2 * k + 8)
    if limit.atom_at(stage):
        power = pow_fraction(abs(limit.witness.atomic.entries[0][1]), p, limit.k + 2 * k + 8)
        if power.lo >= threshold.hi:
            return StageVerdict.IN
    bound = limit.stage_bound(stage)
    if bound is not None and bound < threshold.lo:
        return StageVerdict.OUT
    return StageVerdict.UNKNOWN


def _a2_verdict(
    upper: Optional[Fraction], lower: Fraction, threshold: DyadicInterval
) -> StageVerdict:
    if upper is not None and upper <= threshold.lo:
        return StageVerdict.IN
    if lower > threshold.hi:
        return StageVerdict.OUT
    return StageVerdict.UNKNOWN


def _chain_lower(limit: ChainLimit, stage: int, bits: int) -> Fraction:
    if not limit.atom_at(stage):
        return Fraction(0)
    p = limit.witness.space.p
    return pow_fraction(abs(limit.witness.atomic.entries[0][1]), p, bits).lo


def evaluate_a2(
    tree: VectorTree,
    partition: ChainPartition,
    limits: Sequence[ChainLimit],
    address: Address,
    m: int,
    k: int,
    stage: int,
) -> StageVerdict:
    """Stage-*stage* verdict on ``(v, M, k)`` in ``A2``.

    The ``g_n`` are disjointly supported and *address* lies in exactly one
    chain, so the sum has at most one term: that chain's limit when its id
    is at least *m*.
    """
    if address not in tree.nodes:
        raise KeyError(f"Node {format_address(address)} not in tree")
    chain_id = partition.chain_of(address)
    if chain_id < m:
        return StageVerdict.IN
    limit = limits[chain_id]
    bits = limit.k + 2 * k + 8
    threshold = _power_threshold(k, limit.witness.space.p, bits)
    return _a2_verdict(limit.stage_bound(stage), _chain_lower(limit, stage, bits), threshold)


def evaluate_a2_brute(
    tree: VectorTree,
    partition: ChainPartition,
    limits: Sequence[ChainLimit],
    address: Address,
    m: int,
    k: int,
    stage: int,
) -> StageVerdict:
    """:func:`evaluate_a2` summing over every chain ``n >= m`` explicitly."""
    upper: Optional[Fraction] = Fraction(0)
    lower = Fraction(0)
    threshold: Optional[DyadicInterval] = None
    for chain_id in range(m, len(partition)):
        if address not in partition.chains[chain_id]:
            continue
        limit = limits[chain_id]
        bits = limit.k + 2 * k + 8
        threshold = _power_threshold(k, limit.witness.space.p, bits)
        bound = limit.stage_bound(stage)
        upper = None if bound is None or upper is None else upper + bound
        lower += _chain_lower(limit, stage, bits)
    if threshold is None:
        return StageVerdict.IN
    return _a2_verdict(upper, lower, threshold)


@dataclass
class StageSetEvaluator:
    """Verdict tables for ``A1`` and ``A2`` at one stage."""

    tree: VectorTree
    partition: ChainPartition
    limits: Sequence[ChainLimit]
    stage: int

    def a1(self, n: int, k: int) -> StageVerdict:
        return evaluate_a1(self.limits, n, k, self.stage)

    def a2(self, address: Address, m: int, k: int) -> StageVerdict:
        return evaluate_a2(self.tree, self.partition, self.limits, address, m, k, self.stage)

    def a1_table(self, k_max: int) -> Dict[Tuple[int, int], StageVerdict]:
        return {
            (n, k): self.a1(n, k)
            for n in range(len(self.limits))
            for k in range(k_max + 1)
        }

    def a2_table(self, m_max: int, k_max: int) -> Dict[Tuple[Address, int, int], StageVerdict]:
        return {
            (address, m, k): self.a2(address, m, k)
            for address in self.tree.addresses()
            for m in range(m_max + 1)
            for k in range(k_max + 1)
        }
