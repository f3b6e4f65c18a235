"""Presentations and the frozen numbering of their rational points.

Rational point coding
~~~~~~~~~~~~~~~~~~~~~
For a Banach presentation with generators ``x_0, x_1, ...`` a rational
point is a finite rational linear combination of generators.  Its
*term* is a finite set of summands ``q * x_a``.  Summands are coded by

    c = pair(a, m)     (Cantor pairing)

where ``q`` is the ``m``-th nonzero rational in the order

    1, -1, 1/2, -1/2, 2, -2, 1/3, -1/3, 3/2, -3/2, ...

(magnitudes follow the Calkin-Wilf sequence, signs alternate), and a
term is coded by the integer whose set bits are its summand codes.  So
index ``0`` is the zero term, ``1`` is ``x_0``, ``2`` is ``x_1``, ``3``
is ``x_0 + x_1`` and ``4`` is ``-x_0``.  The numbering is injective on
term syntax; several indices can denote the same vector.

For the bare metric signature the rational points are the generators
themselves and index ``i`` is ``x_i``.

Standard generator layouts
~~~~~~~~~~~~~~~~~~~~~~~~~~
``lp_n``, ``lp``
    the unit vectors ``e_0, e_1, ...`` (``lp_n`` pads with ``0``).
``Lp01``
    dyadic indicators ``1_{D_n}`` in breadth-first order:
    ``D_0 = [0,1]``, ``D_1 = [0,1/2]``, ``D_2 = [1/2,1]``, ``D_3 = [0,1/4]`` ...
``lpn_sum``
    ``e_0 .. e_{n-1}`` followed by the dyadic indicators.
``lp_sum``
    atoms and dyadic indicators interleaved (``x_{2i} = e_i``,
    ``x_{2i+1} = 1_{D_i}``).
"""

from __future__ import annotations

import functools
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from pylpstruct.enums import SpaceKind
from pylpstruct.exact import DyadicInterval, RationalLike, as_fraction, interval_add
from pylpstruct.errors import UnsupportedSpace
from pylpstruct.lebesgue import LpSpace, LpVector, distance, norm
from pylpstruct.signature import (
    BANACH_SIGNATURE,
    METRIC_SIGNATURE,
    BanachSignature,
    Signature,
)

logger = logging.getLogger(__name__)

FORMAT_TAG = "pylpstruct-presentation/1"


# ---------------------------------------------------------------------------
# Pairing and rational numbering
# ---------------------------------------------------------------------------

def cantor_pair(a: int, m: int) -> int:
    """``(a + m)(a + m + 1)/2 + m``."""
    s = a + m
    return s * (s + 1) // 2 + m


def cantor_unpair(code: int) -> Tuple[int, int]:
    """Inverse of :func:`cantor_pair`."""
    s = (isqrt(8 * code + 1) - 1) // 2
    m = code - s * (s + 1) // 2
    return s - m, m


def calkin_wilf(n: int) -> Fraction:
    """The ``n``-th (0-based) positive rational in Calkin-Wilf order."""
    a, b = 1, 1
    for bit in bin(n + 1)[3:]:
        if bit == "0":
            a, b = a, a + b
        else:
            a, b = a + b, b
    return Fraction(a, b)


def calkin_wilf_index(value: Fraction) -> int:
    """Inverse of :func:`calkin_wilf` for positive rationals."""
    if value <= 0:
        raise ValueError(f"Calkin-Wilf numbers positive rationals, got {value}")
    a, b = value.numerator, value.denominator
    bits: List[int] = []
    while (a, b) != (1, 1):
        if a > b:
            steps = a // b if a % b else a // b - 1
            a -= steps * b
            bits.extend([1] * steps)
        else:
            steps = b // a if b % a else b // a - 1
            b -= steps * a
            bits.extend([0] * steps)
    node = 1
    for bit in reversed(bits):
        node = 2 * node + bit
    return node - 1


def nth_rational(m: int) -> Fraction:
    """The ``m``-th nonzero rational (signs alternate, ``+`` first)."""
    magnitude = calkin_wilf(m // 2)
    return -magnitude if m % 2 else magnitude


def rational_number(value: RationalLike) -> int:
    """Inverse of :func:`nth_rational`."""
    q = as_fraction(value)
    if q == 0:
        raise ValueError("Zero has no number among the nonzero rationals")
    return 2 * calkin_wilf_index(abs(q)) + (1 if q < 0 else 0)


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Term:
    """A rational point as a set of ``(generator, coefficient)`` summands."""

    summands: Tuple[Tuple[int, Fraction], ...] = ()

    def coefficients(self) -> Dict[int, Fraction]:
        """Combined coefficient per generator (zeros dropped)."""
        out: Dict[int, Fraction] = {}
        for a, q in self.summands:
            out[a] = out.get(a, Fraction(0)) + q
        return {a: q for a, q in out.items() if q != 0}

    @property
    def generators(self) -> Tuple[int, ...]:
        return tuple(sorted({a for a, _ in self.summands}))

    def __str__(self) -> str:
        if not self.summands:
            return "0"
        return " + ".join(f"{q}*x{a}" for a, q in self.summands)


def term_of(index: int) -> Term:
    """Decode a rational point index."""
    if index < 0:
        raise ValueError(f"Rational point indices are >= 0, got {index}")
    summands = []
    code = 0
    rest = index
    while rest:
        if rest & 1:
            a, m = cantor_unpair(code)
            summands.append((a, nth_rational(m)))
        rest >>= 1
        code += 1
    return Term(tuple(summands))


def index_of(term: Term) -> int:
    """Encode a term; inverse of :func:`term_of`."""
    index = 0
    for a, q in term.summands:
        bit = 1 << cantor_pair(a, rational_number(q))
        if index & bit:
            raise ValueError(f"Duplicate summand {q}*x{a} in term")
        index |= bit
    return index


def canonical_index(coefficients: Mapping[int, RationalLike]) -> int:
    """Index of the term with one summand per nonzero coefficient."""
    return index_of(
        Term(
            tuple(
                (a, as_fraction(q))
                for a, q in sorted(coefficients.items())
                if as_fraction(q) != 0
            )
        )
    )


def dyadic_piece(n: int) -> Tuple[Fraction, Fraction]:
    """Endpoints of ``D_n`` in breadth-first order."""
    level = (n + 1).bit_length() - 1
    j = n + 1 - (1 << level)
    width = Fraction(1, 1 << level)
    return j * width, (j + 1) * width


def dyadic_piece_number(start: Fraction, end: Fraction) -> int:
    """Inverse of :func:`dyadic_piece`."""
    width = end - start
    if width <= 0 or width.numerator != 1 or (start / width).denominator != 1:
        raise ValueError(f"[{start}, {end}] is not a dyadic piece")
    level = width.denominator.bit_length() - 1
    return (1 << level) - 1 + int(start / width)


# ---------------------------------------------------------------------------
# Presentations
# ---------------------------------------------------------------------------

class Presentation(ABC):
    """A structure with an indexed generating sequence.

    Subclasses provide :meth:`eval_metric` on rational point indices and,
    where the signature has functionals, :meth:`eval_functional`.
    """

    signature: Signature

    @property
    @abstractmethod
    def generator_count(self) -> Optional[int]:
        """Number of distinct generators, ``None`` for infinitely many."""

    @abstractmethod
    def term(self, index: int) -> Term:
        """The term denoted by a rational point index."""

    @abstractmethod
    def eval_metric(self, i: int, j: int, k: int) -> DyadicInterval:
        """Enclosure of ``d(x_i, x_j)`` of width at most ``2**-k``."""

    def eval_functional(
        self, symbol: str, indices: Sequence[int], k: int
    ) -> DyadicInterval:
        raise KeyError(
            f"Functional {symbol!r} not interpreted by {type(self).__name__}"
        )

    def enumerate_rational_points(self, bound: int) -> List[Term]:
        """The first *bound* terms in the frozen numbering."""
        return [self.term(i) for i in range(bound)]

    @property
    def has_norm(self) -> bool:
        return self.signature.is_functional("norm")

    def describe(self) -> str:
        return type(self).__name__


def enumerate_rational_points(presentation: Presentation, bound: int) -> List[Term]:
    """Module-level form of :meth:`Presentation.enumerate_rational_points`."""
    if bound < 0:
        raise ValueError(f"bound must be >= 0, got {bound}")
    return presentation.enumerate_rational_points(bound)


def eval_metric(presentation: Presentation, i: int, j: int, k: int) -> DyadicInterval:
    """Module-level form of :meth:`Presentation.eval_metric`."""
    return presentation.eval_metric(i, j, k)


#: Rational points memoized per presentation.
POINT_CACHE_SIZE: int = 4096


class BanachPresentation(Presentation):
    """A presentation of a Lebesgue space over the Banach signature.

    Subclasses define :meth:`generator`; rational points are the
    corresponding linear combinations.  The most recently evaluated
    points are memoized per instance, at most :data:`POINT_CACHE_SIZE`
    of them.
    """

    signature: BanachSignature = BANACH_SIGNATURE

    def __init__(self, space: LpSpace) -> None:
        self.space = space
        self._cached_point = functools.lru_cache(maxsize=POINT_CACHE_SIZE)(
            self._evaluate_point
        )

    @abstractmethod
    def generator(self, a: int) -> LpVector:
        """The vector ``x_a`` (generators past a finite count are ``0``)."""

    def term(self, index: int) -> Term:
        return term_of(index)

    def evaluate(self, term: Term) -> LpVector:
        """Vector denoted by *term*."""
        total = LpVector.zero(self.space)
        for a, q in sorted(term.coefficients().items()):
            total = total + q * self.generator(a)
        return total

    def point(self, index: int) -> LpVector:
        """The rational point ``x_index``."""
        return self._cached_point(index)

    def _evaluate_point(self, index: int) -> LpVector:
        return self.evaluate(term_of(index))

    def eval_metric(self, i: int, j: int, k: int) -> DyadicInterval:
        return distance(self.point(i), self.point(j), k)

    def eval_functional(
        self, symbol: str, indices: Sequence[int], k: int
    ) -> DyadicInterval:
        return self.signature.apply_functional(
            symbol, [self.point(i) for i in indices], k
        )

    @abstractmethod
    def to_document(self) -> Dict[str, object]:
        """YAML-ready description (see :mod:`pylpstruct.persistence`)."""


class StandardPresentation(BanachPresentation):
    """The standard presentation of a Lebesgue space."""

    @property
    def generator_count(self) -> Optional[int]:
        if self.space.kind is SpaceKind.LP_N:
            return self.space.dimension
        return None

    def generator(self, a: int) -> LpVector:
        return standard_generator(self.space, a)

    def describe(self) -> str:
        return f"standard {self.space}"

    def to_document(self) -> Dict[str, object]:
        return space_document(self.space, generators="standard")


def standard_generator(space: LpSpace, a: int) -> LpVector:
    """Generator ``x_a`` of the standard layout of *space*."""
    if a < 0:
        raise ValueError(f"Generator index must be >= 0, got {a}")
    kind = space.kind
    if kind is SpaceKind.LP_N:
        if a >= (space.dimension or 0):
            return LpVector.zero(space)
        return LpVector.basis(space, a)
    if kind is SpaceKind.LP:
        return LpVector.basis(space, a)
    if kind is SpaceKind.LP01:
        return LpVector.indicator(space, *dyadic_piece(a))
    if kind is SpaceKind.LPN_SUM:
        n = space.dimension or 0
        if a < n:
            return LpVector.basis(space, a)
        return LpVector.indicator(space, *dyadic_piece(a - n))
    if kind is SpaceKind.LP_SUM:
        if a % 2 == 0:
            return LpVector.basis(space, a // 2)
        return LpVector.indicator(space, *dyadic_piece(a // 2))
    raise UnsupportedSpace(f"No standard layout for {kind.value}")


def atom_generator(space: LpSpace, i: int) -> int:
    """Generator number of the unit vector ``e_i`` in the standard layout."""
    kind = space.kind
    if kind in (SpaceKind.LP_N, SpaceKind.LP, SpaceKind.LPN_SUM):
        return i
    if kind is SpaceKind.LP_SUM:
        return 2 * i
    raise UnsupportedSpace(f"{kind.value} has no atoms")


def piece_generator(space: LpSpace, n: int) -> int:
    """Generator number of the dyadic indicator ``1_{D_n}``."""
    kind = space.kind
    if kind is SpaceKind.LP01:
        return n
    if kind is SpaceKind.LPN_SUM:
        return (space.dimension or 0) + n
    if kind is SpaceKind.LP_SUM:
        return 2 * n + 1
    raise UnsupportedSpace(f"{kind.value} has no continuous part")


def space_document(space: LpSpace, **extra: object) -> Dict[str, object]:
    doc: Dict[str, object] = {
        "format": FORMAT_TAG,
        "signature": BANACH_SIGNATURE.name,
        "structure": space.kind.value,
        "p": str(space.p),
    }
    if space.dimension is not None:
        doc["dimension"] = space.dimension
    doc.update(extra)
    return doc


class PerturbedPresentation(BanachPresentation):
    """A deliberately non-isometric copy of another Banach presentation.

    Distances between distinct points and norms of nonzero points are
    increased by *shift*; the result is still a metric but no longer the
    metric of a normed space.
    """

    def __init__(self, base: BanachPresentation, shift: RationalLike) -> None:
        super().__init__(base.space)
        self.base = base
        self.shift = as_fraction(shift)
        if self.shift <= 0:
            raise ValueError(f"Perturbation shift must be positive, got {shift}")

    @property
    def generator_count(self) -> Optional[int]:
        return self.base.generator_count

    def generator(self, a: int) -> LpVector:
        return self.base.generator(a)

    def _bump(self, value: DyadicInterval, k: int) -> DyadicInterval:
        return interval_add(value, DyadicInterval.from_rational(self.shift, k + 1))

    def eval_metric(self, i: int, j: int, k: int) -> DyadicInterval:
        x, y = self.point(i), self.point(j)
        if x == y:
            return DyadicInterval.zero(k)
        return self._bump(distance(x, y, k + 1), k)

    def eval_functional(
        self, symbol: str, indices: Sequence[int], k: int
    ) -> DyadicInterval:
        x = self.point(indices[0])
        if symbol != "norm":
            raise KeyError(f"{symbol!r} is not a Banach functional")
        if x.is_zero:
            return DyadicInterval.zero(k)
        return self._bump(norm(x, k + 1), k)

    def describe(self) -> str:
        return f"{self.base.describe()} perturbed by {self.shift}"

    def to_document(self) -> Dict[str, object]:
        doc = self.base.to_document()
        doc["perturbation"] = str(self.shift)
        return doc


class FiniteMetricPresentation(Presentation):
    """A finite metric space over the bare metric signature.

    Parameters
    ----------
    distances:
        Symmetric matrix of exact rational distances with zero diagonal.

    Raises
    ------
    ValueError
        If the matrix is not square, not symmetric, has a nonzero
        diagonal or a negative entry.
    """

    signature = METRIC_SIGNATURE

    def __init__(self, distances: Sequence[Sequence[RationalLike]]) -> None:
        table = tuple(tuple(as_fraction(d) for d in row) for row in distances)
        n = len(table)
        for i, row in enumerate(table):
            if len(row) != n:
                raise ValueError(f"Distance row {i} has {len(row)} entries, expected {n}")
            if row[i] != 0:
                raise ValueError(f"d({i},{i}) = {row[i]} is not zero")
            for j, d in enumerate(row):
                if d < 0 or d != table[j][i]:
                    raise ValueError(f"Bad distance entry d({i},{j}) = {d}")
        self.distances = table

    @property
    def generator_count(self) -> Optional[int]:
        return len(self.distances)

    def term(self, index: int) -> Term:
        self._check(index)
        return Term(((index, Fraction(1)),))

    def enumerate_rational_points(self, bound: int) -> List[Term]:
        return [self.term(i) for i in range(min(bound, len(self.distances)))]

    def _check(self, index: int) -> None:
        if not 0 <= index < len(self.distances):
            raise IndexError(
                f"Point {index} outside finite metric of {len(self.distances)} points"
            )

    def eval_metric(self, i: int, j: int, k: int) -> DyadicInterval:
        self._check(i)
        self._check(j)
        return DyadicInterval.from_rational(self.distances[i][j], k)

    def describe(self) -> str:
        return f"finite metric on {len(self.distances)} points"

    def to_document(self) -> Dict[str, object]:
        return {
            "format": FORMAT_TAG,
            "signature": METRIC_SIGNATURE.name,
            "structure": SpaceKind.FINITE_METRIC.value,
            "points": len(self.distances),
            "distances": [[str(d) for d in row] for row in self.distances],
        }
