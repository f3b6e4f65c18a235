"""Rational vectors of the separable Lebesgue spaces.

Five spaces are modelled, all over a fixed exponent ``p``:

=============  ==========================================
``lp_n``       ell^p_n (coordinates ``0 .. n-1``)
``lp``         ell^p (finitely supported sequences)
``Lp01``       L^p[0,1] (dyadic step functions)
``lpn_sum``    ell^p_n (+)_p L^p[0,1]
``lp_sum``     ell^p (+)_p L^p[0,1]
=============  ==========================================

Every rational point of these spaces is an :class:`LpVector`: an atomic
part (:class:`SeqVector`, a finitely supported rational sequence) and a
continuous part (:class:`StepFunction`, a rational step function on a
dyadic partition of ``[0, 1)``).  Both parts are kept in canonical form,
so two vectors are equal as elements of the space (almost everywhere)
exactly when they compare equal.

The p-th power of the norm is the finite sum

    sum_i |a_i|**p  +  sum_pieces length * |value|**p

which is an exact rational for integer ``p``; otherwise each term is
enclosed with :func:`~pylpstruct.exact.pow_fraction`.
"""

from __future__ import annotations

import logging
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Tuple, Union

from pylpstruct.enums import SpaceKind
from pylpstruct.exact import (
    DyadicInterval,
    Exponent,
    RationalLike,
    as_fraction,
    is_dyadic,
    pow_fraction,
    refine,
    root_fraction,
    root_p,
)
from pylpstruct.errors import SpaceMismatch, UnsupportedSpace

logger = logging.getLogger(__name__)

_ZERO = Fraction(0)
_ONE = Fraction(1)


# ---------------------------------------------------------------------------
# Spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LpSpace:
    """A space tag together with its exponent and dimension cap.

    Parameters
    ----------
    kind:
        One of the Lebesgue :class:`~pylpstruct.enums.SpaceKind` values.
    p:
        The exponent.
    dimension:
        Number of atoms for ``lp_n`` and ``lpn_sum``; must be ``None``
        for the other kinds.

    Raises
    ------
    UnsupportedSpace
        For ``finite_metric`` (not a Lebesgue space).
    ValueError
        If the dimension is missing, negative or given where not allowed.
    """

    kind: SpaceKind
    p: Exponent
    dimension: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind is SpaceKind.FINITE_METRIC:
            raise UnsupportedSpace("finite_metric is not a Lebesgue space")
        if self.kind.is_finite_dimensional_atomic:
            if self.dimension is None or self.dimension < 0:
                raise ValueError(
                    f"{self.kind.value} needs a dimension >= 0, "
                    f"got {self.dimension}"
                )
        elif self.dimension is not None:
            raise ValueError(f"{self.kind.value} takes no dimension")

    @classmethod
    def of(
        cls,
        kind: Union[str, SpaceKind],
        p: Union[RationalLike, Exponent],
        dimension: Optional[int] = None,
    ) -> LpSpace:
        """Convenience constructor accepting keywords and plain numbers."""
        space_kind = kind if isinstance(kind, SpaceKind) else SpaceKind(kind)
        exponent = p if isinstance(p, Exponent) else Exponent(p)
        return cls(space_kind, exponent, dimension)

    @property
    def atomic_space(self) -> LpSpace:
        """The ``lp_n`` / ``lp`` space of the atomic coordinates."""
        if not self.kind.has_atoms:
            raise UnsupportedSpace(f"{self} has no atomic part")
        if self.kind.is_finite_dimensional_atomic:
            return LpSpace(SpaceKind.LP_N, self.p, self.dimension)
        return LpSpace(SpaceKind.LP, self.p)

    @property
    def continuous_space(self) -> LpSpace:
        """The ``Lp01`` space of the continuous part."""
        if not self.kind.has_continuum:
            raise UnsupportedSpace(f"{self} has no continuous part")
        return LpSpace(SpaceKind.LP01, self.p)

    def __str__(self) -> str:
        dim = "" if self.dimension is None else f", n={self.dimension}"
        return f"{self.kind.value}(p={self.p}{dim})"


# ---------------------------------------------------------------------------
# Atomic part
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeqVector:
    """A finitely supported rational sequence in canonical form.

    ``entries`` is a tuple of ``(index, value)`` pairs sorted by index
    with no zero values.  Use :meth:`from_mapping` to build one from an
    arbitrary mapping.
    """

    entries: Tuple[Tuple[int, Fraction], ...] = ()

    def __post_init__(self) -> None:
        merged: Dict[int, Fraction] = {}
        for index, value in self.entries:
            if index < 0:
                raise ValueError(f"Negative sequence index {index}")
            merged[index] = merged.get(index, _ZERO) + as_fraction(value)
        object.__setattr__(
            self,
            "entries",
            tuple(sorted((i, v) for i, v in merged.items() if v != 0)),
        )

    @classmethod
    def from_mapping(cls, values: Mapping[int, RationalLike]) -> SeqVector:
        return cls(tuple((int(i), as_fraction(v)) for i, v in values.items()))

    @property
    def support(self) -> frozenset:
        return frozenset(i for i, _ in self.entries)

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def coefficient(self, index: int) -> Fraction:
        for i, v in self.entries:
            if i == index:
                return v
        return _ZERO

    def as_dict(self) -> Dict[int, Fraction]:
        return dict(self.entries)

    def combine(self, other: SeqVector, a: Fraction, b: Fraction) -> SeqVector:
        """``a * self + b * other``."""
        out = {i: a * v for i, v in self.entries}
        for i, v in other.entries:
            out[i] = out.get(i, _ZERO) + b * v
        return SeqVector(tuple(out.items()))

    def pointwise(self, other: SeqVector) -> SeqVector:
        """Coordinatewise product."""
        theirs = dict(other.entries)
        return SeqVector(
            tuple((i, v * theirs[i]) for i, v in self.entries if i in theirs)
        )


# ---------------------------------------------------------------------------
# Continuous part
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepFunction:
    """A rational step function on a dyadic partition of ``[0, 1)``.

    Parameters
    ----------
    breakpoints:
        ``0 = t0 < t1 < ... < tm = 1``, all dyadic.
    values:
        One rational per piece ``[t_i, t_{i+1})``.

    Adjacent pieces with equal values are merged on construction, so the
    representation is canonical.
    """

    breakpoints: Tuple[Fraction, ...] = (_ZERO, _ONE)
    values: Tuple[Fraction, ...] = (_ZERO,)

    def __post_init__(self) -> None:
        points = tuple(as_fraction(t) for t in self.breakpoints)
        values = tuple(as_fraction(v) for v in self.values)
        if len(points) < 2 or points[0] != 0 or points[-1] != 1:
            raise ValueError(
                f"Breakpoints must run from 0 to 1, got {list(map(str, points))}"
            )
        if len(values) != len(points) - 1:
            raise ValueError(
                f"{len(points)} breakpoints need {len(points) - 1} values, "
                f"got {len(values)}"
            )
        for a, b in zip(points, points[1:]):
            if not a < b:
                raise ValueError(f"Breakpoints not increasing at {a}, {b}")
        for t in points:
            if not is_dyadic(t):
                raise ValueError(f"Breakpoint {t} is not dyadic")
        merged_points = [points[0]]
        merged_values: List[Fraction] = []
        for value, end in zip(values, points[1:]):
            if merged_values and merged_values[-1] == value:
                merged_points[-1] = end
            else:
                merged_values.append(value)
                merged_points.append(end)
        object.__setattr__(self, "breakpoints", tuple(merged_points))
        object.__setattr__(self, "values", tuple(merged_values))

    @classmethod
    def zero(cls) -> StepFunction:
        return cls()

    @classmethod
    def indicator(
        cls, start: RationalLike, end: RationalLike, value: RationalLike = 1
    ) -> StepFunction:
        """``value`` on ``[start, end)`` and zero elsewhere."""
        a, b, v = as_fraction(start), as_fraction(end), as_fraction(value)
        if not 0 <= a < b <= 1:
            raise ValueError(f"Indicator interval [{a}, {b}) not inside [0, 1]")
        points = [_ZERO, a, b, _ONE]
        values = [_ZERO, v, _ZERO]
        if a == 0:
            points.pop(0)
            values.pop(0)
        if b == 1:
            points.pop()
            values.pop()
        return cls(tuple(points), tuple(values))

    def pieces(self) -> Iterator[Tuple[Fraction, Fraction, Fraction]]:
        """Yield ``(start, end, value)`` for every piece."""
        for i, value in enumerate(self.values):
            yield self.breakpoints[i], self.breakpoints[i + 1], value

    @property
    def is_zero(self) -> bool:
        return self.values == (_ZERO,)

    def support(self) -> List[Tuple[Fraction, Fraction]]:
        """Maximal intervals where the function is nonzero."""
        out: List[Tuple[Fraction, Fraction]] = []
        for a, b, v in self.pieces():
            if v == 0:
                continue
            if out and out[-1][1] == a:
                out[-1] = (out[-1][0], b)
            else:
                out.append((a, b))
        return out

    def value_at(self, t: RationalLike) -> Fraction:
        """Value on the piece containing ``t`` (``t = 1`` uses the last piece)."""
        x = as_fraction(t)
        i = bisect_right(self.breakpoints, x) - 1
        return self.values[min(max(i, 0), len(self.values) - 1)]

    def combine_with(
        self, other: StepFunction, op: Callable[[Fraction, Fraction], Fraction]
    ) -> StepFunction:
        """Apply *op* piecewise on the common refinement."""
        points = sorted(set(self.breakpoints) | set(other.breakpoints))
        values = [
            op(self.value_at(a), other.value_at(a)) for a in points[:-1]
        ]
        return StepFunction(tuple(points), tuple(values))

    def map_values(self, op: Callable[[Fraction], Fraction]) -> StepFunction:
        return StepFunction(self.breakpoints, tuple(op(v) for v in self.values))


# ---------------------------------------------------------------------------
# Vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LpVector:
    """A rational point of one of the five Lebesgue spaces.

    Raises
    ------
    ValueError
        If a part is present that the space does not have, or an atomic
        index lies beyond the dimension cap.
    """

    space: LpSpace
    atomic: SeqVector = field(default_factory=SeqVector)
    continuous: StepFunction = field(default_factory=StepFunction)

    def __post_init__(self) -> None:
        kind = self.space.kind
        if not kind.has_atoms and not self.atomic.is_zero:
            raise ValueError(f"{self.space} vectors have no atomic part")
        if not kind.has_continuum and not self.continuous.is_zero:
            raise ValueError(f"{self.space} vectors have no continuous part")
        if kind.is_finite_dimensional_atomic and self.atomic.entries:
            top = self.atomic.entries[-1][0]
            if top >= (self.space.dimension or 0):
                raise ValueError(
                    f"Atomic index {top} outside {self.space}"
                )

    # ---- constructors ------------------------------------------------

    @classmethod
    def zero(cls, space: LpSpace) -> LpVector:
        return cls(space)

    @classmethod
    def basis(cls, space: LpSpace, index: int, value: RationalLike = 1) -> LpVector:
        """``value * e_index``."""
        return cls(space, atomic=SeqVector(((index, as_fraction(value)),)))

    @classmethod
    def indicator(
        cls,
        space: LpSpace,
        start: RationalLike,
        end: RationalLike,
        value: RationalLike = 1,
    ) -> LpVector:
        """``value * 1_[start, end)`` in the continuous part."""
        return cls(space, continuous=StepFunction.indicator(start, end, value))

    # ---- inspection --------------------------------------------------

    @property
    def p(self) -> Exponent:
        return self.space.p

    @property
    def is_zero(self) -> bool:
        return self.atomic.is_zero and self.continuous.is_zero

    @property
    def is_atom(self) -> bool:
        """``True`` for a nonzero multiple of one basis vector."""
        return len(self.atomic.entries) == 1 and self.continuous.is_zero

    def atomic_part(self) -> LpVector:
        return LpVector(self.space, atomic=self.atomic)

    def continuous_part(self) -> LpVector:
        return LpVector(self.space, continuous=self.continuous)

    def literal(self) -> str:
        """Render in the vector literal syntax (see :mod:`pylpstruct.literals`)."""
        parts = []
        if self.space.kind.has_atoms:
            body = ", ".join(f"{i}:{v}" for i, v in self.atomic.entries)
            parts.append(f"[{body}]")
        if self.space.kind.has_continuum:
            tokens = []
            for t, v in zip(self.continuous.breakpoints, self.continuous.values):
                tokens += [str(t), str(v)]
            tokens.append("1")
            parts.append("{" + " ".join(tokens) + "}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.literal()

    # ---- arithmetic --------------------------------------------------

    def __add__(self, other: LpVector) -> LpVector:
        return add(self, other)

    def __sub__(self, other: LpVector) -> LpVector:
        return sub(self, other)

    def __neg__(self) -> LpVector:
        return scale(-1, self)

    def __rmul__(self, factor: RationalLike) -> LpVector:
        return scale(factor, self)


def _check_same_space(f: LpVector, g: LpVector) -> None:
    if f.space != g.space:
        raise SpaceMismatch(f.space, g.space)


def _combine(f: LpVector, g: LpVector, a: Fraction, b: Fraction) -> LpVector:
    _check_same_space(f, g)
    return LpVector(
        f.space,
        atomic=f.atomic.combine(g.atomic, a, b),
        continuous=f.continuous.combine_with(
            g.continuous, lambda x, y: a * x + b * y
        ),
    )


def add(f: LpVector, g: LpVector) -> LpVector:
    """Exact ``f + g``.

    Raises
    ------
    SpaceMismatch
        If the vectors live in different spaces.
    """
    return _combine(f, g, _ONE, _ONE)


def sub(f: LpVector, g: LpVector) -> LpVector:
    """Exact ``f - g``."""
    return _combine(f, g, _ONE, -_ONE)


def scale(factor: RationalLike, f: LpVector) -> LpVector:
    """Exact ``factor * f``."""
    s = as_fraction(factor)
    return LpVector(
        f.space,
        atomic=f.atomic.combine(SeqVector(), s, _ZERO),
        continuous=f.continuous.map_values(lambda v: s * v),
    )


def lp_sum_embed(u: LpVector, v: LpVector) -> LpVector:
    """Pair an atomic vector and a continuous vector into their L^p-sum.

    Parameters
    ----------
    u:
        Vector of ``lp_n`` or ``lp``.
    v:
        Vector of ``Lp01`` with the same exponent.

    Raises
    ------
    SpaceMismatch
        If the tags or exponents do not fit.
    """
    if u.space.kind not in (SpaceKind.LP_N, SpaceKind.LP):
        raise SpaceMismatch(u.space, "lp_n or lp")
    if v.space.kind is not SpaceKind.LP01 or v.space.p != u.space.p:
        raise SpaceMismatch(v.space, LpSpace(SpaceKind.LP01, u.space.p))
    if u.space.kind is SpaceKind.LP_N:
        target = LpSpace(SpaceKind.LPN_SUM, u.space.p, u.space.dimension)
    else:
        target = LpSpace(SpaceKind.LP_SUM, u.space.p)
    return LpVector(target, atomic=u.atomic, continuous=v.continuous)


# ---------------------------------------------------------------------------
# Supports and the component order
# ---------------------------------------------------------------------------

def disjointly_supported(f: LpVector, g: LpVector) -> bool:
    """``True`` iff ``f * g = 0`` almost everywhere.

    Shared piece endpoints have measure zero and count as disjoint.

    Raises
    ------
    SpaceMismatch
        If the vectors live in different spaces.
    """
    _check_same_space(f, g)
    if f.atomic.support & g.atomic.support:
        return False
    return f.continuous.combine_with(g.continuous, lambda x, y: x * y).is_zero


def is_component(f: LpVector, g: LpVector) -> bool:
    """``f`` is a component of ``g``: ``g - f`` and ``f`` are disjointly
    supported."""
    return disjointly_supported(sub(g, f), f)


def agrees_on_support(f: LpVector, g: LpVector) -> bool:
    """``g`` equals ``f`` wherever ``f`` is nonzero (``f = g * 1_A``).

    Equivalent to :func:`is_component`; kept as an independent check.
    """
    _check_same_space(f, g)
    for i, v in f.atomic.entries:
        if g.atomic.coefficient(i) != v:
            return False
    clash = f.continuous.combine_with(
        g.continuous, lambda x, y: _ONE if x != 0 and x != y else _ZERO
    )
    return clash.is_zero


# ---------------------------------------------------------------------------
# Norms
# ---------------------------------------------------------------------------

def exact_norm_p_power(v: LpVector) -> Fraction:
    """``||v||_p ** p`` as an exact rational (integer ``p`` only).

    Raises
    ------
    ValueError
        If ``p`` is not an integer.
    """
    if not v.p.is_integer:
        raise ValueError(f"Exact p-th powers need integer p, got {v.p}")
    n = v.p.numerator
    total = sum((abs(c) ** n for _, c in v.atomic.entries), _ZERO)
    for a, b, value in v.continuous.pieces():
        if value != 0:
            total += (b - a) * abs(value) ** n
    return total


def _p_power_at(v: LpVector, bits: int) -> DyadicInterval:
    lo = hi = _ZERO
    for _, c in v.atomic.entries:
        term = pow_fraction(abs(c), v.p, bits)
        lo += term.lo
        hi += term.hi
    for a, b, value in v.continuous.pieces():
        if value == 0:
            continue
        term = pow_fraction(abs(value), v.p, bits)
        # piece lengths are dyadic, products stay exact
        lo += (b - a) * term.lo
        hi += (b - a) * term.hi
    return DyadicInterval(lo, hi, bits)


def norm_p_power(v: LpVector, k: int) -> DyadicInterval:
    """Enclosure of ``||v||_p ** p`` of width at most ``2**-k``."""
    if v.p.is_integer:
        return DyadicInterval.from_rational(exact_norm_p_power(v), k)
    if v.is_zero:
        return DyadicInterval.zero(k)
    return refine(lambda bits: _p_power_at(v, bits), k)


def norm(v: LpVector, k: int) -> DyadicInterval:
    """Enclosure of ``||v||_p`` of width at most ``2**-k``.

    For integer ``p`` the p-th power is summed exactly and one root is
    taken; otherwise per-piece powers are enclosed and the working
    precision is doubled until the root is narrow enough.
    """
    if v.is_zero:
        return DyadicInterval.zero(k)
    if v.p.is_integer:
        return root_fraction(exact_norm_p_power(v), v.p, k)
    return refine(lambda bits: root_p(_p_power_at(v, bits), v.p, bits), k)


def distance(f: LpVector, g: LpVector, k: int) -> DyadicInterval:
    """Enclosure of ``||f - g||_p``."""
    return norm(sub(f, g), k)
