"""Exact rational and dyadic-interval arithmetic.

Every real quantity in pylpstruct (norms, distances, functional values)
is handled as a :class:`DyadicInterval`: a closed interval whose
endpoints are dyadic rationals ``m / 2**e`` and which is guaranteed to
contain the exact value.  Scalars are :class:`fractions.Fraction`
instances in lowest terms.

Outward rounding
~~~~~~~~~~~~~~~~
Results are rounded *outward* onto the dyadic grid ``2**-w`` where ``w``
is the working level (the inputs' level plus :data:`GUARD_BITS`): lower
endpoints are floored, upper endpoints are ceiled.  Soundness therefore
never depends on the rounding mode of the host platform; no floating
point is used anywhere.

Powers and roots
~~~~~~~~~~~~~~~~
The exponent ``p = a/b`` is always an exact rational (see
:class:`Exponent`), so

* ``x**p = (x**a) ** (1/b)`` and
* ``x**(1/p) = (x**b) ** (1/a)``

reduce to exact integer powers followed by one integer root.  Powers are
taken on ``gmpy2.mpq`` and roots with ``gmpy2.iroot_rem``, which gives the
floor of the root and its remainder; the ceiling is the floor plus one
unless the remainder vanishes.

Text rendering
~~~~~~~~~~~~~~
``str(interval)`` renders ``"lo..hi (width=2^-k)"`` with decimal
endpoints rounded outward; :meth:`DyadicInterval.render` also supports
dyadic ``m/2^e`` endpoints.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Tuple, Union

import gmpy2 as gmp

from pylpstruct.enums import Certainty
from pylpstruct.errors import NegativeBase, PrecisionExhausted

logger = logging.getLogger(__name__)

#: Extra bits carried beyond the requested level by every operation.
GUARD_BITS: int = 8

#: Working precision above which :func:`refine` gives up.
MAX_WORKING_BITS: int = 1 << 16

Rational = Fraction
RationalLike = Union[int, str, Fraction]


# ---------------------------------------------------------------------------
# Dyadic helpers
# ---------------------------------------------------------------------------

def as_fraction(value: RationalLike) -> Fraction:
    """Coerce *value* to a :class:`Fraction`, refusing floats.

    Raises
    ------
    TypeError
        If *value* is a ``float`` (binary floats are not exact input).
    """
    if isinstance(value, float):
        raise TypeError(
            f"Exact rational expected, got float {value!r}; "
            f"pass a str such as '3/2' instead"
        )
    return value if isinstance(value, Fraction) else Fraction(value)


def is_dyadic(value: Fraction) -> bool:
    """``True`` if the reduced denominator of *value* is a power of two."""
    d = value.denominator
    return d & (d - 1) == 0


def floor_at(value: Fraction, bits: int) -> Fraction:
    """Largest multiple of ``2**-bits`` that is ``<= value``."""
    return Fraction((value.numerator << bits) // value.denominator, 1 << bits)


def ceil_at(value: Fraction, bits: int) -> Fraction:
    """Smallest multiple of ``2**-bits`` that is ``>= value``."""
    return Fraction(
        -((-value.numerator << bits) // value.denominator), 1 << bits
    )


def pow2(k: int) -> Fraction:
    """``2**-k`` as an exact fraction (``k`` may be negative)."""
    return Fraction(1, 1 << k) if k >= 0 else Fraction(1 << -k)


def integer_root(x: int, n: int) -> int:
    """Return ``floor(x ** (1/n))`` for integers ``x >= 0``, ``n >= 1``."""
    if x < 0:
        raise NegativeBase(x)
    root, _ = gmp.iroot(gmp.mpz(x), n)
    return int(root)


def _root_bounds(value: gmp.mpq, n: int, bits: int) -> Tuple[int, int]:
    """Integers ``(m, M)`` with ``(m/2^bits)^n <= value <= (M/2^bits)^n``
    and ``M - m <= 1``."""
    scaled, rest = gmp.f_divmod(
        gmp.mpz(value.numerator) << (bits * n), value.denominator
    )
    root, rem = gmp.iroot_rem(scaled, n)
    m = int(root)
    if rem == 0 and rest == 0:
        return m, m
    return m, m + 1


def _power_bounds(
    lo: Fraction, hi: Fraction, num: int, den: int, bits: int
) -> Tuple[Fraction, Fraction]:
    """Dyadic bounds ``L <= lo**(num/den)`` and ``hi**(num/den) <= H``."""
    m_lo, _ = _root_bounds(gmp.mpq(lo.numerator, lo.denominator) ** num, den, bits)
    _, m_hi = _root_bounds(gmp.mpq(hi.numerator, hi.denominator) ** num, den, bits)
    scale = 1 << bits
    return Fraction(m_lo, scale), Fraction(m_hi, scale)


def _decimal_text(value: Fraction, digits: int, round_up: bool) -> str:
    scale = 10 ** digits
    scaled = value.numerator * scale
    if round_up:
        v = -((-scaled) // value.denominator)
    else:
        v = scaled // value.denominator
    sign = "-" if v < 0 else ""
    whole, frac = divmod(abs(v), scale)
    if digits == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{digits}d}"


def _dyadic_text(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    exponent = value.denominator.bit_length() - 1
    return f"{value.numerator}/2^{exponent}"


# ---------------------------------------------------------------------------
# Exponent
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Exponent:
    """The exponent ``p >= 1`` of an L^p norm, held as an exact rational.

    Parameters
    ----------
    value:
        ``int``, ``str`` (``"3/2"``) or :class:`Fraction`.

    Raises
    ------
    ValueError
        If ``p < 1``.
    TypeError
        If *value* is a float.
    """

    value: Fraction

    def __post_init__(self) -> None:
        p = as_fraction(self.value)
        if p < 1:
            raise ValueError(f"Exponent p must satisfy p >= 1, got {p}")
        object.__setattr__(self, "value", p)

    @property
    def numerator(self) -> int:
        """``a`` in ``p = a/b``."""
        return self.value.numerator

    @property
    def denominator(self) -> int:
        """``b`` in ``p = a/b``."""
        return self.value.denominator

    @property
    def is_integer(self) -> bool:
        """``True`` when p is an integer (norm powers are then exact)."""
        return self.value.denominator == 1

    def __str__(self) -> str:
        return str(self.value)


# ---------------------------------------------------------------------------
# DyadicInterval
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DyadicInterval:
    """A certified enclosure ``[lo, hi]`` of a real number.

    Parameters
    ----------
    lo, hi:
        Dyadic rational endpoints with ``lo <= hi``.
    level:
        The precision exponent ``k`` the producer aimed for (width at most
        ``2**-k`` for point inputs).

    Raises
    ------
    ValueError
        If an endpoint is not dyadic, ``lo > hi`` or ``level < 0``.
    """

    lo: Fraction
    hi: Fraction
    level: int = 0

    def __post_init__(self) -> None:
        lo = as_fraction(self.lo)
        hi = as_fraction(self.hi)
        if not (is_dyadic(lo) and is_dyadic(hi)):
            raise ValueError(f"Interval endpoints must be dyadic: {lo}, {hi}")
        if lo > hi:
            raise ValueError(f"Empty interval: lo={lo} > hi={hi}")
        if self.level < 0:
            raise ValueError(f"Interval level must be >= 0, got {self.level}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    # ---- constructors ------------------------------------------------

    @classmethod
    def point(cls, value: RationalLike, level: int = 0) -> DyadicInterval:
        """The degenerate interval ``[value, value]`` (value must be dyadic)."""
        v = as_fraction(value)
        return cls(v, v, level)

    @classmethod
    def from_rational(cls, value: RationalLike, k: int) -> DyadicInterval:
        """Enclose an arbitrary rational with width at most ``2**-k``.

        Dyadic values with denominator ``<= 2**k`` yield point intervals.
        """
        v = as_fraction(value)
        return cls(floor_at(v, k), ceil_at(v, k), k)

    @classmethod
    def zero(cls, level: int = 0) -> DyadicInterval:
        """The point interval ``[0, 0]``."""
        return cls(Fraction(0), Fraction(0), level)

    # ---- geometry ----------------------------------------------------

    @property
    def width(self) -> Fraction:
        """``hi - lo``."""
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        """``(lo + hi) / 2`` (dyadic)."""
        return (self.lo + self.hi) / 2

    @property
    def is_point(self) -> bool:
        """``True`` when ``lo == hi``."""
        return self.lo == self.hi

    def achieved_level(self) -> int:
        """Largest ``k`` with ``width <= 2**-k`` (very large for points)."""
        w = self.width
        if w == 0:
            return MAX_WORKING_BITS
        exponent = w.denominator.bit_length() - 1
        return exponent - (w.numerator - 1).bit_length()

    def contains(self, other: Union[RationalLike, DyadicInterval]) -> bool:
        """``True`` if *other* (a number or an interval) lies inside."""
        if isinstance(other, DyadicInterval):
            return self.lo <= other.lo and other.hi <= self.hi
        v = as_fraction(other)
        return self.lo <= v <= self.hi

    def overlaps(self, other: DyadicInterval) -> bool:
        """``True`` if the two intervals share a point."""
        return self.lo <= other.hi and other.lo <= self.hi

    # ---- certified comparisons ---------------------------------------

    def certainly_le(self, bound: RationalLike) -> bool:
        return self.hi <= as_fraction(bound)

    def certainly_lt(self, bound: RationalLike) -> bool:
        return self.hi < as_fraction(bound)

    def certainly_ge(self, bound: RationalLike) -> bool:
        return self.lo >= as_fraction(bound)

    def certainly_gt(self, bound: RationalLike) -> bool:
        return self.lo > as_fraction(bound)

    def check_at_most(self, threshold: RationalLike) -> Certainty:
        """Decide the claim ``value <= threshold`` three-valuedly.

        ``VIOLATED`` needs the lower endpoint strictly above the
        threshold; ``HOLDS`` needs the upper endpoint at or below it.
        """
        t = as_fraction(threshold)
        if self.hi <= t:
            return Certainty.HOLDS
        if self.lo > t:
            return Certainty.VIOLATED
        return Certainty.INCONCLUSIVE

    # ---- operators ---------------------------------------------------

    def __add__(self, other: DyadicInterval) -> DyadicInterval:
        return interval_add(self, other)

    def __sub__(self, other: DyadicInterval) -> DyadicInterval:
        return interval_sub(self, other)

    def __mul__(self, other: DyadicInterval) -> DyadicInterval:
        return interval_mul(self, other)

    def __truediv__(self, other: DyadicInterval) -> DyadicInterval:
        return interval_div(self, other)

    def __neg__(self) -> DyadicInterval:
        return DyadicInterval(-self.hi, -self.lo, self.level)

    def __abs__(self) -> DyadicInterval:
        return interval_abs(self)

    # ---- rendering ---------------------------------------------------

    def render(self, style: str = "decimal", digits: int = 12) -> str:
        """Render as ``"lo..hi (width=2^-k)"``.

        Parameters
        ----------
        style:
            ``"decimal"`` (outward-rounded to *digits* places) or
            ``"dyadic"`` (exact ``m/2^e`` endpoints).
        """
        if style == "dyadic":
            body = f"{_dyadic_text(self.lo)}..{_dyadic_text(self.hi)}"
        elif style == "decimal":
            body = (
                f"{_decimal_text(self.lo, digits, round_up=False)}.."
                f"{_decimal_text(self.hi, digits, round_up=True)}"
            )
        else:
            raise ValueError(f"Unknown interval style {style!r}")
        if self.width == 0:
            return f"{body} (width=0)"
        return f"{body} (width=2^{-self.achieved_level()})"

    def __str__(self) -> str:
        return self.render()


# ---------------------------------------------------------------------------
# Interval arithmetic
# ---------------------------------------------------------------------------

def _working_bits(*intervals: DyadicInterval) -> int:
    return max(i.level for i in intervals) + GUARD_BITS


def _rounded(lo: Fraction, hi: Fraction, bits: int, level: int) -> DyadicInterval:
    return DyadicInterval(floor_at(lo, bits), ceil_at(hi, bits), level)


def interval_add(a: DyadicInterval, b: DyadicInterval) -> DyadicInterval:
    """Enclosure of ``a + b``."""
    return _rounded(
        a.lo + b.lo, a.hi + b.hi, _working_bits(a, b), min(a.level, b.level)
    )


def interval_sub(a: DyadicInterval, b: DyadicInterval) -> DyadicInterval:
    """Enclosure of ``a - b``."""
    return _rounded(
        a.lo - b.hi, a.hi - b.lo, _working_bits(a, b), min(a.level, b.level)
    )


def interval_mul(a: DyadicInterval, b: DyadicInterval) -> DyadicInterval:
    """Enclosure of ``a * b``."""
    products = (a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi)
    return _rounded(
        min(products), max(products), _working_bits(a, b), min(a.level, b.level)
    )


def interval_div(a: DyadicInterval, b: DyadicInterval) -> DyadicInterval:
    """Enclosure of ``a / b`` for divisors bounded away from zero.

    Raises
    ------
    ZeroDivisionError
        If *b* contains zero.
    """
    if b.lo <= 0 <= b.hi:
        raise ZeroDivisionError(f"Divisor interval {b} contains zero")
    quotients = (a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi)
    return _rounded(
        min(quotients), max(quotients), _working_bits(a, b), min(a.level, b.level)
    )


def interval_scale(a: DyadicInterval, factor: RationalLike) -> DyadicInterval:
    """Enclosure of ``factor * a`` for an exact rational *factor*."""
    q = as_fraction(factor)
    ends = (q * a.lo, q * a.hi)
    return _rounded(min(ends), max(ends), a.level + GUARD_BITS, a.level)


def interval_abs(a: DyadicInterval) -> DyadicInterval:
    """Enclosure of ``|a|``."""
    if a.lo >= 0:
        return a
    if a.hi <= 0:
        return -a
    return DyadicInterval(Fraction(0), max(-a.lo, a.hi), a.level)


def interval_sum(items: "list[DyadicInterval]", level: int) -> DyadicInterval:
    """Exact sum of dyadic intervals (no rounding), tagged with *level*."""
    lo = sum((i.lo for i in items), Fraction(0))
    hi = sum((i.hi for i in items), Fraction(0))
    return DyadicInterval(lo, hi, level)


# ---------------------------------------------------------------------------
# Powers and roots
# ---------------------------------------------------------------------------

def pow_rational(x: DyadicInterval, p: Exponent, k: int) -> DyadicInterval:
    """Enclosure of ``x ** p`` for ``x >= 0``.

    The result has width at most ``2**-k`` when *x* is a point interval
    and is monotone in *x*.

    Raises
    ------
    NegativeBase
        If ``x.lo < 0``.
    """
    if x.lo < 0:
        raise NegativeBase(x.lo)
    lo, hi = _power_bounds(
        x.lo, x.hi, p.numerator, p.denominator, k + GUARD_BITS
    )
    return DyadicInterval(lo, hi, k)


def root_p(x: DyadicInterval, p: Exponent, k: int) -> DyadicInterval:
    """Enclosure of ``x ** (1/p)`` for ``x >= 0``.

    Raises
    ------
    NegativeBase
        If ``x.lo < 0``.
    """
    if x.lo < 0:
        raise NegativeBase(x.lo)
    lo, hi = _power_bounds(
        x.lo, x.hi, p.denominator, p.numerator, k + GUARD_BITS
    )
    return DyadicInterval(lo, hi, k)


def pow_fraction(value: RationalLike, p: Exponent, k: int) -> DyadicInterval:
    """Enclosure of ``value ** p`` for an exact rational ``value >= 0``
    (not necessarily dyadic), width at most ``2**-k``."""
    q = as_fraction(value)
    if q < 0:
        raise NegativeBase(q)
    lo, hi = _power_bounds(q, q, p.numerator, p.denominator, k + GUARD_BITS)
    return DyadicInterval(lo, hi, k)


def root_fraction(value: RationalLike, p: Exponent, k: int) -> DyadicInterval:
    """Enclosure of ``value ** (1/p)`` for an exact rational ``value >= 0``,
    width at most ``2**-k``."""
    q = as_fraction(value)
    if q < 0:
        raise NegativeBase(q)
    lo, hi = _power_bounds(q, q, p.denominator, p.numerator, k + GUARD_BITS)
    return DyadicInterval(lo, hi, k)


def refine(compute: Callable[[int], DyadicInterval], k: int) -> DyadicInterval:
    """Run ``compute(w)`` with doubling working precision ``w`` until the
    result is at most ``2**-k`` wide.

    Raises
    ------
    PrecisionExhausted
        If the width target is not met below :data:`MAX_WORKING_BITS`.
    """
    target = pow2(k)
    bits = k + GUARD_BITS
    while True:
        result = compute(bits)
        if result.width <= target:
            return replace(result, level=k)
        if bits > MAX_WORKING_BITS:
            raise PrecisionExhausted(
                f"Could not reach width 2^-{k} (last width {result.width})"
            )
        logger.debug(
            "Width %s above 2^-%d at %d bits, doubling", result.width, k, bits
        )
        bits *= 2
