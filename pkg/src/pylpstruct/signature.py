"""Metric signatures, moduli of continuity and their checks.

A :class:`Signature` names the operation, functional and constant
symbols of a metric structure together with their arities and moduli of
continuity.  Two signatures are built in:

* :data:`METRIC_SIGNATURE`, the bare metric signature with no symbols;
* :data:`BANACH_SIGNATURE` with ``"+"`` (arity 2), ``"scale:<q>"`` for
  every rational ``q`` (arity 1), the functional ``"norm"`` (arity 1) and
  the constant ``"0"``.

The Banach moduli are

* ``Delta_+(k) = k + 1``
* ``Delta_scale:q(k) = k + max(0, ceil(log2 |q|))``
* ``Delta_norm(k) = k``

:func:`check_modulus` tests a modulus empirically on random rational
points of a presentation.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Callable, Dict, List, Optional, Sequence, Tuple

from pylpstruct.enums import Certainty
from pylpstruct.exact import DyadicInterval, as_fraction, interval_abs, pow2
from pylpstruct.errors import UnsupportedSpace
from pylpstruct.lebesgue import (
    LpSpace,
    LpVector,
    SeqVector,
    StepFunction,
    add,
    distance,
    norm,
    scale,
)

if TYPE_CHECKING:
    from pylpstruct.presentation import BanachPresentation

logger = logging.getLogger(__name__)

SCALE_PREFIX = "scale:"


# ---------------------------------------------------------------------------
# Moduli of continuity
# ---------------------------------------------------------------------------

def ceil_log2(value: Fraction) -> int:
    """Smallest integer ``e`` with ``|value| <= 2**e`` (``value != 0``)."""
    q = abs(value)
    e = q.numerator.bit_length() - q.denominator.bit_length()
    while pow2(-e) < q:
        e += 1
    while pow2(-(e - 1)) >= q:
        e -= 1
    return e


@dataclass(frozen=True)
class ModulusFunction:
    """A modulus ``Delta: N -> N`` given in closed form or by a table.

    Either *shift* (``Delta(k) = k + shift``) or *table* is used.  A table
    is extended beyond its last entry by ``Delta(k) = table[-1] + (k - last)``.
    """

    shift: int = 0
    table: Optional[Tuple[int, ...]] = None

    @classmethod
    def identity(cls) -> ModulusFunction:
        return cls(0)

    @classmethod
    def shifted(cls, shift: int) -> ModulusFunction:
        return cls(shift)

    @classmethod
    def from_table(cls, values: Sequence[int]) -> ModulusFunction:
        if not values:
            raise ValueError("A modulus table needs at least one entry")
        return cls(0, tuple(int(v) for v in values))

    def __call__(self, k: int) -> int:
        if self.table is None:
            return k + self.shift
        if k < len(self.table):
            return self.table[k]
        return self.table[-1] + (k - len(self.table) + 1)

    def __str__(self) -> str:
        if self.table is not None:
            return f"table{list(self.table)}"
        return "k" if self.shift == 0 else f"k+{self.shift}"


# ---------------------------------------------------------------------------
# Signatures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Signature:
    """Symbols of a metric structure with arities and moduli.

    Parameters
    ----------
    name:
        Short identifier used in presentation files.
    operations, functionals:
        ``symbol -> arity`` (arities must be positive).
    constants:
        Constant symbols (arity zero).
    moduli:
        ``symbol -> ModulusFunction`` for every operation and functional.

    Raises
    ------
    ValueError
        If an arity is not positive or a modulus is missing.
    """

    name: str
    operations: Dict[str, int] = field(default_factory=dict)
    functionals: Dict[str, int] = field(default_factory=dict)
    constants: Tuple[str, ...] = ()
    moduli: Dict[str, ModulusFunction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for symbol, arity in {**self.operations, **self.functionals}.items():
            if arity < 1:
                raise ValueError(f"Symbol {symbol!r} needs positive arity")
            if symbol not in self.moduli:
                raise ValueError(f"Symbol {symbol!r} has no modulus")

    def arity(self, symbol: str) -> int:
        if symbol in self.operations:
            return self.operations[symbol]
        if symbol in self.functionals:
            return self.functionals[symbol]
        if symbol in self.constants:
            return 0
        raise KeyError(f"Symbol {symbol!r} not in signature {self.name}")

    def modulus(self, symbol: str) -> ModulusFunction:
        try:
            return self.moduli[symbol]
        except KeyError:
            raise KeyError(
                f"Symbol {symbol!r} has no modulus in signature {self.name}"
            ) from None

    def is_operation(self, symbol: str) -> bool:
        return symbol in self.operations

    def is_functional(self, symbol: str) -> bool:
        return symbol in self.functionals


def scale_symbol(factor: Fraction) -> str:
    """Symbol name of multiplication by *factor*."""
    return f"{SCALE_PREFIX}{as_fraction(factor)}"


def parse_scale_symbol(symbol: str) -> Fraction:
    """Factor of a ``"scale:<q>"`` symbol."""
    if not symbol.startswith(SCALE_PREFIX):
        raise KeyError(f"{symbol!r} is not a scalar multiplication symbol")
    return Fraction(symbol[len(SCALE_PREFIX):])


@dataclass(frozen=True)
class BanachSignature(Signature):
    """The Banach signature; ``scale:<q>`` symbols resolve lazily."""

    def arity(self, symbol: str) -> int:
        if symbol.startswith(SCALE_PREFIX):
            parse_scale_symbol(symbol)
            return 1
        return super().arity(symbol)

    def modulus(self, symbol: str) -> ModulusFunction:
        if symbol.startswith(SCALE_PREFIX):
            factor = parse_scale_symbol(symbol)
            if factor == 0:
                return ModulusFunction.identity()
            return ModulusFunction.shifted(max(0, ceil_log2(factor)))
        return super().modulus(symbol)

    def is_operation(self, symbol: str) -> bool:
        return symbol.startswith(SCALE_PREFIX) or super().is_operation(symbol)

    # ---- interpretation on Lebesgue vectors --------------------------

    def apply_operation(self, symbol: str, args: Sequence[LpVector]) -> LpVector:
        """Interpret an operation symbol as vector arithmetic."""
        if symbol == "+":
            return add(args[0], args[1])
        if symbol.startswith(SCALE_PREFIX):
            return scale(parse_scale_symbol(symbol), args[0])
        raise KeyError(f"{symbol!r} is not a Banach operation")

    def apply_functional(
        self, symbol: str, args: Sequence[LpVector], k: int
    ) -> DyadicInterval:
        """Interpret a functional symbol; only ``"norm"`` exists."""
        if symbol != "norm":
            raise KeyError(f"{symbol!r} is not a Banach functional")
        return norm(args[0], k)


METRIC_SIGNATURE = Signature("metric")

BANACH_SIGNATURE = BanachSignature(
    "banach",
    operations={"+": 2},
    functionals={"norm": 1},
    constants=("0",),
    moduli={
        "+": ModulusFunction.shifted(1),
        "norm": ModulusFunction.identity(),
    },
)

SIGNATURES: Dict[str, Signature] = {
    METRIC_SIGNATURE.name: METRIC_SIGNATURE,
    BANACH_SIGNATURE.name: BANACH_SIGNATURE,
}


# ---------------------------------------------------------------------------
# Random rational points
# ---------------------------------------------------------------------------

def random_vector(
    space: LpSpace,
    rng: random.Random,
    max_atoms: int = 4,
    level: int = 3,
    max_numerator: int = 9,
) -> LpVector:
    """Draw a random rational point of *space*.

    Atomic coefficients and step values are ``a / b`` with
    ``|a| <= max_numerator`` and ``1 <= b <= 4``; step breakpoints lie on
    the ``2**-level`` grid.
    """

    def coefficient() -> Fraction:
        return Fraction(
            rng.randint(-max_numerator, max_numerator), rng.randint(1, 4)
        )

    atomic = SeqVector()
    continuous = StepFunction()
    kind = space.kind
    if kind.has_atoms:
        cap = space.dimension if kind.is_finite_dimensional_atomic else 2 * max_atoms
        if cap:
            count = rng.randint(0, min(max_atoms, cap))
            indices = rng.sample(range(cap), count)
            atomic = SeqVector(tuple((i, coefficient()) for i in indices))
    if kind.has_continuum:
        grid = 1 << level
        inner = sorted(rng.sample(range(1, grid), rng.randint(0, min(3, grid - 1))))
        points = [Fraction(0)] + [Fraction(t, grid) for t in inner] + [Fraction(1)]
        continuous = StepFunction(
            tuple(points), tuple(coefficient() for _ in points[:-1])
        )
    return LpVector(space, atomic=atomic, continuous=continuous)


def _ball_point(
    space: LpSpace, rng: random.Random, radius: Fraction, k: int
) -> LpVector:
    """A random vector of norm strictly below *radius*."""
    while True:
        direction = random_vector(space, rng)
        if not direction.is_zero:
            break
    bound = norm(direction, k + 8).hi
    fraction = Fraction(rng.randint(33, 63), 64)
    return scale(fraction * radius / bound, direction)


# ---------------------------------------------------------------------------
# Modulus checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModulusViolation:
    """A certified counterexample to a modulus."""

    k: int
    inputs: Tuple[LpVector, ...]
    perturbed: Tuple[LpVector, ...]
    output_distance: DyadicInterval


@dataclass
class ModulusReport:
    """Outcome of :func:`check_modulus`.

    Attributes
    ----------
    holds:
        Samples certified below ``2**-k``.
    inconclusive:
        Samples whose enclosure straddles ``2**-k``.
    violation:
        First certified counterexample, if any.
    """

    symbol: str
    modulus: ModulusFunction
    samples: int
    holds: int = 0
    inconclusive: int = 0
    violation: Optional[ModulusViolation] = None

    @property
    def verdict(self) -> Certainty:
        if self.violation is not None:
            return Certainty.VIOLATED
        if self.inconclusive:
            return Certainty.INCONCLUSIVE
        return Certainty.HOLDS


def check_modulus(
    presentation: BanachPresentation,
    symbol: str,
    modulus: ModulusFunction,
    samples: int,
    k_max: int,
    seed: int = 0,
) -> ModulusReport:
    """Test *modulus* for *symbol* on random rational points.

    For each sample a precision ``k <= k_max`` and base points ``p`` are
    drawn, and each ``q_j`` is placed strictly inside the
    ``2**-modulus(k)`` ball around ``p_j``.  The output distance is
    enclosed; a lower endpoint ``>= 2**-k`` is a certified violation.

    Parameters
    ----------
    presentation:
        A Banach presentation interpreting *symbol*.
    samples:
        Number of random tuples.
    k_max:
        Largest precision exponent drawn.

    Raises
    ------
    UnsupportedSpace
        If the presentation does not carry the Banach signature.
    """
    signature = presentation.signature
    if not isinstance(signature, BanachSignature):
        raise UnsupportedSpace(
            f"Signature {signature.name} has no interpreted symbols"
        )
    arity = signature.arity(symbol)
    rng = random.Random(seed)
    space = presentation.space
    report = ModulusReport(symbol, modulus, samples)
    for _ in range(samples):
        k = rng.randint(0, k_max)
        radius = pow2(modulus(k))
        base = tuple(random_vector(space, rng) for _ in range(arity))
        moved = tuple(
            add(v, _ball_point(space, rng, radius, k)) for v in base
        )
        work = k + 10
        if signature.is_operation(symbol):
            out = distance(
                signature.apply_operation(symbol, base),
                signature.apply_operation(symbol, moved),
                work,
            )
        else:
            out = interval_abs(
                signature.apply_functional(symbol, base, work)
                - signature.apply_functional(symbol, moved, work)
            )
        threshold = pow2(k)
        if out.lo >= threshold:
            logger.debug("Modulus %s of %s violated at k=%d", modulus, symbol, k)
            report.violation = ModulusViolation(k, base, moved, out)
            break
        if out.hi < threshold:
            report.holds += 1
        else:
            report.inconclusive += 1
    return report


def describe_symbols(signature: Signature) -> List[str]:
    """One ``symbol/arity modulus`` line per symbol, for reports."""
    lines = []
    for symbol, arity in sorted({**signature.operations, **signature.functionals}.items()):
        lines.append(f"{symbol}/{arity} Delta={signature.modulus(symbol)}")
    lines.extend(f"{c}/0" for c in signature.constants)
    if isinstance(signature, BanachSignature):
        lines.append("scale:<q>/1 Delta=k+max(0,ceil(log2|q|))")
    return lines
