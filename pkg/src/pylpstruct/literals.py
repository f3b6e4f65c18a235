"""Parsing of rational and vector literals.

Vector literal grammar (whitespace is free between tokens)::

    vector   := atomic? step?
    atomic   := "[" [ entry { "," entry } ] "]"
    entry    := INDEX ":" RATIONAL
    step     := "{" RATIONAL RATIONAL { RATIONAL RATIONAL } "1" "}"
    RATIONAL := integer | integer "/" integer | decimal

The step part lists ``t0 q0 t1 q1 ... 1``: breakpoint ``t_i`` followed by
the value on ``[t_i, t_{i+1})``, closed by the final breakpoint ``1``.
Omitted parts are zero.  Examples::

    [0:1, 2:-1/2]            ell^p vector e0 - e2/2
    {0 1 1/2 0 1}            indicator of [0, 1/2)
    [1:3] {0 0 3/4 2 1}      vector of a sum space

:meth:`pylpstruct.lebesgue.LpVector.literal` renders the same syntax.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Optional, Tuple

from pylpstruct.errors import MalformedInputError
from pylpstruct.lebesgue import LpSpace, LpVector, SeqVector, StepFunction

_VECTOR_RE = re.compile(
    r"^\s*(?:\[(?P<atoms>[^\]]*)\])?\s*(?:\{(?P<steps>[^}]*)\})?\s*$"
)
_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/\d+|\.\d+)?$")


def parse_rational(
    token: str, source: str = "<literal>", line: Optional[int] = None
) -> Fraction:
    """Parse ``"3"``, ``"-1/2"`` or ``"0.25"`` exactly.

    Raises
    ------
    MalformedInputError
        On anything else, including a zero denominator.
    """
    text = token.strip()
    if not _RATIONAL_RE.match(text):
        raise MalformedInputError(f"not a rational: {token!r}", source, line)
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise MalformedInputError(
            f"zero denominator in {token!r}", source, line
        ) from None


def parse_int(
    token: str, source: str = "<literal>", line: Optional[int] = None
) -> int:
    """Parse a nonnegative integer token."""
    text = token.strip()
    if not text.isdigit():
        raise MalformedInputError(
            f"not a nonnegative integer: {token!r}", source, line
        )
    return int(text)


def _parse_atoms(
    body: str, source: str, line: Optional[int]
) -> Tuple[Tuple[int, Fraction], ...]:
    entries: List[Tuple[int, Fraction]] = []
    if not body.strip():
        return ()
    for item in body.split(","):
        index, sep, value = item.partition(":")
        if not sep:
            raise MalformedInputError(
                f"atomic entry {item.strip()!r} lacks ':'", source, line
            )
        entries.append(
            (parse_int(index, source, line), parse_rational(value, source, line))
        )
    return tuple(entries)


def _parse_steps(body: str, source: str, line: Optional[int]) -> StepFunction:
    tokens = body.split()
    if len(tokens) < 3 or len(tokens) % 2 == 0:
        raise MalformedInputError(
            "step part must read 't0 q0 ... 1' with an odd token count",
            source,
            line,
        )
    numbers = [parse_rational(t, source, line) for t in tokens]
    try:
        return StepFunction(tuple(numbers[0::2]), tuple(numbers[1::2]))
    except ValueError as exc:
        raise MalformedInputError(str(exc), source, line) from None


def parse_vector(
    text: str,
    space: LpSpace,
    source: str = "<literal>",
    line: Optional[int] = None,
) -> LpVector:
    """Parse a vector literal into *space*.

    Raises
    ------
    MalformedInputError
        On a syntax error or a vector the space cannot hold.
    """
    match = _VECTOR_RE.match(text)
    if match is None:
        raise MalformedInputError(f"bad vector literal {text!r}", source, line)
    atoms = match.group("atoms")
    steps = match.group("steps")
    atomic = SeqVector(_parse_atoms(atoms, source, line)) if atoms else SeqVector()
    continuous = (
        _parse_steps(steps, source, line) if steps is not None else StepFunction()
    )
    try:
        return LpVector(space, atomic=atomic, continuous=continuous)
    except ValueError as exc:
        raise MalformedInputError(str(exc), source, line) from None
