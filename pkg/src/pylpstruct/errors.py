"""Exception hierarchy for pylpstruct.

Every error raised deliberately by the library derives from
:class:`PyLpStructError`.  Errors that signal a bad argument value also
derive from :class:`ValueError` so generic callers can catch them the
usual way.

Certified *violations* and *inconclusive* outcomes are never raised;
they are part of the report objects returned by the checking functions.
"""

from __future__ import annotations

from typing import Any, Optional, Tuple


class PyLpStructError(Exception):
    """Base class for all pylpstruct errors."""


# ---------------------------------------------------------------------------
# exact arithmetic / vectors
# ---------------------------------------------------------------------------

class NegativeBase(PyLpStructError, ValueError):
    """Raised when a real power or root is requested of a base that may
    be negative.

    Attributes
    ----------
    lower:
        The offending lower endpoint.
    """

    def __init__(self, lower: Any) -> None:
        self.lower = lower
        super().__init__(
            f"Power/root base must be nonnegative, lower endpoint is {lower}"
        )


class SpaceMismatch(PyLpStructError, ValueError):
    """Raised when two vectors from different spaces are combined."""

    def __init__(self, left: Any, right: Any) -> None:
        self.left = left
        self.right = right
        super().__init__(f"Space mismatch: {left} vs {right}")


class UnsupportedSpace(PyLpStructError, ValueError):
    """Raised when an operation is not available for a space kind."""


# ---------------------------------------------------------------------------
# disintegrations and synthesis
# ---------------------------------------------------------------------------

class ValidationMissing(PyLpStructError):
    """Raised by :func:`~pylpstruct.disintegration.partition_chains` when
    the tree has not been validated as separating and summative."""


class UnknownChainLimit(PyLpStructError):
    """Raised when a projection needs a chain limit that is still
    ``unknown-at-depth``.

    Attributes
    ----------
    chain_id:
        The chain whose verdict is unknown; the caller must deepen the
        tree.
    """

    def __init__(self, chain_id: int) -> None:
        self.chain_id = chain_id
        super().__init__(
            f"Chain {chain_id} has no certified limit at this depth"
        )


class AtomCountMismatch(PyLpStructError):
    """Raised when synthesis finds a different number of atoms than the
    target space has."""

    def __init__(self, expected: int, found: int) -> None:
        self.expected = expected
        self.found = found
        super().__init__(
            f"Expected {expected} atom chains, found {found}"
        )


class PrecisionExhausted(PyLpStructError):
    """Raised when enclosures at the requested depth/precision are too
    wide to decide a step of a construction."""


# ---------------------------------------------------------------------------
# isometry codes
# ---------------------------------------------------------------------------

class GridTooSmall(PyLpStructError, ValueError):
    """Raised when an isometry table does not cover the required grid.

    Attributes
    ----------
    entry:
        ``(name, m, n)`` of the first missing table entry.
    """

    def __init__(self, entry: Tuple[str, int, int]) -> None:
        self.entry = entry
        name, m, n = entry
        super().__init__(f"Table {name} is not defined at ({m}, {n})")


class BudgetExhausted(PyLpStructError):
    """Raised when a table search runs out of its exploration budget.

    Attributes
    ----------
    partial:
        The :class:`~pylpstruct.isometry_codes.SearchResult` collected
        before the budget ran out (flagged as exhausted).
    """

    def __init__(self, partial: Any) -> None:
        self.partial = partial
        super().__init__(
            f"Search budget exhausted after {partial.explored} candidate "
            f"extensions"
        )


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------

class LoopDetected(PyLpStructError, ValueError):
    """Raised when a graph contains an edge ``(v, v)``."""

    def __init__(self, vertex: int) -> None:
        self.vertex = vertex
        super().__init__(f"Graph has a loop at vertex {vertex}")


class NotIsomorphism(PyLpStructError):
    """Raised when a vertex map is not a graph isomorphism.

    Attributes
    ----------
    witness:
        The pair of source vertices whose edge relation is not preserved,
        or ``None`` when the map is not a bijection.
    """

    def __init__(
        self, reason: str, witness: Optional[Tuple[int, int]] = None
    ) -> None:
        self.witness = witness
        super().__init__(reason)


# ---------------------------------------------------------------------------
# input files
# ---------------------------------------------------------------------------

class MalformedInputError(PyLpStructError, ValueError):
    """Raised when a literal or input file cannot be parsed.

    Attributes
    ----------
    source:
        File name or ``"<literal>"``.
    line:
        1-based line number, or ``None`` when not line-oriented.
    """

    def __init__(
        self, message: str, source: str = "<literal>", line: Optional[int] = None
    ) -> None:
        self.source = source
        self.line = line
        where = source if line is None else f"{source}:{line}"
        super().__init__(f"{where}: {message}")
