"""Finite-stage checks and searches for isometry codes.

An *isometry code* between presentations ``P0`` (points ``x_j``) and
``P1`` (points ``y_j``) is a pair of tables ``f, g: N x N -> N`` where
``y_{f(m, n)}`` approximates ``Phi(x_m)`` and ``x_{g(m, n)}`` approximates
``Phi^-1(y_m)``.  A pair codes an isometric isomorphism exactly when it
satisfies six conditions for all indices:

1. ``max(d(y_f(m,n), y_f(m,n+1)), d(x_g(m,n), x_g(m,n+1))) <= 2^-(n+1)``
2. ``|d(x_m, x_m') - d(y_f(m,n), y_f(m',n'))| <= 2^-n + 2^-n'``
3. ``max(d(x_m, x_g(f(m,n),n')), d(y_m, y_f(g(m,n),n'))) <= 2^-n + 2^-n'``
4. ``d(y_f(zeta_T(j..),k), y_zeta'_T(f(j1,k1), ..)) <= 2^-(k+1) + 2^-m``
   whenever ``Delta_T(m) <= min k_s + 1``
5. ``|F(x_j1, ..) - F(y_f(j1,k1), ..)| <= 2^-m``
   whenever ``Delta_F(m) <= min k_s + 1``
6. ``d(y_zeta'_c(j), y_f(zeta_c(j),k)) <= 2^-j+1 + 2^-(k+1)``

Every condition is universal, so a finite table can only ever be
*refuted*: :func:`check_conditions` evaluates all instances whose
quantified indices are at most ``depth`` and reports, per condition,
``violated-certified`` (an enclosure lies strictly above the threshold),
``holds-certified`` or ``inconclusive``.

In conditions 4 and 5 a larger ``m`` gives a smaller threshold, so only
the largest admissible ``m <= depth`` is evaluated.  Instances that need
a table entry outside the declared grid are counted as skipped.

:func:`search_tables` enumerates *stationary* tables (``f(m, .)`` and
``g(m, .)`` constant in ``n``) depth first and prunes every prefix with
a certified violation.
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from pylpstruct.enums import Certainty
from pylpstruct.exact import DyadicInterval, interval_abs, interval_sub, pow2
from pylpstruct.errors import BudgetExhausted, GridTooSmall, MalformedInputError
from pylpstruct.presentation import (
    BanachPresentation,
    FiniteMetricPresentation,
    Presentation,
    canonical_index,
    term_of,
)
from pylpstruct.signature import SCALE_PREFIX, parse_scale_symbol, scale_symbol

logger = logging.getLogger(__name__)

CONDITIONS = (1, 2, 3, 4, 5, 6)


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IsometryTable:
    """The pair ``(f, g)`` on the grid ``[0, rows) x [0, cols)``.

    ``f[m][n]`` and ``g[m][n]`` are rational point indices.
    """

    f: Tuple[Tuple[int, ...], ...]
    g: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.f) != len(self.g):
            raise ValueError("f and g must have the same number of rows")
        widths = {len(row) for row in self.f} | {len(row) for row in self.g}
        if len(widths) > 1:
            raise ValueError("Table rows must all have the same length")

    # ---- constructors ------------------------------------------------

    @classmethod
    def from_functions(
        cls,
        f: Callable[[int, int], int],
        g: Callable[[int, int], int],
        rows: int,
        cols: int,
    ) -> IsometryTable:
        return cls(
            tuple(tuple(f(m, n) for n in range(cols)) for m in range(rows)),
            tuple(tuple(g(m, n) for n in range(cols)) for m in range(rows)),
        )

    @classmethod
    def stationary(
        cls, f_values: Sequence[int], g_values: Sequence[int], cols: int
    ) -> IsometryTable:
        """Tables with ``f(m, n) = f_values[m]`` for every ``n``."""
        return cls(
            tuple((v,) * cols for v in f_values),
            tuple((v,) * cols for v in g_values),
        )

    @classmethod
    def identity(cls, rows: int, cols: int) -> IsometryTable:
        return cls.stationary(range(rows), range(rows), cols)

    # ---- grid --------------------------------------------------------

    @property
    def rows(self) -> int:
        return len(self.f)

    @property
    def cols(self) -> int:
        return len(self.f[0]) if self.f else 0

    def f_at(self, m: int, n: int) -> Optional[int]:
        """``f(m, n)`` or ``None`` outside the grid."""
        if 0 <= m < self.rows and 0 <= n < self.cols:
            return self.f[m][n]
        return None

    def g_at(self, m: int, n: int) -> Optional[int]:
        if 0 <= m < self.rows and 0 <= n < self.cols:
            return self.g[m][n]
        return None

    def require(self, rows: int, cols: int) -> None:
        """Raise :class:`GridTooSmall` unless the grid covers ``rows x cols``."""
        for name in ("f", "g"):
            if self.rows < rows:
                raise GridTooSmall((name, self.rows, 0))
            if self.cols < cols:
                raise GridTooSmall((name, 0, self.cols))

    @property
    def is_stationary(self) -> bool:
        return all(len(set(row)) <= 1 for row in self.f + self.g)

    # ---- text form ---------------------------------------------------

    def to_lines(self) -> List[str]:
        """``f m n v`` / ``g m n v`` lines in row-major order."""
        lines = []
        for name, table in (("f", self.f), ("g", self.g)):
            for m, row in enumerate(table):
                lines.extend(f"{name} {m} {n} {v}" for n, v in enumerate(row))
        return lines

    @classmethod
    def from_lines(cls, lines: Iterable[str], source: str = "<table>") -> IsometryTable:
        """Parse table lines; blank lines and ``#`` comments are ignored.

        Raises
        ------
        MalformedInputError
            On a bad line, a repeated entry or a hole in the grid.
        """
        entries: Dict[Tuple[str, int, int], int] = {}
        for number, raw in enumerate(lines, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 4 or parts[0] not in ("f", "g"):
                raise MalformedInputError(
                    f"expected 'f|g m n v', got {raw.strip()!r}", source, number
                )
            if not all(p.isdigit() for p in parts[1:]):
                raise MalformedInputError(
                    f"indices must be nonnegative integers: {raw.strip()!r}",
                    source,
                    number,
                )
            key = (parts[0], int(parts[1]), int(parts[2]))
            if key in entries:
                raise MalformedInputError(f"duplicate entry {key}", source, number)
            entries[key] = int(parts[3])
        if not entries:
            raise MalformedInputError("table is empty", source)
        rows = max(m for _, m, _ in entries) + 1
        cols = max(n for _, _, n in entries) + 1
        tables = []
        for name in ("f", "g"):
            table = []
            for m in range(rows):
                row = []
                for n in range(cols):
                    if (name, m, n) not in entries:
                        raise MalformedInputError(
                            f"table {name} has no entry at ({m}, {n})", source
                        )
                    row.append(entries[(name, m, n)])
                table.append(tuple(row))
            tables.append(tuple(table))
        return cls(tables[0], tables[1])


def compose_tables(first: IsometryTable, second: IsometryTable) -> IsometryTable:
    """Table of ``second o first``: ``f(m, n) = second.f(first.f(m, n), n)``.

    and ``g(m, n) = first.g(second.g(m, n), n)``.  The composed grid ends
    before the first row that needs an entry outside an input grid.
    """
    cols = min(first.cols, second.cols)
    f_rows: List[Tuple[int, ...]] = []
    g_rows: List[Tuple[int, ...]] = []
    for m in range(min(first.rows, second.rows)):
        f_row = [_chain(first.f_at, second.f_at, m, n) for n in range(cols)]
        g_row = [_chain(second.g_at, first.g_at, m, n) for n in range(cols)]
        if None in f_row or None in g_row:
            break
        f_rows.append(tuple(v for v in f_row if v is not None))
        g_rows.append(tuple(v for v in g_row if v is not None))
    return IsometryTable(tuple(f_rows), tuple(g_rows))


def _chain(
    inner: Callable[[int, int], Optional[int]],
    outer: Callable[[int, int], Optional[int]],
    m: int,
    n: int,
) -> Optional[int]:
    middle = inner(m, n)
    return None if middle is None else outer(middle, n)


@dataclass(frozen=True)
class LimitPoint:
    """A rational point index with a distance bound to the limit."""

    index: int
    error_bound: Fraction


def limit_map_from_table(
    table: IsometryTable, target: Presentation, m: int, k: int
) -> LimitPoint:
    """Approximate ``Phi(x_m)`` by ``y_f(m, k)`` within ``2**-k``.

    Condition 1 bounds the tail ``sum_{i >= k} 2^-(i+1)`` by ``2**-k``.

    Raises
    ------
    GridTooSmall
        If ``f(m, k)`` is outside the grid.
    """
    value = table.f_at(m, k)
    if value is None:
        raise GridTooSmall(("f", m, k))
    # touch the target so out-of-range indices fail here, not later
    target.term(value)
    return LimitPoint(value, pow2(k))


# ---------------------------------------------------------------------------
# Term maps
# ---------------------------------------------------------------------------

class TermMaps:
    """The maps ``zeta_T``, ``zeta'_T`` and ``zeta_c`` for a pair of
    presentations.

    Both presentations use the same term numbering, so ``zeta = zeta'``:
    ``zeta_+(i, j)`` is the index of the term adding the coefficients of
    terms ``i`` and ``j``, ``zeta_scale:q(i)`` scales them, and
    ``zeta_0(j) = 0`` (the zero term, exact at every ``j``).
    """

    def __init__(self, source: Presentation, target: Presentation) -> None:
        self.source = source
        self.target = target
        self.banach = isinstance(source, BanachPresentation) and isinstance(
            target, BanachPresentation
        )
        self._cache: Dict[Tuple[str, Tuple[int, ...]], int] = {}

    def operations(self, bound: int) -> List[str]:
        """``"+"`` plus ``scale:q`` for every coefficient ``q`` of the
        terms with index ``< bound``."""
        if not self.banach:
            return []
        scalars = sorted(
            {q for i in range(bound) for _, q in term_of(i).summands}
        )
        return ["+"] + [scale_symbol(q) for q in scalars]

    def functionals(self) -> List[str]:
        return ["norm"] if self.banach else []

    def constants(self) -> List[str]:
        return ["0"] if self.banach else []

    def zeta(self, symbol: str, indices: Tuple[int, ...]) -> int:
        key = (symbol, indices)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        if symbol == "+":
            total: Dict[int, Fraction] = {}
            for i in indices:
                for a, q in term_of(i).coefficients().items():
                    total[a] = total.get(a, Fraction(0)) + q
            result = canonical_index(total)
        elif symbol.startswith(SCALE_PREFIX):
            s = parse_scale_symbol(symbol)
            result = canonical_index(
                {a: s * q for a, q in term_of(indices[0]).coefficients().items()}
            )
        else:
            raise KeyError(f"No term map for {symbol!r}")
        self._cache[key] = result
        return result

    zeta_prime = zeta

    def zeta_constant(self, symbol: str, j: int) -> int:
        if symbol != "0":
            raise KeyError(f"No constant {symbol!r}")
        return 0


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------

@dataclass
class ConditionOutcome:
    """Result of one condition over all instances up to the depth."""

    number: int
    certainty: Certainty = Certainty.HOLDS
    witness: Optional[Tuple[object, ...]] = None
    enclosure: Optional[DyadicInterval] = None
    threshold: Optional[Fraction] = None
    instances: int = 0
    inconclusive: int = 0
    skipped: int = 0

    def record(
        self,
        verdict: Certainty,
        witness: Tuple[object, ...],
        enclosure: DyadicInterval,
        threshold: Fraction,
    ) -> None:
        self.instances += 1
        if verdict is Certainty.VIOLATED:
            if self.certainty is not Certainty.VIOLATED:
                self.certainty = Certainty.VIOLATED
                self.witness = witness
                self.enclosure = enclosure
                self.threshold = threshold
        elif verdict is Certainty.INCONCLUSIVE:
            self.inconclusive += 1
            if self.certainty is Certainty.HOLDS:
                self.certainty = Certainty.INCONCLUSIVE


@dataclass
class ConditionVerdict:
    """Per-condition outcomes of :func:`check_conditions`."""

    depth: int
    k: int
    outcomes: Dict[int, ConditionOutcome] = field(
        default_factory=lambda: {c: ConditionOutcome(c) for c in CONDITIONS}
    )

    def __getitem__(self, condition: int) -> Certainty:
        return self.outcomes[condition].certainty

    @property
    def violated(self) -> List[int]:
        return [c for c in CONDITIONS if self[c] is Certainty.VIOLATED]

    @property
    def overall(self) -> Certainty:
        if self.violated:
            return Certainty.VIOLATED
        if any(self[c] is Certainty.INCONCLUSIVE for c in CONDITIONS):
            return Certainty.INCONCLUSIVE
        return Certainty.HOLDS


# ---------------------------------------------------------------------------
# Instance evaluation
# ---------------------------------------------------------------------------

class _Evaluator:
    """Memoized metric and functional enclosures at a fixed precision."""

    def __init__(self, source: Presentation, target: Presentation, k: int) -> None:
        self.sides = (source, target)
        self.k = k
        self._metric: Dict[Tuple[int, int, int], DyadicInterval] = {}
        self._functional: Dict[Tuple[int, str, int], DyadicInterval] = {}

    def d(self, side: int, i: int, j: int) -> DyadicInterval:
        key = (side, min(i, j), max(i, j))
        value = self._metric.get(key)
        if value is None:
            value = self.sides[side].eval_metric(key[1], key[2], self.k)
            self._metric[key] = value
        return value

    def functional(self, side: int, symbol: str, i: int) -> DyadicInterval:
        key = (side, symbol, i)
        value = self._functional.get(key)
        if value is None:
            value = self.sides[side].eval_functional(symbol, (i,), self.k)
            self._functional[key] = value
        return value


def _largest_admissible(modulus: Callable[[int], int], bound: int, depth: int) -> Optional[int]:
    """Largest ``m <= depth`` with ``modulus(m) <= bound``."""
    for m in range(depth, -1, -1):
        if modulus(m) <= bound:
            return m
    return None


class _Checker:
    """Evaluates single condition instances for a table under construction."""

    def __init__(
        self,
        source: Presentation,
        target: Presentation,
        maps: TermMaps,
        depth: int,
        k: int,
    ) -> None:
        self.ev = _Evaluator(source, target, k)
        self.maps = maps
        self.depth = depth
        self.signature = source.signature
        self.operations = maps.operations(depth + 1)

    # Each method returns (verdict, enclosure, threshold).

    def cauchy(
        self, side: int, a: int, b: int, n: int
    ) -> Tuple[Certainty, DyadicInterval, Fraction]:
        threshold = pow2(n + 1)
        value = self.ev.d(side, a, b)
        return value.check_at_most(threshold), value, threshold

    def isometric(
        self, m: int, m2: int, v: int, v2: int, n: int, n2: int
    ) -> Tuple[Certainty, DyadicInterval, Fraction]:
        threshold = pow2(n) + pow2(n2)
        gap = interval_abs(interval_sub(self.ev.d(0, m, m2), self.ev.d(1, v, v2)))
        return gap.check_at_most(threshold), gap, threshold

    def inverse(
        self, side: int, m: int, back: int, n: int, n2: int
    ) -> Tuple[Certainty, DyadicInterval, Fraction]:
        threshold = pow2(n) + pow2(n2)
        value = self.ev.d(side, m, back)
        return value.check_at_most(threshold), value, threshold

    def operation(
        self, symbol: str, image: int, combined: int, k: int, ks: Sequence[int]
    ) -> Optional[Tuple[Certainty, DyadicInterval, Fraction]]:
        m = _largest_admissible(self.signature.modulus(symbol), min(ks) + 1, self.depth)
        if m is None:
            return None
        threshold = pow2(k + 1) + pow2(m)
        value = self.ev.d(1, image, combined)
        return value.check_at_most(threshold), value, threshold

    def functional(
        self, symbol: str, j: int, v: int, k1: int
    ) -> Optional[Tuple[Certainty, DyadicInterval, Fraction]]:
        m = _largest_admissible(self.signature.modulus(symbol), k1 + 1, self.depth)
        if m is None:
            return None
        threshold = pow2(m)
        gap = interval_abs(
            interval_sub(self.ev.functional(0, symbol, j), self.ev.functional(1, symbol, v))
        )
        return gap.check_at_most(threshold), gap, threshold

    def constant(
        self, image_of_constant: int, image: int, j: int, k: int
    ) -> Tuple[Certainty, DyadicInterval, Fraction]:
        threshold = pow2(j - 1) + pow2(k + 1)
        value = self.ev.d(1, image_of_constant, image)
        return value.check_at_most(threshold), value, threshold


# ---------------------------------------------------------------------------
# check_conditions
# ---------------------------------------------------------------------------

def check_conditions(
    table: IsometryTable,
    source: Presentation,
    target: Presentation,
    maps: TermMaps,
    depth: int,
    k: int,
) -> ConditionVerdict:
    """Evaluate conditions 1-6 on all instances with indices ``<= depth``.

    Parameters
    ----------
    table:
        Must cover ``[0, depth] x [0, depth + 1]``.
    source, target:
        The presentations ``P0`` and ``P1``.
    k:
        Precision of every metric and functional enclosure.

    Raises
    ------
    GridTooSmall
        If the table does not cover the required grid.
    """
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    table.require(depth + 1, depth + 2)
    checker = _Checker(source, target, maps, depth, k)
    verdict = ConditionVerdict(depth, k)
    out = verdict.outcomes
    span = range(depth + 1)

    for m, n in itertools.product(span, span):
        result = checker.cauchy(1, table.f[m][n], table.f[m][n + 1], n)
        out[1].record(result[0], ("f", m, n), *result[1:])
        result = checker.cauchy(0, table.g[m][n], table.g[m][n + 1], n)
        out[1].record(result[0], ("g", m, n), *result[1:])

    for m, m2, n, n2 in itertools.product(span, span, span, span):
        result = checker.isometric(m, m2, table.f[m][n], table.f[m2][n2], n, n2)
        out[2].record(result[0], (m, m2, n, n2), *result[1:])

    for m, n, n2 in itertools.product(span, span, span):
        back = table.g_at(table.f[m][n], n2)
        if back is None:
            out[3].skipped += 1
        else:
            result = checker.inverse(0, m, back, n, n2)
            out[3].record(result[0], ("x", m, n, n2), *result[1:])
        forth = table.f_at(table.g[m][n], n2)
        if forth is None:
            out[3].skipped += 1
        else:
            result = checker.inverse(1, m, forth, n, n2)
            out[3].record(result[0], ("y", m, n, n2), *result[1:])

    for symbol in checker.operations:
        arity = source.signature.arity(symbol)
        for js in itertools.product(span, repeat=arity):
            source_term = maps.zeta(symbol, js)
            for ks in itertools.product(span, repeat=arity):
                target_term = maps.zeta_prime(
                    symbol, tuple(table.f[j][kk] for j, kk in zip(js, ks))
                )
                for kk in span:
                    image = table.f_at(source_term, kk)
                    if image is None:
                        out[4].skipped += 1
                        continue
                    result = checker.operation(symbol, image, target_term, kk, ks)
                    if result is None:
                        out[4].skipped += 1
                        continue
                    out[4].record(result[0], (symbol, js, kk, ks), *result[1:])

    for symbol in maps.functionals():
        for j, k1 in itertools.product(span, span):
            result = checker.functional(symbol, j, table.f[j][k1], k1)
            if result is None:
                out[5].skipped += 1
                continue
            out[5].record(result[0], (symbol, j, k1), *result[1:])

    for symbol in maps.constants():
        for j, kk in itertools.product(span, span):
            image = table.f_at(maps.zeta_constant(symbol, j), kk)
            if image is None:
                out[6].skipped += 1
                continue
            result = checker.constant(maps.zeta_constant(symbol, j), image, j, kk)
            out[6].record(result[0], (symbol, j, kk), *result[1:])

    logger.debug(
        "Checked conditions at depth %d: %s",
        depth,
        {c: verdict[c].value for c in CONDITIONS},
    )
    return verdict


# ---------------------------------------------------------------------------
# search_tables
# ---------------------------------------------------------------------------

@dataclass
class SearchResult:
    """Survivors and statistics of :func:`search_tables`.

    Attributes
    ----------
    survivors:
        Complete stationary tables without a certified violation, in
        lexicographic order of ``(f values, g values)``.
    prunes:
        Number of pruned extensions per condition number.
    explored:
        Number of candidate extensions tried.
    exhausted:
        ``True`` when the budget ran out before the search finished.
    """

    depth: int
    survivors: List[IsometryTable] = field(default_factory=list)
    prunes: Counter = field(default_factory=Counter)
    explored: int = 0
    exhausted: bool = False


def _point_bound(presentation: Presentation, candidates: int) -> int:
    if isinstance(presentation, FiniteMetricPresentation):
        return min(candidates, len(presentation.distances))
    return candidates


class _Search:
    def __init__(
        self,
        source: Presentation,
        target: Presentation,
        maps: TermMaps,
        depth: int,
        k: int,
        budget: int,
        candidates: int,
    ) -> None:
        self.checker = _Checker(source, target, maps, depth, k)
        self.maps = maps
        self.depth = depth
        self.budget = budget
        self.source = source
        self.result = SearchResult(depth)
        self.f: List[int] = []
        self.g: List[int] = []
        self.ranges = (
            range(_point_bound(target, candidates)),
            range(_point_bound(source, candidates)),
        )

    def run(self) -> SearchResult:
        self._extend()
        self.result.survivors.sort(key=lambda t: (t.f, t.g))
        return self.result

    def _extend(self) -> None:
        side = 0 if len(self.f) <= self.depth else 1
        if side == 1 and len(self.g) > self.depth:
            self.result.survivors.append(
                IsometryTable.stationary(self.f, self.g, self.depth + 2)
            )
            return
        row = self.f if side == 0 else self.g
        for value in self.ranges[side]:
            if self.result.explored >= self.budget:
                self.result.exhausted = True
                raise BudgetExhausted(self.result)
            self.result.explored += 1
            row.append(value)
            failed = self._first_violation(side)
            if failed is None:
                self._extend()
            else:
                self.result.prunes[failed] += 1
            row.pop()

    def _first_violation(self, side: int) -> Optional[int]:
        """Condition number violated by the newest assignment, if any."""
        d = self.depth
        c = self.checker
        if side == 0:
            m = len(self.f) - 1
            v = self.f[m]
            for m2 in range(m + 1):
                if c.isometric(m, m2, v, self.f[m2], d, d)[0] is Certainty.VIOLATED:
                    return 2
            for symbol in self.maps.functionals():
                result = c.functional(symbol, m, v, d)
                if result is not None and result[0] is Certainty.VIOLATED:
                    return 5
            if self._operations_violated(m):
                return 4
            for symbol in self.maps.constants():
                zero = self.maps.zeta_constant(symbol, d)
                if zero == m and c.constant(zero, v, d, d)[0] is Certainty.VIOLATED:
                    return 6
            return None
        m = len(self.g) - 1
        w = self.g[m]
        for m0 in range(len(self.f)):
            if self.f[m0] == m and c.inverse(0, m0, w, d, d)[0] is Certainty.VIOLATED:
                return 3
        if w < len(self.f) and c.inverse(1, m, self.f[w], d, d)[0] is Certainty.VIOLATED:
            return 3
        return None

    def _operations_violated(self, newest: int) -> bool:
        d = self.depth
        assigned = len(self.f)
        for symbol in self.checker.operations:
            arity = self.source.signature.arity(symbol)
            for js in itertools.product(range(assigned), repeat=arity):
                source_term = self.maps.zeta(symbol, js)
                if source_term >= assigned or newest not in js + (source_term,):
                    continue
                combined = self.maps.zeta_prime(symbol, tuple(self.f[j] for j in js))
                result = self.checker.operation(
                    symbol, self.f[source_term], combined, d, (d,) * arity
                )
                if result is not None and result[0] is Certainty.VIOLATED:
                    return True
        return False


def search_tables(
    source: Presentation,
    target: Presentation,
    maps: TermMaps,
    depth: int,
    k: int,
    budget: int,
    candidates: Optional[int] = None,
) -> SearchResult:
    """Enumerate stationary tables on indices ``<= depth`` and prune.

    ``f(0), ..., f(depth)`` are assigned first, then ``g(0), ..., g(depth)``;
    each value ranges over ``0 .. candidates - 1`` (default ``depth + 1``)
    in increasing order.  A prefix is pruned as soon as an instance that
    only involves assigned entries is violated-certified at the tightest
    thresholds (``n = n' = k_s = depth``).  Condition 2 against all
    earlier rows is tried first, which also keeps each ``f(m)`` inside
    the norm ball that condition 2 allows around the image of ``x_0``.

    Raises
    ------
    BudgetExhausted
        When more than *budget* extensions would be tried; the partial
        :class:`SearchResult` is attached.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    if depth < 0 or _point_bound(source, depth + 1) <= depth:
        raise ValueError(f"depth {depth} exceeds the points of {source.describe()}")
    search = _Search(
        source,
        target,
        maps,
        depth,
        k,
        budget,
        depth + 1 if candidates is None else candidates,
    )
    result = search.run()
    logger.debug(
        "Search at depth %d explored %d extensions, %d survivors, prunes %s",
        depth,
        result.explored,
        len(result.survivors),
        dict(result.prunes),
    )
    return result
