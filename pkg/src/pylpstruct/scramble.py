"""Hidden isometries and the scrambled presentations built from them.

A :class:`HiddenIsometry` of a Lebesgue space is

* a signed permutation of finitely many atoms
  (``e_i -> s_i * e_{pi(i)}``, atoms past the table are fixed), and
* a signed rearrangement of the ``2**level`` dyadic pieces of ``[0, 1]``
  (piece ``j`` is translated onto piece ``sigma(j)`` and multiplied by
  ``t_j``).

Both parts preserve L^p norms for every ``p``.  A
:class:`ScrambledPresentation` uses ``T(x_0), T(x_1), ...`` as generators
where ``x_a`` are the standard generators, so its ``m``-th rational point
is the image of the ``m``-th standard rational point.  The hidden map is
the ground truth against which synthesis and the table search are
checked.

Scramble documents are YAML mappings::

    format: pylpstruct-scramble/1
    structure: lpn_sum
    p: '1'
    dimension: 2
    atoms: {permutation: [1, 0], signs: [1, 1]}
    pieces: {level: 1, permutation: [1, 0], signs: [1, -1]}
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from pylpstruct.enums import SpaceKind
from pylpstruct.exact import Exponent
from pylpstruct.errors import MalformedInputError
from pylpstruct.isometry_codes import IsometryTable
from pylpstruct.lebesgue import LpSpace, LpVector, SeqVector, StepFunction, norm, sub
from pylpstruct.presentation import (
    BanachPresentation,
    atom_generator,
    canonical_index,
    dyadic_piece_number,
    piece_generator,
    space_document,
    standard_generator,
    term_of,
)

logger = logging.getLogger(__name__)

FORMAT_TAG = "pylpstruct-scramble/1"


def _check_signed_permutation(
    name: str, permutation: Sequence[int], signs: Sequence[int]
) -> None:
    if sorted(permutation) != list(range(len(permutation))):
        raise ValueError(f"{name} permutation {list(permutation)} is not a bijection")
    if len(signs) != len(permutation) or any(s not in (1, -1) for s in signs):
        raise ValueError(f"{name} signs must be +1/-1, one per entry")


def _invert(
    permutation: Sequence[int], signs: Sequence[int]
) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    inverse = [0] * len(permutation)
    inverse_signs = [1] * len(permutation)
    for i, (j, s) in enumerate(zip(permutation, signs)):
        inverse[j] = i
        inverse_signs[j] = s
    return tuple(inverse), tuple(inverse_signs)


def _refine_pieces(
    level: int, permutation: Sequence[int], signs: Sequence[int], target: int
) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    r = target - level
    perm: List[int] = []
    sgn: List[int] = []
    for j in range(1 << target):
        parent, offset = divmod(j, 1 << r)
        perm.append(permutation[parent] * (1 << r) + offset)
        sgn.append(signs[parent])
    return tuple(perm), tuple(sgn)


def _standard_point(space: LpSpace, index: int) -> LpVector:
    total = LpVector.zero(space)
    for a, q in sorted(term_of(index).coefficients().items()):
        total = total + q * standard_generator(space, a)
    return total


def _matching_index(points: Sequence[LpVector], vector: LpVector, preferred: int) -> int:
    """Index of *vector* among *points*, trying *preferred* first."""
    order = [preferred] + [j for j in range(len(points)) if j != preferred]
    for j in order:
        if sub(points[j], vector).is_zero:
            return j
    raise ValueError(f"{vector.literal()} is not among the first {len(points)} points")


def dyadic_decomposition(start: Fraction, end: Fraction) -> List[Tuple[Fraction, Fraction]]:
    """Split ``[start, end)`` (dyadic endpoints) into maximal dyadic pieces."""
    pieces = []
    a = start
    while a < end:
        width = Fraction(1)
        while (a / width).denominator != 1 or a + width > end:
            width /= 2
        pieces.append((a, a + width))
        a += width
    return pieces


# ---------------------------------------------------------------------------
# Hidden isometries
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HiddenIsometry:
    """A signed atom permutation combined with a signed piece rearrangement.

    Parameters
    ----------
    space:
        The Lebesgue space acted on.
    atom_permutation, atom_signs:
        ``e_i -> atom_signs[i] * e_{atom_permutation[i]}`` for
        ``i < len(atom_permutation)``; other atoms are fixed.
    piece_level:
        Level ``L`` of the rearranged dyadic pieces.
    piece_permutation, piece_signs:
        Piece ``j`` of width ``2**-L`` goes to position
        ``piece_permutation[j]`` with sign ``piece_signs[j]``.

    Raises
    ------
    ValueError
        If a table is not a signed permutation or does not fit the space.
    """

    space: LpSpace
    atom_permutation: Tuple[int, ...] = ()
    atom_signs: Tuple[int, ...] = ()
    piece_level: int = 0
    piece_permutation: Tuple[int, ...] = (0,)
    piece_signs: Tuple[int, ...] = (1,)

    def __post_init__(self) -> None:
        _check_signed_permutation("atom", self.atom_permutation, self.atom_signs)
        _check_signed_permutation("piece", self.piece_permutation, self.piece_signs)
        if len(self.piece_permutation) != 1 << self.piece_level:
            raise ValueError(
                f"Level {self.piece_level} needs {1 << self.piece_level} pieces"
            )
        kind = self.space.kind
        if self.atom_permutation and not kind.has_atoms:
            raise ValueError(f"{self.space} has no atoms to permute")
        if kind.is_finite_dimensional_atomic and len(self.atom_permutation) > (
            self.space.dimension or 0
        ):
            raise ValueError(f"Atom table longer than the dimension of {self.space}")
        nontrivial_pieces = self.piece_level > 0 or self.piece_signs != (1,)
        if nontrivial_pieces and not kind.has_continuum:
            raise ValueError(f"{self.space} has no continuous part to rearrange")

    # ---- constructors ------------------------------------------------

    @classmethod
    def identity(cls, space: LpSpace) -> HiddenIsometry:
        return cls(space)

    @classmethod
    def random(
        cls,
        space: LpSpace,
        seed: int,
        level: int = 2,
        atoms: int = 4,
        signed: bool = True,
    ) -> HiddenIsometry:
        """Draw a hidden isometry from ``random.Random(seed)``.

        Parameters
        ----------
        level:
            Piece level for spaces with a continuous part.
        atoms:
            Size of the permuted atom block in ``lp`` and ``lp_sum``
            (finite-dimensional spaces permute all their atoms).
        signed:
            Draw random signs (otherwise all ``+1``).
        """
        rng = random.Random(seed)
        kind = space.kind
        atom_perm: List[int] = []
        atom_signs: List[int] = []
        if kind.has_atoms:
            count = (space.dimension or 0) if kind.is_finite_dimensional_atomic else atoms
            atom_perm = list(range(count))
            rng.shuffle(atom_perm)
            atom_signs = [rng.choice((1, -1)) if signed else 1 for _ in atom_perm]
        piece_level = level if kind.has_continuum else 0
        piece_perm = list(range(1 << piece_level))
        piece_signs = [1]
        if kind.has_continuum:
            rng.shuffle(piece_perm)
            piece_signs = [rng.choice((1, -1)) if signed else 1 for _ in piece_perm]
        return cls(
            space,
            tuple(atom_perm),
            tuple(atom_signs),
            piece_level,
            tuple(piece_perm),
            tuple(piece_signs),
        )

    # ---- algebra -----------------------------------------------------

    def inverse(self) -> HiddenIsometry:
        atoms = _invert(self.atom_permutation, self.atom_signs)
        pieces = _invert(self.piece_permutation, self.piece_signs)
        return HiddenIsometry(self.space, *atoms, self.piece_level, *pieces)

    def compose(self, other: HiddenIsometry) -> HiddenIsometry:
        """``self o other`` (apply *other* first)."""
        if other.space != self.space:
            raise ValueError(f"Cannot compose maps on {self.space} and {other.space}")
        size = max(len(self.atom_permutation), len(other.atom_permutation))
        first_p, first_s = self._padded_atoms(other, size)
        second_p, second_s = self._padded_atoms(self, size)
        atom_perm = tuple(second_p[first_p[i]] for i in range(size))
        atom_signs = tuple(first_s[i] * second_s[first_p[i]] for i in range(size))
        level = max(self.piece_level, other.piece_level)
        op, os_ = _refine_pieces(
            other.piece_level, other.piece_permutation, other.piece_signs, level
        )
        sp, ss = _refine_pieces(
            self.piece_level, self.piece_permutation, self.piece_signs, level
        )
        piece_perm = tuple(sp[op[j]] for j in range(1 << level))
        piece_signs = tuple(os_[j] * ss[op[j]] for j in range(1 << level))
        return HiddenIsometry(
            self.space, atom_perm, atom_signs, level, piece_perm, piece_signs
        )

    @staticmethod
    def _padded_atoms(
        iso: HiddenIsometry, size: int
    ) -> Tuple[List[int], List[int]]:
        perm = list(iso.atom_permutation) + list(
            range(len(iso.atom_permutation), size)
        )
        signs = list(iso.atom_signs) + [1] * (size - len(iso.atom_signs))
        return perm, signs

    # ---- action on vectors -------------------------------------------

    def apply(self, vector: LpVector) -> LpVector:
        """The image ``T(vector)``."""
        if vector.space != self.space:
            raise ValueError(f"Vector of {vector.space} given to map on {self.space}")
        table = len(self.atom_permutation)
        atoms = []
        for i, c in vector.atomic.entries:
            if i < table:
                atoms.append((self.atom_permutation[i], self.atom_signs[i] * c))
            else:
                atoms.append((i, c))
        return LpVector(
            self.space,
            atomic=SeqVector(tuple(atoms)),
            continuous=self._apply_pieces(vector.continuous),
        )

    def _apply_pieces(self, f: StepFunction) -> StepFunction:
        if f.is_zero:
            return f
        width = Fraction(1, 1 << self.piece_level)
        grid = {j * width for j in range((1 << self.piece_level) + 1)}
        points = sorted(set(f.breakpoints) | grid)
        moved = []
        for a, b in zip(points, points[1:]):
            j = int(a / width)
            offset = (self.piece_permutation[j] - j) * width
            moved.append((a + offset, b + offset, self.piece_signs[j] * f.value_at(a)))
        moved.sort()
        return StepFunction(
            (Fraction(0),) + tuple(end for _, end, _ in moved),
            tuple(value for _, _, value in moved),
        )

    # ---- standard-layout images ---------------------------------------

    def standard_coefficients(self, vector: LpVector) -> Dict[int, Fraction]:
        """Coefficients of ``T(vector)`` over the standard generators.

        Step parts are split into maximal dyadic pieces, one generator
        per piece.
        """
        image = self.apply(vector)
        out: Dict[int, Fraction] = {}
        for i, c in image.atomic.entries:
            out[atom_generator(self.space, i)] = c
        for a, b, value in image.continuous.pieces():
            if value == 0:
                continue
            for start, end in dyadic_decomposition(a, b):
                out[piece_generator(self.space, dyadic_piece_number(start, end))] = value
        return out

    def induced_index(self, index: int) -> int:
        """Index ``j`` with ``x_j = T(x_index)`` in the standard numbering."""
        return canonical_index(self.standard_coefficients(_standard_point(self.space, index)))

    def oracle_table(self, rows: int, cols: int) -> IsometryTable:
        """Table of ``T`` and ``T^-1`` between two standard presentations."""
        inverse = self.inverse()
        return IsometryTable.stationary(
            [self.induced_index(m) for m in range(rows)],
            [inverse.induced_index(m) for m in range(rows)],
            cols,
        )

    # ---- documents ---------------------------------------------------

    def to_document(self) -> Dict[str, Any]:
        doc = space_document(self.space)
        doc["format"] = FORMAT_TAG
        del doc["signature"]
        doc["atoms"] = {
            "permutation": list(self.atom_permutation),
            "signs": list(self.atom_signs),
        }
        doc["pieces"] = {
            "level": self.piece_level,
            "permutation": list(self.piece_permutation),
            "signs": list(self.piece_signs),
        }
        return doc

    @classmethod
    def from_document(
        cls, doc: Mapping[str, Any], source: str = "<document>"
    ) -> HiddenIsometry:
        """Rebuild from :meth:`to_document` output.

        Raises
        ------
        MalformedInputError
            On a wrong format tag or inconsistent tables.
        """
        if doc.get("format") != FORMAT_TAG:
            raise MalformedInputError(
                f"expected format {FORMAT_TAG!r}, got {doc.get('format')!r}", source
            )
        try:
            space = LpSpace(
                SpaceKind(doc["structure"]),
                Exponent(str(doc["p"])),
                doc.get("dimension"),
            )
            atoms = doc.get("atoms") or {}
            pieces = doc.get("pieces") or {}
            return cls(
                space,
                tuple(int(v) for v in atoms.get("permutation", ())),
                tuple(int(v) for v in atoms.get("signs", ())),
                int(pieces.get("level", 0)),
                tuple(int(v) for v in pieces.get("permutation", (0,))),
                tuple(int(v) for v in pieces.get("signs", (1,))),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInputError(f"bad scramble: {exc}", source) from None


# ---------------------------------------------------------------------------
# Scrambled presentations
# ---------------------------------------------------------------------------

class ScrambledPresentation(BanachPresentation):
    """Presentation whose generators are ``T(x_a)`` for a hidden ``T``."""

    def __init__(self, hidden: HiddenIsometry) -> None:
        super().__init__(hidden.space)
        self.hidden = hidden

    @property
    def generator_count(self) -> Optional[int]:
        if self.space.kind is SpaceKind.LP_N:
            return self.space.dimension
        return None

    def generator(self, a: int) -> LpVector:
        return self.hidden.apply(standard_generator(self.space, a))

    def certify_generators(self, count: int, k: int) -> bool:
        """Check that the first *count* generators keep their standard
        norms (enclosures overlap)."""
        for a in range(count):
            mine = norm(self.generator(a), k)
            standard = norm(standard_generator(self.space, a), k)
            if not mine.overlaps(standard):
                logger.debug("Generator %d norm %s vs %s", a, mine, standard)
                return False
        return True

    def oracle_table(self, rows: int, cols: int) -> IsometryTable:
        """The table of ``T`` from the standard presentation onto this one.

        ``f(m)`` is an index here whose point is ``T`` of standard point
        ``m`` and ``g(m)`` a standard index whose image is point ``m`` here,
        ``m`` itself whenever it qualifies.

        Raises
        ------
        ValueError
            If a point has no match among the first *rows* indices.
        """
        inverse = self.hidden.inverse()
        standard = [_standard_point(self.space, j) for j in range(rows)]
        mine = [self.point(j) for j in range(rows)]
        forward = [
            _matching_index(mine, self.hidden.apply(v), m) for m, v in enumerate(standard)
        ]
        backward = [
            _matching_index(standard, inverse.apply(v), m) for m, v in enumerate(mine)
        ]
        return IsometryTable.stationary(forward, backward, cols)

    def describe(self) -> str:
        return f"scrambled {self.space}"

    def to_document(self) -> Dict[str, object]:
        doc = space_document(self.space, generators="scrambled")
        scramble = self.hidden.to_document()
        doc["scramble"] = {
            key: scramble[key] for key in ("atoms", "pieces")
        }
        return doc
