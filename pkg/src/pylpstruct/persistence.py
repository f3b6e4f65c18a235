"""YAML documents for presentations, scrambles and run configurations.

Every document is a YAML mapping with a versioned ``format`` key.
:func:`write_document` writes ``<file>.tmp`` next to the target and
``os.replace``-s it into place, so a reader never sees a half-written
file.  :func:`read_document` only reads: a file that is not a YAML
mapping is a :class:`~pylpstruct.errors.MalformedInputError`.

Presentation documents::

    format: pylpstruct-presentation/1
    signature: banach
    structure: lpn_sum
    p: '3/2'
    dimension: 2
    generators: standard          # or scrambled (needs a scramble block)
    perturbation: '1/2'           # optional

    format: pylpstruct-presentation/1
    signature: metric
    structure: finite_metric
    points: 3
    distances: [['0', '1', '2'], ['1', '0', '1'], ['2', '1', '0']]
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any, Dict, Mapping, Union

import yaml

from pylpstruct.enums import SpaceKind
from pylpstruct.errors import MalformedInputError
from pylpstruct.exact import Exponent
from pylpstruct.lebesgue import LpSpace
from pylpstruct.literals import parse_rational
from pylpstruct.presentation import (
    FORMAT_TAG,
    FiniteMetricPresentation,
    PerturbedPresentation,
    Presentation,
    StandardPresentation,
)
from pylpstruct.scramble import FORMAT_TAG as SCRAMBLE_FORMAT_TAG
from pylpstruct.scramble import HiddenIsometry, ScrambledPresentation

logger = logging.getLogger(__name__)

Document = Dict[str, Any]

# Suffix for the temporary file used during atomic writes.
_TMP_SUFFIX = ".tmp"


# ---------------------------------------------------------------------------
# Reading and writing documents
# ---------------------------------------------------------------------------

def write_document(document: Document, path: Union[str, Path]) -> None:
    """Write *document* atomically, creating parent directories.

    Raises
    ------
    OSError
        If the file cannot be written.
    """
    target = Path(path)
    tmp = target.with_suffix(target.suffix + _TMP_SUFFIX)
    target.parent.mkdir(parents=True, exist_ok=True)
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            yaml.dump(
                document, fh, default_flow_style=False, allow_unicode=True, sort_keys=False
            )
        os.replace(tmp, target)
    except OSError:
        logger.error("Failed to write %s", target)
        tmp.unlink(missing_ok=True)
        raise
    logger.info("Saved document to %s", target)


def read_document(path: Union[str, Path]) -> Document:
    """Parse the YAML mapping stored at *path*.

    Raises
    ------
    FileNotFoundError
        If the file does not exist.
    MalformedInputError
        If the file is not valid YAML or its top level is not a mapping.
    """
    source = Path(path)
    if not source.is_file():
        raise FileNotFoundError(f"No such document: {path}")
    with open(source, "r", encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            line = mark.line + 1 if mark is not None else None
            raise MalformedInputError(f"invalid YAML: {exc}", str(path), line) from None
    if not isinstance(data, dict):
        raise MalformedInputError(
            f"expected a mapping at top level, got {type(data).__name__}", str(path)
        )
    logger.debug("Read document %s", source)
    return data


def _space_of(doc: Mapping[str, Any], source: str) -> LpSpace:
    try:
        return LpSpace(
            SpaceKind(doc["structure"]),
            Exponent(parse_rational(str(doc["p"]), source)),
            doc.get("dimension"),
        )
    except KeyError as exc:
        raise MalformedInputError(f"missing key {exc}", source) from None
    except ValueError as exc:
        if isinstance(exc, MalformedInputError):
            raise
        raise MalformedInputError(f"bad space: {exc}", source) from None


def presentation_from_document(
    doc: Mapping[str, Any], source: str = "<document>"
) -> Presentation:
    """Build a presentation from its document.

    Raises
    ------
    MalformedInputError
        On a wrong format tag, an unknown structure or bad values.
    """
    if doc.get("format") != FORMAT_TAG:
        raise MalformedInputError(
            f"expected format {FORMAT_TAG!r}, got {doc.get('format')!r}", source
        )
    if doc.get("structure") == SpaceKind.FINITE_METRIC.value:
        rows = doc.get("distances")
        if not isinstance(rows, list):
            raise MalformedInputError("finite metric needs a distances list", source)
        try:
            table = [[parse_rational(str(d), source) for d in row] for row in rows]
            return FiniteMetricPresentation(table)
        except TypeError as exc:
            raise MalformedInputError(f"bad distances: {exc}", source) from None
        except ValueError as exc:
            if isinstance(exc, MalformedInputError):
                raise
            raise MalformedInputError(str(exc), source) from None

    space = _space_of(doc, source)
    generators = doc.get("generators", "standard")
    presentation: Any
    if generators == "standard":
        presentation = StandardPresentation(space)
    elif generators == "scrambled":
        block = doc.get("scramble")
        if not isinstance(block, dict):
            raise MalformedInputError("scrambled generators need a scramble block", source)
        scramble = dict(block)
        scramble.update(
            format=SCRAMBLE_FORMAT_TAG,
            structure=space.kind.value,
            p=str(space.p),
            dimension=space.dimension,
        )
        presentation = ScrambledPresentation(HiddenIsometry.from_document(scramble, source))
    else:
        raise MalformedInputError(f"unknown generators {generators!r}", source)

    shift = doc.get("perturbation")
    if shift is not None:
        try:
            presentation = PerturbedPresentation(
                presentation, parse_rational(str(shift), source)
            )
        except ValueError as exc:
            if isinstance(exc, MalformedInputError):
                raise
            raise MalformedInputError(str(exc), source) from None
    logger.debug("Loaded %s from %s", presentation.describe(), source)
    return presentation


def load_presentation(path: Union[str, Path]) -> Presentation:
    return presentation_from_document(read_document(path), str(path))


def save_presentation(presentation: Any, path: Union[str, Path]) -> None:
    write_document(presentation.to_document(), path)


def load_scramble(path: Union[str, Path]) -> HiddenIsometry:
    return HiddenIsometry.from_document(read_document(path), str(path))


def save_scramble(hidden: HiddenIsometry, path: Union[str, Path]) -> None:
    write_document(hidden.to_document(), path)
