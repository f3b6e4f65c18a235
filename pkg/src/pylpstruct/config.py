"""Run configuration shared by every command.

A :class:`RunConfig` can be read from a YAML run file (keys in camelCase,
see :data:`RUN_KEYS`); command-line flags override the file::

    format: pylpstruct-run/1
    precision: 12
    depth: 6
    budget: 50000
    probes: 16
    strictChildren: false
    seed: 7
    workers: 4
    inputs: [target.yaml]
    output: report.txt
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from pylpstruct.errors import MalformedInputError
from pylpstruct.persistence import read_document, write_document

logger = logging.getLogger(__name__)

FORMAT_TAG = "pylpstruct-run/1"

# Dataclass field -> YAML key.
RUN_KEYS: Dict[str, str] = {
    "precision": "precision",
    "depth": "depth",
    "budget": "budget",
    "probes": "probes",
    "strict_children": "strictChildren",
    "seed": "seed",
    "workers": "workers",
    "inputs": "inputs",
    "output": "output",
}


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one run.

    Parameters
    ----------
    precision:
        ``k``; every enclosure is computed to width ``2**-k``.
    depth:
        Depth budget ``D`` of trees and searches.
    budget:
        Maximum number of candidate extensions a table search explores.
    probes:
        Number of probe vectors for linear density, and rational points
        checked by ``verify``.
    strict_children:
        Also record the strict child condition in chain partitions.
    seed:
        Seed for scramble generation.
    workers:
        Thread count for pair checks in ``verify``.
    inputs:
        Input file paths.
    output:
        Report file, or ``None`` for stdout.

    Raises
    ------
    ValueError
        If a numeric field is out of range.
    """

    precision: int = 10
    depth: int = 6
    budget: int = 100_000
    probes: int = 16
    strict_children: bool = False
    seed: int = 0
    workers: int = 1
    inputs: Tuple[str, ...] = ()
    output: Optional[str] = None

    def __post_init__(self) -> None:
        for name in ("precision", "depth", "probes", "seed"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ValueError(f"{name} must be an integer >= 0, got {value!r}")
        for name in ("budget", "workers"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {value!r}")
        object.__setattr__(self, "inputs", tuple(str(p) for p in self.inputs))

    def replace(self, **overrides: Any) -> RunConfig:
        """Copy with the non-``None`` *overrides* applied."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        return dataclasses.replace(self, **changes)

    # ---- documents ---------------------------------------------------

    def to_document(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {"format": FORMAT_TAG}
        for name, key in RUN_KEYS.items():
            value = getattr(self, name)
            doc[key] = list(value) if name == "inputs" else value
        return doc

    @classmethod
    def from_document(
        cls, doc: Mapping[str, Any], source: str = "<run>"
    ) -> RunConfig:
        """Build from a run document; missing keys keep their defaults.

        Raises
        ------
        MalformedInputError
            On a wrong format tag or an unknown key.
        ValueError
            If a value is out of range.
        """
        if doc.get("format", FORMAT_TAG) != FORMAT_TAG:
            raise MalformedInputError(
                f"expected format {FORMAT_TAG!r}, got {doc.get('format')!r}", source
            )
        fields = {key: name for name, key in RUN_KEYS.items()}
        values: Dict[str, Any] = {}
        for key, value in doc.items():
            if key == "format":
                continue
            if key not in fields:
                raise MalformedInputError(f"unknown run key {key!r}", source)
            values[fields[key]] = value
        if "inputs" in values:
            if not isinstance(values["inputs"], list):
                raise MalformedInputError("inputs must be a list", source)
            values["inputs"] = tuple(values["inputs"])
        return cls(**values)


def load_run_config(path: Union[str, Path]) -> RunConfig:
    config = RunConfig.from_document(read_document(path), str(path))
    logger.debug("Loaded run config from %s: %s", path, config)
    return config


def save_run_config(config: RunConfig, path: Union[str, Path]) -> None:
    write_document(config.to_document(), path)
