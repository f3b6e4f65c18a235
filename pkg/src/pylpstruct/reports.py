"""Plain-text reports written by the command-line tool.

A report is UTF-8 text that starts with a versioned header line::

    # pylpstruct-report v1 <command>

followed by ``key: value`` lines, ``[section]`` headers and verbatim
blocks (tree dumps, table lines).  Rendering is deterministic: dict
contents are emitted in sorted or insertion order, never by hash order.
"""

from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Iterable, List, Mapping, Optional, Sequence, TextIO, Tuple, Union

from pylpstruct.disintegration import (
    Address,
    ChainLimit,
    ChainPartition,
    DisintegrationReport,
    VectorTree,
    format_address,
)
from pylpstruct.enums import StageVerdict
from pylpstruct.isometry_codes import CONDITIONS, ConditionVerdict, SearchResult
from pylpstruct.synthesis import SynthesizedIsometry, VerificationReport

logger = logging.getLogger(__name__)

REPORT_VERSION = "v1"


class Report:
    """Line buffer for one command's report."""

    def __init__(self, command: str) -> None:
        self.command = command
        self._lines: List[str] = [f"# pylpstruct-report {REPORT_VERSION} {command}"]

    def field(self, key: str, value: object) -> None:
        self._lines.append(f"{key}: {value}")

    def section(self, title: str) -> None:
        self._lines.append(f"[{title}]")

    def extend(self, lines: Iterable[str]) -> None:
        self._lines.extend(lines)

    @property
    def lines(self) -> List[str]:
        return list(self._lines)

    def text(self) -> str:
        return "\n".join(self._lines) + "\n"

    def emit(self, output: Union[str, Path, None], stream: Optional[TextIO] = None) -> None:
        """Write to *output*, or to *stream* (default stdout) when ``None``."""
        if output is None:
            (stream or sys.stdout).write(self.text())
            return
        path = Path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.text(), encoding="utf-8")
        logger.info("Wrote %s report to %s", self.command, path)


# ---------------------------------------------------------------------------
# Renderers
# ---------------------------------------------------------------------------

def add_disintegration(report: Report, tree: VectorTree, result: DisintegrationReport) -> None:
    report.section("disintegration")
    report.field("space", tree.space)
    report.field("depth", result.depth)
    report.field("nodes", len(tree))
    report.field("nonvanishing", result.nonvanishing)
    report.field("separating", result.separating)
    report.field("summative", result.summative)
    report.field("linearly_dense", result.linearly_dense.value)
    report.field("tolerance", f"2^-{result.tolerance_bits}")
    report.field("probes_checked", result.probes_checked)
    report.field("probes_skipped", result.probes_skipped)
    for failure in result.failures:
        report.field("failure", failure)


def add_partition(report: Report, tree: VectorTree, partition: ChainPartition) -> None:
    report.section("chains")
    report.field("count", len(partition))
    report.field("all_certified", partition.all_certified)
    for chain_id, chain in enumerate(partition.chains):
        report.field(f"chain {chain_id}", " ".join(format_address(a) for a in chain))
    uncertified = [a for a, ok in sorted(partition.certified.items()) if not ok]
    for address in uncertified:
        report.field("uncertified_child", format_address(address))
    if partition.strict:
        failing = [a for a, ok in sorted(partition.strict_certified.items()) if not ok]
        report.field("strict_failures", len(failing))
        for address in failing:
            report.field("strict_failure", format_address(address))
    report.section("tree")
    report.extend(tree.dump_lines(partition.assignment))


def add_limits(report: Report, limits: Sequence[ChainLimit]) -> None:
    report.section("limits")
    for limit in limits:
        report.field(
            f"chain {limit.chain_id}",
            f"{limit.verdict.value} witness={limit.witness} "
            f"upper={limit.norm_upper_bounds[-1]}",
        )


def add_synthesis(report: Report, iso: SynthesizedIsometry, count: int) -> None:
    report.section("synthesis")
    report.field("target", iso.target.describe())
    report.field("depth", iso.depth)
    report.field("precision", iso.k)
    for image in iso.atom_images:
        report.field(
            f"atom {image.index}",
            f"chain={image.chain_id} witness={image.witness} norm={image.norm} "
            f"term={image.term}",
        )
    for piece in sorted(iso.continuous_map):
        report.field(f"piece {piece}", iso.continuous_map[piece])
    report.section("table")
    report.extend(iso.index_table(count).to_lines())


def add_verification(report: Report, result: VerificationReport) -> None:
    report.section("verification")
    report.field("points", result.count)
    report.field("precision", result.k)
    report.field("tolerance", result.tolerance)
    report.field("checks", len(result.checks))
    report.field("verdict", result.verdict.value)
    for check in result.checks:
        report.field(
            f"{check.clause} {check.i} {check.j}",
            f"{check.verdict.value} discrepancy={check.discrepancy}",
        )


def add_conditions(report: Report, verdict: ConditionVerdict) -> None:
    report.section("conditions")
    report.field("depth", verdict.depth)
    report.field("precision", verdict.k)
    for number in CONDITIONS:
        outcome = verdict.outcomes[number]
        text = (
            f"{outcome.certainty.value} instances={outcome.instances} "
            f"inconclusive={outcome.inconclusive} skipped={outcome.skipped}"
        )
        if outcome.witness is not None:
            text += (
                f" witness={outcome.witness} enclosure={outcome.enclosure} "
                f"threshold={outcome.threshold}"
            )
        report.field(f"condition {number}", text)
    report.field("overall", verdict.overall.value)


def add_search(report: Report, result: SearchResult) -> None:
    report.section("search")
    report.field("depth", result.depth)
    report.field("explored", result.explored)
    report.field("exhausted", result.exhausted)
    report.field("survivors", len(result.survivors))
    for number in sorted(result.prunes):
        report.field(f"pruned by {number}", result.prunes[number])
    for i, table in enumerate(result.survivors):
        f_values = " ".join(str(row[0]) for row in table.f)
        g_values = " ".join(str(row[0]) for row in table.g)
        report.field(f"survivor {i}", f"f=[{f_values}] g=[{g_values}]")


def add_stage_sets(
    report: Report,
    a1: Mapping[Tuple[int, int], StageVerdict],
    a2: Mapping[Tuple[Address, int, int], StageVerdict],
    stage: int,
) -> None:
    report.section("stage-sets")
    report.field("stage", stage)
    for (n, k), verdict in sorted(a1.items()):
        report.field(f"A1 {n} {k}", verdict.value)
    for (address, m, k), verdict in a2.items():
        report.field(f"A2 {format_address(address)} {m} {k}", verdict.value)
