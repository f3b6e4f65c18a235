"""The ``pylpstruct`` command.

Every subcommand writes a report (see :mod:`pylpstruct.reports`) to
stdout or ``--output`` and exits with a :class:`~pylpstruct.enums.ExitCode`:
``0`` certified success, ``1`` certified violation, ``2`` inconclusive,
``64`` usage error, ``65`` malformed input file.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, NoReturn, Optional, Sequence, Tuple

from pylpstruct import __version__
from pylpstruct.config import RunConfig, load_run_config
from pylpstruct.disintegration import (
    ChainPartition,
    DisintegrationReport,
    VectorTree,
    chain_limits,
    default_probes,
    disintegrate,
    partition_chains,
    validate_disintegration,
)
from pylpstruct.enums import AtomVerdict, Certainty, ExitCode, SpaceKind
from pylpstruct.errors import (
    AtomCountMismatch,
    BudgetExhausted,
    GridTooSmall,
    LoopDetected,
    MalformedInputError,
    NotIsomorphism,
    PrecisionExhausted,
    UnknownChainLimit,
    UnsupportedSpace,
    ValidationMissing,
)
from pylpstruct.graph_bridge import (
    Graph,
    all_isometries,
    all_isomorphisms,
    encode,
    isometry_to_isomorphism,
    isomorphism_to_isometry,
)
from pylpstruct.isometry_codes import (
    IsometryTable,
    TermMaps,
    check_conditions,
    search_tables,
)
from pylpstruct.lebesgue import LpSpace, norm
from pylpstruct.literals import parse_rational
from pylpstruct.persistence import load_presentation, save_presentation
from pylpstruct.presentation import (
    BanachPresentation,
    FiniteMetricPresentation,
    PerturbedPresentation,
    Presentation,
    StandardPresentation,
)
from pylpstruct.reports import (
    Report,
    add_conditions,
    add_disintegration,
    add_limits,
    add_partition,
    add_search,
    add_stage_sets,
    add_synthesis,
    add_verification,
)
from pylpstruct.scramble import HiddenIsometry, ScrambledPresentation
from pylpstruct.synthesis import StageSetEvaluator, synthesize_isometry, verify_isometry

logger = logging.getLogger(__name__)

_CERTAINTY_EXIT = {
    Certainty.HOLDS: ExitCode.OK,
    Certainty.VIOLATED: ExitCode.VIOLATION,
    Certainty.INCONCLUSIVE: ExitCode.INCONCLUSIVE,
}


class UsageError(Exception):
    """Bad command line (exit 64)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------

def _inputs(config: RunConfig, names: Sequence[str]) -> List[str]:
    if len(config.inputs) != len(names):
        raise UsageError(
            f"expected {len(names)} input file(s) ({', '.join(names)}), "
            f"got {len(config.inputs)}"
        )
    return list(config.inputs)


def _read_lines(path: str) -> List[str]:
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None


def _presentation(path: str) -> Presentation:
    try:
        return load_presentation(path)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None


def _banach(path: str) -> BanachPresentation:
    presentation = _presentation(path)
    if not isinstance(presentation, BanachPresentation):
        raise MalformedInputError("expected a Banach space presentation", path)
    if presentation.space.p.value == 2:
        logger.warning(
            "p = 2 in %s: isometries of Hilbert spaces need not preserve the lattice structure",
            path,
        )
    return presentation


def _validated(
    config: RunConfig, path: str
) -> Tuple[BanachPresentation, VectorTree, DisintegrationReport]:
    target = _banach(path)
    tree = disintegrate(target, config.depth)
    result = validate_disintegration(
        tree, config.precision, config.precision, default_probes(target.space, config.probes)
    )
    return target, tree, result


def _partitioned(
    config: RunConfig, path: str, report: Report
) -> Tuple[VectorTree, ChainPartition]:
    _, tree, result = _validated(config, path)
    add_disintegration(report, tree, result)
    partition = partition_chains(tree, result, strict=config.strict_children)
    add_partition(report, tree, partition)
    return tree, partition


def _rational_arg(text: str, option: str) -> Any:
    try:
        return parse_rational(text, option)
    except MalformedInputError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_present(args: argparse.Namespace, config: RunConfig, report: Report) -> ExitCode:
    presentation: Presentation
    if config.inputs:
        presentation = _presentation(config.inputs[0])
    else:
        if args.space is None:
            raise UsageError("present needs an input file or --space")
        try:
            space = LpSpace.of(args.space, _rational_arg(args.p, "--p"), args.dimension)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if args.scramble:
            hidden = HiddenIsometry.random(space, config.seed, level=args.level)
            presentation = ScrambledPresentation(hidden)
        else:
            presentation = StandardPresentation(space)
        if args.perturb is not None:
            presentation = PerturbedPresentation(
                presentation, _rational_arg(args.perturb, "--perturb")
            )
    report.section("presentation")
    report.field("description", presentation.describe())
    report.field("signature", presentation.signature.name)
    report.field("generators", presentation.generator_count)
    report.section("points")
    if isinstance(presentation, FiniteMetricPresentation):
        for i, row in enumerate(presentation.distances):
            report.field(f"d {i}", " ".join(str(d) for d in row))
    else:
        assert isinstance(presentation, BanachPresentation)
        for i in range(config.probes):
            vector = presentation.point(i)
            report.field(
                f"x {i}",
                f"{presentation.term(i)} = {vector} norm={norm(vector, config.precision)}",
            )
    if args.save is not None:
        save_presentation(presentation, args.save)
        report.field("saved", args.save)
    return ExitCode.OK


def cmd_disintegrate(args: argparse.Namespace, config: RunConfig, report: Report) -> ExitCode:
    (path,) = _inputs(config, ["target"])
    _, tree, result = _validated(config, path)
    add_disintegration(report, tree, result)
    report.section("tree")
    report.extend(tree.dump_lines())
    exact_ok = result.nonvanishing and result.separating and result.summative
    if not exact_ok or result.linearly_dense is Certainty.VIOLATED:
        return ExitCode.VIOLATION
    return _CERTAINTY_EXIT[result.linearly_dense]


def cmd_partition(args: argparse.Namespace, config: RunConfig, report: Report) -> ExitCode:
    (path,) = _inputs(config, ["target"])
    _, partition = _partitioned(config, path, report)
    strict_ok = all(partition.strict_certified.values())
    if partition.all_certified and strict_ok:
        return ExitCode.OK
    return ExitCode.INCONCLUSIVE


def cmd_limits(args: argparse.Namespace, config: RunConfig, report: Report) -> ExitCode:
    (path,) = _inputs(config, ["target"])
    tree, partition = _partitioned(config, path, report)
    limits = chain_limits(tree, partition, config.precision)
    add_limits(report, limits)
    if any(limit.verdict is AtomVerdict.UNKNOWN for limit in limits):
        return ExitCode.INCONCLUSIVE
    return ExitCode.OK


def cmd_synthesize(args: argparse.Namespace, config: RunConfig, report: Report) -> ExitCode:
    (path,) = _inputs(config, ["target"])
    target = _banach(path)
    iso = synthesize_isometry(target, config.depth, config.precision)
    add_synthesis(report, iso, config.probes)
    if args.save is not None:
        lines = iso.index_table(config.probes).to_lines()
        Path(args.save).write_text("\n".join(lines) + "\n", encoding="utf-8")
        report.field("saved", args.save)
    return ExitCode.OK


def cmd_verify(args: argparse.Namespace, config: RunConfig, report: Report) -> ExitCode:
    source_path, target_path, table_path = _inputs(config, ["source", "target", "table"])
    source = _presentation(source_path)
    target = _presentation(target_path)
    table = IsometryTable.from_lines(_read_lines(table_path), table_path)
    count = min(config.probes, table.rows)
    result = verify_isometry(
        table, source, target, count, config.precision, workers=config.workers
    )
    add_verification(report, result)
    return _CERTAINTY_EXIT[result.verdict]


def cmd_stage_sets(args: argparse.Namespace, config: RunConfig, report: Report) -> ExitCode:
    (path,) = _inputs(config, ["target"])
    tree, partition = _partitioned(config, path, report)
    limits = chain_limits(tree, partition, config.precision)
    add_limits(report, limits)
    evaluator = StageSetEvaluator(tree, partition, limits, config.depth)
    add_stage_sets(
        report,
        evaluator.a1_table(args.k_max),
        evaluator.a2_table(args.m_max, args.k_max),
        config.depth,
    )
    return ExitCode.OK


def cmd_r_check(args: argparse.Namespace, config: RunConfig, report: Report) -> ExitCode:
    source_path, target_path, table_path = _inputs(config, ["source", "target", "table"])
    source = _presentation(source_path)
    target = _presentation(target_path)
    table = IsometryTable.from_lines(_read_lines(table_path), table_path)
    verdict = check_conditions(
        table, source, target, TermMaps(source, target), config.depth, config.precision
    )
    add_conditions(report, verdict)
    return _CERTAINTY_EXIT[verdict.overall]


def cmd_r_search(args: argparse.Namespace, config: RunConfig, report: Report) -> ExitCode:
    source_path, target_path = _inputs(config, ["source", "target"])
    source = _presentation(source_path)
    target = _presentation(target_path)
    try:
        result = search_tables(
            source,
            target,
            TermMaps(source, target),
            config.depth,
            config.precision,
            config.budget,
        )
    except BudgetExhausted as exc:
        logger.warning("Search budget of %d exhausted", config.budget)
        add_search(report, exc.partial)
        return ExitCode.INCONCLUSIVE
    add_search(report, result)
    if args.save is not None and result.survivors:
        lines = result.survivors[0].to_lines()
        Path(args.save).write_text("\n".join(lines) + "\n", encoding="utf-8")
        report.field("saved", args.save)
    return ExitCode.OK if result.survivors else ExitCode.VIOLATION


def cmd_encode_graph(args: argparse.Namespace, config: RunConfig, report: Report) -> ExitCode:
    (path,) = _inputs(config, ["graph"])
    graph = Graph.from_lines(_read_lines(path), path)
    space = encode(graph)
    report.section("graph")
    report.field("vertices", graph.vertex_count)
    report.field("edges", len(graph.edges))
    report.section("distances")
    for u in range(space.point_count):
        report.field(
            f"d {u}", " ".join(str(space.distance(u, v)) for v in range(space.point_count))
        )
    if args.save is not None:
        save_presentation(space.presentation, args.save)
        report.field("saved", args.save)
    return ExitCode.OK


def _vertex_map(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"--map must be comma-separated vertices, got {text!r}") from None


def cmd_transfer_iso(args: argparse.Namespace, config: RunConfig, report: Report) -> ExitCode:
    first, second = _inputs(config, ["graph0", "graph1"])
    g0 = Graph.from_lines(_read_lines(first), first)
    g1 = Graph.from_lines(_read_lines(second), second)
    report.section("transfer")
    if args.map is None:
        isomorphisms = all_isomorphisms(g0, g1)
        isometries = all_isometries(encode(g0), encode(g1))
        report.field("isomorphisms", len(isomorphisms))
        report.field("isometries", len(isometries))
        for mapping in isomorphisms:
            report.field("map", ",".join(str(v) for v in mapping))
        return ExitCode.OK if isomorphisms == isometries else ExitCode.VIOLATION
    mapping = _vertex_map(args.map)
    report.field("direction", args.direction)
    report.field("map", args.map)
    if args.direction == "isometry":
        result = isometry_to_isomorphism(mapping, g0, g1)
        report.field("isomorphism", result.ok)
        if not result.ok:
            report.field("witness", result.witness)
            report.field("reason", result.reason)
            return ExitCode.VIOLATION
        return ExitCode.OK
    try:
        isomorphism_to_isometry(mapping, g0, g1)
    except NotIsomorphism as exc:
        report.field("isometry", False)
        report.field("witness", exc.witness)
        report.field("reason", str(exc))
        return ExitCode.VIOLATION
    report.field("isometry", True)
    return ExitCode.OK


COMMANDS: Dict[str, Callable[[argparse.Namespace, RunConfig, Report], ExitCode]] = {
    "present": cmd_present,
    "disintegrate": cmd_disintegrate,
    "partition": cmd_partition,
    "limits": cmd_limits,
    "synthesize": cmd_synthesize,
    "verify": cmd_verify,
    "stage-sets": cmd_stage_sets,
    "r-check": cmd_r_check,
    "r-search": cmd_r_search,
    "encode-graph": cmd_encode_graph,
    "transfer-iso": cmd_transfer_iso,
}


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--precision", type=int, help="bits k of every enclosure")
    common.add_argument("--depth", type=int, help="depth budget D")
    common.add_argument("--budget", type=int, help="search budget")
    common.add_argument("--probes", type=int, help="probe / point count")
    common.add_argument("--seed", type=int, help="scramble seed")
    common.add_argument("--workers", type=int, help="threads for pair checks")
    common.add_argument(
        "--strict-children",
        "--strict-6-2",
        dest="strict_children",
        action="store_true",
        default=None,
        help="also record the strict child condition",
    )
    common.add_argument("--config", help="YAML run file")
    common.add_argument("--output", help="report file (default: stdout)")
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging")

    parser = _Parser(
        prog="pylpstruct",
        description="Exact presentations of Lebesgue spaces, disintegrations "
        "and isometry codes.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    present = sub.add_parser("present", parents=[common], help="build or inspect a presentation")
    present.add_argument("inputs", nargs="*")
    present.add_argument("--space", choices=[k.value for k in SpaceKind if k is not SpaceKind.FINITE_METRIC])
    present.add_argument("--p", default="1", help="exponent, e.g. 3/2")
    present.add_argument("--dimension", type=int)
    present.add_argument("--scramble", action="store_true", help="scramble with --seed")
    present.add_argument("--level", type=int, default=2, help="piece level of the scramble")
    present.add_argument("--perturb", help="perturbation shift")
    present.add_argument("--save", help="write the presentation document")

    for name, help_text in (
        ("disintegrate", "build and validate the disintegration"),
        ("partition", "partition the tree into chains"),
        ("limits", "certify chain limits"),
    ):
        command = sub.add_parser(name, parents=[common], help=help_text)
        command.add_argument("inputs", nargs="*")

    synthesize = sub.add_parser("synthesize", parents=[common], help="synthesize an isometry")
    synthesize.add_argument("inputs", nargs="*")
    synthesize.add_argument("--save", help="write the index table")

    for name, help_text in (
        ("verify", "verify a table on the first rational points"),
        ("r-check", "check the six table conditions"),
    ):
        command = sub.add_parser(name, parents=[common], help=help_text)
        command.add_argument("inputs", nargs="*")

    stage = sub.add_parser("stage-sets", parents=[common], help="A1 / A2 stage verdicts")
    stage.add_argument("inputs", nargs="*")
    stage.add_argument("--k-max", type=int, default=4)
    stage.add_argument("--m-max", type=int, default=2)

    search = sub.add_parser("r-search", parents=[common], help="search isometry tables")
    search.add_argument("inputs", nargs="*")
    search.add_argument("--save", help="write the first survivor table")

    graph = sub.add_parser("encode-graph", parents=[common], help="graph to metric space")
    graph.add_argument("inputs", nargs="*")
    graph.add_argument("--save", help="write the metric presentation document")

    transfer = sub.add_parser("transfer-iso", parents=[common], help="isomorphisms vs isometries")
    transfer.add_argument("inputs", nargs="*")
    transfer.add_argument("--map", help="comma-separated vertex images")
    transfer.add_argument(
        "--direction", choices=("isomorphism", "isometry"), default="isomorphism"
    )
    return parser


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def make_config(args: argparse.Namespace) -> RunConfig:
    """Run file values (``--config``) overridden by explicit flags."""
    base = load_run_config(args.config) if args.config else RunConfig()
    return base.replace(
        precision=args.precision,
        depth=args.depth,
        budget=args.budget,
        probes=args.probes,
        seed=args.seed,
        workers=args.workers,
        strict_children=args.strict_children,
        inputs=tuple(args.inputs) if args.inputs else None,
        output=args.output,
    )


def run(args: argparse.Namespace) -> ExitCode:
    """Execute a parsed command line and write its report."""
    try:
        config = make_config(args)
        report = Report(args.command)
        code = COMMANDS[args.command](args, config, report)
    except (MalformedInputError, LoopDetected) as exc:
        logger.error("%s", exc)
        return ExitCode.DATA_ERROR
    except (UsageError, UnsupportedSpace, FileNotFoundError) as exc:
        logger.error("%s", exc)
        return ExitCode.USAGE
    except (AtomCountMismatch, ValidationMissing) as exc:
        logger.error("%s", exc)
        return ExitCode.VIOLATION
    except (PrecisionExhausted, UnknownChainLimit, GridTooSmall) as exc:
        logger.error("%s", exc)
        return ExitCode.INCONCLUSIVE
    except ValueError as exc:
        logger.error("%s", exc)
        return ExitCode.USAGE
    report.field("exit", int(code))
    report.emit(config.output)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _configure_logging(False)
        logger.error("%s", exc)
        parser.print_usage(sys.stderr)
        return int(ExitCode.USAGE)
    _configure_logging(args.verbose)
    return int(run(args))


if __name__ == "__main__":
    raise SystemExit(main())
