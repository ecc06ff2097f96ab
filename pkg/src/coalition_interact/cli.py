"""``coalition-interact`` command line.

Exit codes: 0 success, 1 internal error, 2 invalid input, 3 size cap
exceeded, 4 an axiom check disagreed with its expected verdict.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import config
from .axioms import (
    AXIOMS,
    INDEX_KINDS as GRAPH_INDEX_KINDS,
    TARGETS,
    GraphIndexFunction,
    check_admissible,
    check_axiom,
    expected_verdict,
    fixed_games,
    independence_suite,
)
from .core import check_coalition, is_superadditive, parse_coalition_key
from .errors import InteractError, SizeCapExceeded, SizeMismatch, ValidationError
from .graph import CommGraph
from .myerson import CommunicationSituation
from .reporting import (
    CASES,
    FORMATS,
    TABLE_KINDS,
    Toggle,
    counterfactual,
    emit_counterfactual,
    emit_index_table,
    index_values,
    parse_edge,
    parse_game,
    parse_graph,
    reproduction_tables,
    select_coalitions,
    write_reproduction,
)

log = logging.getLogger("coalition_interact")

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_CAP, EXIT_MISMATCH = 0, 1, 2, 3, 4


class _EdgeAction(argparse.Action):
    """Collects --toggle-edge/--add-edge/--remove-edge in command-line order."""

    def __call__(self, parser, namespace, value, option_string=None):
        actions = getattr(namespace, self.dest, None) or []
        actions.append((self.const, value))
        setattr(namespace, self.dest, actions)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coalition-interact",
        description="Interaction indices for games with communication graphs.",
    )
    parser.add_argument("--max-n", type=int, help="raise the player-count caps (same as %s)" % config.ENV_MAX_N)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, index_choices, default_index, formats=FORMATS, default_format="csv"):
        p.add_argument("--game", required=True, help="game file (JSON or CSV)")
        p.add_argument("--graph", help="graph file (JSON); default is the complete graph")
        p.add_argument("--index", default=default_index, choices=index_choices)
        p.add_argument("--out", help="output file; default stdout")
        p.add_argument("--format", default=default_format, choices=formats)

    p = sub.add_parser("compute", help="index values on coalitions up to an order")
    common(p, TABLE_KINDS, "myerson")
    p.add_argument("--order", type=int, help="largest coalition size (default 2)")
    p.add_argument("--coalition", help='a single coalition such as "1,3"')

    p = sub.add_parser("reproduce", help="write the four worked-example tables")
    p.add_argument("--case", choices=tuple(CASES), help="only one example (default both)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--format", default="csv", choices=FORMATS)

    p = sub.add_parser("counterfactual", help="index changes after editing edges")
    common(p, TABLE_KINDS, "myerson")
    p.add_argument("--order", type=int)
    p.add_argument("--coalition")
    for flag, action in (("--toggle-edge", "toggle"), ("--add-edge", "add"), ("--remove-edge", "remove")):
        p.add_argument(flag, dest="edits", action=_EdgeAction, const=action, metavar="I,J", help=f"{action} an edge")

    p = sub.add_parser("verify", help="check the five axioms on one situation")
    common(p, GRAPH_INDEX_KINDS, "myerson", FORMATS + ("text",), "text")
    p.add_argument("--axiom", action="append", choices=AXIOMS, help="restrict to this axiom (repeatable)")
    p.add_argument("--alpha", type=float, default=1.0, help="alpha of fgn_modified")

    p = sub.add_parser("independence", help="five counterexample indices against the five axioms")
    p.add_argument("--out", help="output file; default stdout")
    p.add_argument("--format", default="text", choices=FORMATS + ("text",))
    return parser


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _situation(args) -> tuple[CommunicationSituation, bool]:
    game = parse_game(args.game)
    if args.graph:
        graph = parse_graph(args.graph)
        if graph.n != game.n:
            raise SizeMismatch(f"game has {game.n} players but graph has {graph.n} nodes")
        return CommunicationSituation(game, graph), True
    return CommunicationSituation(game, CommGraph.complete(game.n)), False


def _masks(args, n):
    if args.coalition:
        mask = parse_coalition_key(args.coalition)
        if not mask:
            raise ValidationError("--coalition must name at least one player")
        return select_coalitions(n, only=check_coalition(mask, n))
    return select_coalitions(n, args.order)


def _diagnostics(args, sit: CommunicationSituation, has_graph: bool) -> None:
    if args.index == "network" and not has_graph:
        log.warning("no --graph given: using the complete graph, where the network index is identically 0")
    if args.index in ("myerson", "network") and not is_superadditive(sit.game):
        log.warning("the game is not superadditive; values are still well defined")


def cmd_compute(args) -> int:
    sit, has_graph = _situation(args)
    _diagnostics(args, sit, has_graph)
    values = index_values(sit.game, sit.graph, args.index)
    _write(emit_index_table(args.index, sit.n, values, _masks(args, sit.n), args.format), args.out)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    paths = write_reproduction(args.case, args.out, args.format)
    for case in CASES if args.case is None else [args.case]:
        for table in reproduction_tables(case):
            sys.stdout.write(table.render() + "\n")
    for path in paths:
        log.info("wrote %s", path)
    return EXIT_OK


def cmd_counterfactual(args) -> int:
    sit, has_graph = _situation(args)
    _diagnostics(args, sit, has_graph)
    toggles = [Toggle(action, parse_edge(text)) for action, text in (args.edits or [])]
    if not toggles:
        log.warning("no edge edits given; every delta is 0")
    _, rows = counterfactual(sit.game, sit.graph, toggles, args.index, _masks(args, sit.n))
    _write(emit_counterfactual(args.index, rows, args.format), args.out)
    return EXIT_OK


def _report_text(reports) -> str:
    lines = []
    for r in reports:
        line = f"{r.index:<24} {r.axiom:<7} {r.verdict:<9} max residual {r.max_residual:.3g} over {r.domain}"
        if r.witness is not None:
            w = r.witness.describe()
            extra = {k: w[k] for k in ("coalition", "edge", "player", "partnership", "weights") if k in w}
            line += f"\n    witness: {extra} residual {r.witness_residual:.6g}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def _emit_reports(reports, fmt: str, out: str | None, extra: dict | None = None) -> None:
    if fmt == "json":
        body = {"reports": [r.as_dict() for r in reports], **(extra or {})}
        _write(json.dumps(body, indent=2) + "\n", out)
    elif fmt == "csv":
        rows = ["index,axiom,verdict,max_residual,checked"]
        rows += [f"{r.index},{r.axiom},{r.verdict},{r.max_residual:.6e},{r.checked}" for r in reports]
        _write("\n".join(rows) + "\n", out)
    else:
        _write(_report_text(reports), out)


def cmd_verify(args) -> int:
    sit, _ = _situation(args)
    index = GraphIndexFunction(args.index, args.alpha)
    axioms = args.axiom or list(AXIOMS)
    for axiom in axioms:
        cap = config.axiom_cap(axiom)
        if sit.n > cap:
            raise SizeCapExceeded(sit.n, cap, f"player count for exhaustive {axiom} checking")
    admissible = check_admissible(index, [sit])
    if not admissible.holds:
        log.warning("%s fails the component conditions (residual %.3g)", index.label(), admissible.max_residual)
    reports = []
    for axiom in axioms:
        if axiom == "IL":
            # pair the game with each fixed companion game on the same graph
            pairs = []
            for other in fixed_games(sit.n):
                pairs += [sit, sit.with_game(other)]
            reports.append(check_axiom(index, axiom, pairs))
        else:
            reports.append(check_axiom(index, axiom, [sit]))
    _emit_reports(reports, args.format, args.out)
    # a single situation need not exhibit a counterexample's targeted violation
    target = TARGETS.get(args.index)
    ok = admissible.holds and all(r.holds for r in reports if r.axiom != target)
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_independence(args) -> int:
    reports = independence_suite()
    mismatches = [
        f"{r.index} {r.axiom}" for r in reports if r.verdict != expected_verdict(r.index.split("(")[0], r.axiom)
    ]
    _emit_reports(reports, args.format, args.out, {"mismatches": mismatches})
    if mismatches:
        log.warning("verdicts differing from the expected matrix: %s", ", ".join(mismatches))
        return EXIT_MISMATCH
    return EXIT_OK


COMMANDS = {
    "compute": cmd_compute,
    "reproduce": cmd_reproduce,
    "counterfactual": cmd_counterfactual,
    "verify": cmd_verify,
    "independence": cmd_independence,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    saved = os.environ.get(config.ENV_MAX_N)
    if args.max_n is not None:
        if args.max_n < 1:
            parser.error("--max-n must be positive")
        os.environ[config.ENV_MAX_N] = str(args.max_n)
    try:
        return COMMANDS[args.command](args)
    except SizeCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InteractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to the internal-error code
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    finally:
        if saved is None:
            os.environ.pop(config.ENV_MAX_N, None)
        else:
            os.environ[config.ENV_MAX_N] = saved


if __name__ == "__main__":
    sys.exit(main())
