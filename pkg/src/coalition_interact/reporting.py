"""File formats, table emitters, the reproduction tables and counterfactual reports.

Game files are JSON objects ``{"n": 3, "dense": [...]}`` (``2**n`` values in
mask order) or ``{"n": 3, "values": {"1,2": 1.5, ...}}`` (unlisted coalitions
are 0).  A CSV with a ``coalition,value`` header is also accepted, which is
what :func:`emit_game` writes for ``fmt="csv"``.  Graph files are JSON objects
``{"n": 5, "edges": [[1, 2], ...]}`` with ascending pairs.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import config
from .core import (
    TUGame,
    coalition_key,
    horse_market,
    messages,
    players,
    popcount,
)
from .errors import (
    ParseError,
    PlayerOutOfRange,
    SizeMismatch,
    UnknownKind,
)
from .graph import CommGraph, add_edge, remove_edge
from .indices import coalitions_up_to, interaction_values
from .myerson import CommunicationSituation, nii_values

TABLE_KINDS = ("shapley", "banzhaf", "myerson", "network")
FORMATS = ("csv", "json")

# the graph used for both worked examples
EXAMPLE_GRAPH_EDGES = ((1, 2), (1, 3), (2, 4), (3, 4), (3, 5))


def example_graph() -> CommGraph:
    return CommGraph.from_edges(5, EXAMPLE_GRAPH_EDGES)


# ---------------------------------------------------------------------------
# parsing


def _read(path: str | Path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror or exc}", source=str(path)) from exc


def _load_json(text: str, source: str | None) -> dict:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", source) from exc
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object at top level", source)
    return obj


def _number(x, source, field) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"expected a number, got {x!r}", source, field)
    return float(x)


def _player_count(obj: dict, source) -> int:
    n = obj.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ParseError(f"'n' must be a positive integer, got {n!r}", source, "n")
    config.check_size(n)
    return n


def _key_to_mask(key: str, n: int, source, field) -> int:
    if not key.strip():
        raise ParseError("the empty coalition cannot be given a value", source, field)
    try:
        ids = [int(tok) for tok in key.split(",")]
    except ValueError as exc:
        raise ParseError(f"coalition key {key!r} is not a comma-separated list of player ids", source, field) from exc
    if ids != sorted(set(ids)):
        raise ParseError(f"coalition key {key!r} must list distinct ids in ascending order", source, field)
    if ids[0] < 1 or ids[-1] > n:
        raise PlayerOutOfRange(f"coalition {key!r} has players outside 1..{n}")
    mask = 0
    for i in ids:
        mask |= 1 << (i - 1)
    return mask


def game_from_dict(obj: dict, source: str | None = None) -> TUGame:
    n = _player_count(obj, source)
    has_dense, has_values = "dense" in obj, "values" in obj
    if has_dense == has_values:
        raise ParseError("give exactly one of 'dense' or 'values'", source)
    if has_dense:
        dense = obj["dense"]
        if not isinstance(dense, list):
            raise ParseError("'dense' must be an array", source, "dense")
        if len(dense) != 1 << n:
            raise SizeMismatch(f"'dense' has {len(dense)} entries, expected 2^{n} = {1 << n}")
        values = np.array([_number(x, source, f"dense[{k}]") for k, x in enumerate(dense)])
        return TUGame(n, values)
    table = obj["values"]
    if not isinstance(table, dict):
        raise ParseError("'values' must be an object keyed by coalition", source, "values")
    values = np.zeros(1 << n)
    for key, x in table.items():
        field = f"values[{key!r}]"
        values[_key_to_mask(key, n, source, field)] = _number(x, source, field)
    return TUGame(n, values)


def _game_from_csv(text: str, source: str | None) -> TUGame:
    rows = list(csv.reader(line for line in text.splitlines() if not line.startswith("#")))
    if not rows or [c.strip() for c in rows[0]] != ["coalition", "value"]:
        raise ParseError("CSV game files need a 'coalition,value' header", source)
    entries = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise ParseError(f"line {lineno}: expected 2 columns, got {len(row)}", source)
        try:
            entries[row[0]] = float(row[1])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {row[1]!r} is not a number", source, row[0]) from exc
    n = 0
    for line in text.splitlines():
        if line.startswith("# n="):
            n = int(line[4:])
    if not n:
        ids = [int(t) for key in entries if key.strip() for t in key.split(",")]
        n = max(ids, default=0)
    return game_from_dict({"n": n, "values": entries}, source)


def parse_game(path: str | Path) -> TUGame:
    text = _read(path)
    if str(path).endswith(".csv"):
        return _game_from_csv(text, str(path))
    return game_from_dict(_load_json(text, str(path)), str(path))


def graph_from_dict(obj: dict, source: str | None = None) -> CommGraph:
    n = _player_count(obj, source)
    edges = obj.get("edges")
    if not isinstance(edges, list):
        raise ParseError("'edges' must be an array of [i, j] pairs", source, "edges")
    pairs = []
    for k, e in enumerate(edges):
        field = f"edges[{k}]"
        if not isinstance(e, list) or len(e) != 2 or not all(isinstance(x, int) and not isinstance(x, bool) for x in e):
            raise ParseError(f"expected a pair of player ids, got {e!r}", source, field)
        if e[0] > e[1]:
            raise ParseError(f"edge {e} must be written in ascending order", source, field)
        pairs.append((e[0], e[1]))
    return CommGraph.from_edges(n, pairs)


def parse_graph(path: str | Path) -> CommGraph:
    return graph_from_dict(_load_json(_read(path), str(path)), str(path))


# ---------------------------------------------------------------------------
# emitting


def _fixed(x: float, digits: int) -> str:
    text = f"{x:.{digits}f}"
    # avoid "-0.00" from tiny negative round-off
    return text[1:] if text.startswith("-") and float(text) == 0 else text


def emit_game(game: TUGame, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps({"n": game.n, "dense": game.values.tolist()}) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# n={game.n}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["coalition", "value"])
        for mask in range(1, 1 << game.n):
            writer.writerow([coalition_key(mask), _fixed(game.values[mask], 6)])
        return buf.getvalue()
    raise UnknownKind(f"unknown format {fmt!r}; expected one of {FORMATS}")


def emit_graph(graph: CommGraph) -> str:
    return json.dumps({"n": graph.n, "edges": [list(e) for e in graph.edges]}) + "\n"


def index_values(game: TUGame, graph: CommGraph, kind: str) -> np.ndarray:
    """Value of the chosen index on every coalition (entry 0 unused)."""
    if kind == "shapley":
        return interaction_values(game.dividends, "shapley")
    if kind == "banzhaf":
        return interaction_values(game.dividends, "banzhaf")
    sit = CommunicationSituation(game, graph)
    if kind == "myerson":
        return np.array(sit.mii_values)
    if kind == "network":
        return nii_values(sit)
    raise UnknownKind(f"unknown index {kind!r}; expected one of {TABLE_KINDS}")


def select_coalitions(n: int, max_order: int | None = None, only: int | None = None) -> list[int]:
    if only is not None:
        return [only]
    return coalitions_up_to(n, min(2, n) if max_order is None else max_order)


def emit_index_table(kind: str, n: int, values: np.ndarray, masks: Sequence[int], fmt: str = "csv") -> str:
    """Rows sorted by (order, mask); CSV at 6 decimals, JSON at full precision."""
    masks = sorted(masks, key=lambda m: (popcount(m), m))
    if fmt == "json":
        rows = [{"coalition": coalition_key(m), "order": popcount(m), "value": float(values[m])} for m in masks]
        return json.dumps({"index": kind, "n": n, "rows": rows}, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["coalition", "order", kind])
        for m in masks:
            writer.writerow([coalition_key(m), popcount(m), _fixed(values[m], 6)])
        return buf.getvalue()
    raise UnknownKind(f"unknown format {fmt!r}; expected one of {FORMATS}")


# ---------------------------------------------------------------------------
# reproduction tables

CASES = {"messages": ("table1", "table2"), "horse": ("table3", "table4")}

# cells where the reference tables print a value the definitions do not give
REFERENCE_DISCREPANCIES = {
    ("table2", "Myerson", "1,4"): 1.33,
    ("table2", "Myerson", "1,5"): 0.50,
    ("table2", "Myerson", "4,5"): 0.50,
    ("table2", "Network", "1,4"): -0.67,
    ("table2", "Network", "1,5"): -1.50,
    ("table2", "Network", "4,5"): -1.50,
    ("table3", "Network", "5"): -9.62,
}


@dataclass(frozen=True)
class ReproTable:
    name: str
    case: str
    columns: tuple[int, ...]
    rows: dict[str, tuple[float, ...]]

    def cell(self, row: str, key: str) -> float:
        keys = [coalition_key(m) for m in self.columns]
        return self.rows[row][keys.index(key)]

    def footnotes(self) -> list[str]:
        notes = []
        for (table, row, key), printed in sorted(REFERENCE_DISCREPANCIES.items()):
            if table != self.name:
                continue
            value = self.cell(row, key)
            if row == "Network":
                mi, si = self.cell("Myerson", key), self.cell("Shapley", key)
                why = f"Myerson - Shapley = {mi:.2f} - {si:.2f}"
            else:
                why = "exact value of the restricted-game Shapley interaction"
            notes.append(
                f"{self.name} {row} {{{key}}}: computed {value:.2f} ({why}); "
                f"the reference table prints {printed:.2f}"
            )
        return notes

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index"] + [coalition_key(m) for m in self.columns])
        for label, vals in self.rows.items():
            writer.writerow([label] + [_fixed(v, 2) for v in vals])
        return buf.getvalue()

    def to_json(self) -> str:
        cols = [coalition_key(m) for m in self.columns]
        body = {
            "table": self.name,
            "case": self.case,
            "columns": cols,
            "rows": {label: [round(v, 2) for v in vals] for label, vals in self.rows.items()},
            "footnotes": self.footnotes(),
        }
        return json.dumps(body, indent=2) + "\n"

    def render(self) -> str:
        """Fixed-width text with an asterisk on every footnoted cell."""
        cols = [coalition_key(m) for m in self.columns]
        flagged = {(r, k) for (t, r, k) in REFERENCE_DISCREPANCIES if t == self.name}
        width = max(8, *(len(c) + 3 for c in cols))
        lines = [f"{self.name} ({self.case})", "".ljust(9) + "".join(f"{{{c}}}".rjust(width) for c in cols)]
        for label, vals in self.rows.items():
            cells = [_fixed(v, 2) + ("*" if (label, k) in flagged else " ") for v, k in zip(vals, cols)]
            lines.append(label.ljust(9) + "".join(c.rjust(width) for c in cells))
        lines.extend("  * " + note for note in self.footnotes())
        return "\n".join(lines) + "\n"


def reproduction_tables(case: str) -> list[ReproTable]:
    """Myerson, Shapley and Network rows on the example graph, singletons then pairs."""
    if case not in CASES:
        raise UnknownKind(f"unknown case {case!r}; expected one of {tuple(CASES)}")
    game = messages(5) if case == "messages" else horse_market()
    graph = example_graph()
    rows = {kind: index_values(game, graph, kind) for kind in ("myerson", "shapley", "network")}
    tables = []
    for name, order in zip(CASES[case], (1, 2)):
        cols = tuple(sorted((m for m in coalitions_up_to(5, 2) if popcount(m) == order), key=players))
        tables.append(
            ReproTable(
                name,
                case,
                cols,
                {label.capitalize(): tuple(float(rows[label][m]) for m in cols) for label in rows},
            )
        )
    return tables


def write_reproduction(case: str | None, out_dir: str | Path, fmt: str = "csv") -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for c in CASES if case is None else [case]:
        for table in reproduction_tables(c):
            path = out / f"{table.name}.{fmt}"
            path.write_text(table.to_csv() if fmt == "csv" else table.to_json())
            written.append(path)
    return written


# ---------------------------------------------------------------------------
# counterfactual edge analysis


@dataclass(frozen=True)
class Toggle:
    action: str  # "toggle", "add" or "remove"
    edge: tuple[int, int]


def parse_edge(text: str) -> tuple[int, int]:
    try:
        i, j = (int(tok) for tok in text.split(","))
    except ValueError as exc:
        raise ParseError(f"edge {text!r} must look like 'i,j'", field="edge") from exc
    return (i, j) if i < j else (j, i)


def apply_toggles(graph: CommGraph, toggles: Iterable[Toggle]) -> CommGraph:
    for t in toggles:
        i, j = t.edge
        if t.action == "toggle":
            graph = remove_edge(graph, i, j) if graph.has_edge(i, j) else add_edge(graph, i, j)
        elif t.action == "add":
            graph = add_edge(graph, i, j)
        elif t.action == "remove":
            graph = remove_edge(graph, i, j)
        else:
            raise UnknownKind(f"unknown edge action {t.action!r}")
    return graph


@dataclass(frozen=True)
class DeltaRow:
    mask: int
    before: float
    after: float

    @property
    def delta(self) -> float:
        return self.after - self.before


def counterfactual(
    game: TUGame,
    graph: CommGraph,
    toggles: Sequence[Toggle],
    kind: str = "myerson",
    masks: Sequence[int] | None = None,
) -> tuple[CommGraph, list[DeltaRow]]:
    """Index values before and after editing the graph, largest absolute change first."""
    after_graph = apply_toggles(graph, toggles)
    masks = select_coalitions(game.n) if masks is None else masks
    before = index_values(game, graph, kind)
    after = index_values(game, after_graph, kind)
    rows = [DeltaRow(m, float(before[m]), float(after[m])) for m in masks]
    rows.sort(key=lambda r: (-abs(r.delta), popcount(r.mask), r.mask))
    return after_graph, rows


def emit_counterfactual(kind: str, rows: Sequence[DeltaRow], fmt: str = "csv") -> str:
    if fmt == "json":
        body = [
            {"coalition": coalition_key(r.mask), "before": r.before, "after": r.after, "delta": r.delta} for r in rows
        ]
        return json.dumps({"index": kind, "rows": body}, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["coalition", "before", "after", "delta"])
        for r in rows:
            writer.writerow([coalition_key(r.mask), _fixed(r.before, 6), _fixed(r.after, 6), _fixed(r.delta, 6)])
        return buf.getvalue()
    raise UnknownKind(f"unknown format {fmt!r}; expected one of {FORMATS}")


__all__ = [
    "CASES",
    "DeltaRow",
    "REFERENCE_DISCREPANCIES",
    "ReproTable",
    "TABLE_KINDS",
    "Toggle",
    "apply_toggles",
    "counterfactual",
    "emit_counterfactual",
    "emit_game",
    "emit_graph",
    "emit_index_table",
    "example_graph",
    "game_from_dict",
    "graph_from_dict",
    "index_values",
    "parse_edge",
    "parse_game",
    "parse_graph",
    "reproduction_tables",
    "select_coalitions",
    "write_reproduction",
]
