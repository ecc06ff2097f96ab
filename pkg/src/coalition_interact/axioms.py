"""Axioms for graph interaction indices as finite, replayable checks.

A :class:`GraphIndexFunction` evaluates an index on every coalition of a
communication situation at once.  :func:`check_axiom` walks the quantified
objects of one axiom (components, graph null players, edges, veto graph
partnerships, game pairs) exhaustively for the supplied situations and keeps
the worst residual as a witness that :func:`replay` can recompute.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator

import numpy as np

from . import config
from .core import (
    QuotientMap,
    TUGame,
    coalition,
    coalition_key,
    dictator,
    full,
    messages,
    new_subgame_index,
    null_game,
    players,
    popcount,
    subsets,
    unanimity,
)
from .errors import SizeCapExceeded, UnknownKind
from .graph import (
    CommGraph,
    all_graphs,
    boundary,
    components,
    essential_intermediaries,
    intermediaries,
    is_connected_in,
)
from .indices import interaction_values
from .myerson import (
    CommunicationSituation,
    graph_null_players,
    is_veto_graph_partnership,
    spans_components,
    srvpc_quotient,
    veto_graph_partnerships,
)

AXIOMS = ("ICE", "IGN", "IF", "ISRVPC", "IL")
INDEX_KINDS = (
    "myerson",
    "banzhaf_graph",
    "fgn_modified",
    "scaled_essential",
    "first_order_only",
    "squared_game",
)
# axiom each counterexample index is built to break
TARGETS = {
    "banzhaf_graph": "ICE",
    "fgn_modified": "IGN",
    "scaled_essential": "IF",
    "first_order_only": "ISRVPC",
    "squared_game": "IL",
}
IL_WEIGHTS = ((1.0, 1.0), (2.0, -1.0), (0.5, 3.0))


# ---------------------------------------------------------------------------
# indices


def _unanimity_mii(n: int, carrier: int, graph: CommGraph) -> np.ndarray:
    return CommunicationSituation(unanimity(n, carrier), graph).mii_values


@dataclass(frozen=True)
class GraphIndexFunction:
    """A graph interaction index, evaluated on all coalitions of a situation.

    ``alpha`` only matters for ``fgn_modified``.
    """

    kind: str
    alpha: float = 1.0
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.kind not in INDEX_KINDS:
            raise UnknownKind(f"unknown graph index {self.kind!r}; expected one of {INDEX_KINDS}")

    def values(self, sit: CommunicationSituation) -> np.ndarray:
        key = (sit.game, sit.graph)
        if key not in self._cache:
            arr = _EVALUATORS[self.kind](self, sit)
            arr.setflags(write=False)
            self._cache[key] = arr
        return self._cache[key]

    def __call__(self, sit: CommunicationSituation, mask: int) -> float:
        return float(self.values(sit)[mask])

    def label(self) -> str:
        return f"fgn_modified(alpha={self.alpha:g})" if self.kind == "fgn_modified" else self.kind


def alt_index(kind: str, sit: CommunicationSituation, mask: int, alpha: float = 1.0) -> float:
    return GraphIndexFunction(kind, alpha)(sit, mask)


def _myerson(index, sit):
    return np.array(sit.mii_values)


def _banzhaf_graph(index, sit):
    return interaction_values(sit.restricted_dividends, "banzhaf")


def _first_order_only(index, sit):
    out = np.zeros(1 << sit.n)
    for b in range(sit.n):
        out[1 << b] = sit.mii_values[1 << b]
    return out


def _strictly_positive(game: TUGame) -> bool:
    return bool(np.all(game.values[1:] > 0))


def _squared_game(index, sit):
    base = np.array(sit.mii_values)
    if not _strictly_positive(sit.game):
        return base
    squared = CommunicationSituation(sit.game.squared(), sit.graph).mii_values
    sizes = np.array([popcount(m) for m in range(1 << sit.n)])
    return np.where(sizes >= 2, squared, base)


def _scaled_essential(index, sit):
    n = sit.n
    idx = np.arange(1 << n)
    out = np.zeros(1 << n)
    deltas = sit.game.dividends
    for t in deltas.support():
        ess = t | essential_intermediaries(sit.graph, t)
        loose = intermediaries(sit.graph, t) & ~essential_intermediaries(sit.graph, t)
        inner = np.array([popcount(m) for m in idx & loose])
        both = ((idx & ess) != 0) & (inner > 0)
        factor = np.where(both, inner, 1)
        out += deltas[t] * factor * _unanimity_mii(n, t, sit.graph)
    return out


def _fgn_modified(index, sit):
    deltas = sit.game.dividends
    if not deltas.support():
        return np.zeros(1 << sit.n)
    out = np.array(sit.mii_values)
    for t in deltas.support():
        for s in range(1, 1 << sit.n):
            if fgn_condition(sit.graph, t, s):
                out[s] += index.alpha * deltas[t]
    return out


def fgn_condition(graph: CommGraph, carrier: int, mask: int) -> bool:
    """Conditions under which the ``fgn_modified`` index adds ``alpha`` for ``u_T`` at ``S``.

    ``|S| >= 2``, ``T`` inside ``S``, ``S`` connected, and no set of boundary
    edges of ``S`` whose removal turns ``S`` into a veto graph partnership of ``u_T``.
    """
    if popcount(mask) < 2 or carrier & ~mask or not is_connected_in(graph, mask):
        return False
    game = unanimity(graph.n, carrier)
    edges = boundary(graph, mask)
    for size in range(len(edges) + 1):
        for dropped in combinations(edges, size):
            sit = CommunicationSituation(game, graph.without_edges(dropped))
            if is_veto_graph_partnership(sit, mask):
                return False
    return True


_EVALUATORS = {
    "myerson": _myerson,
    "banzhaf_graph": _banzhaf_graph,
    "fgn_modified": _fgn_modified,
    "scaled_essential": _scaled_essential,
    "first_order_only": _first_order_only,
    "squared_game": _squared_game,
}

MYERSON = GraphIndexFunction("myerson")


# ---------------------------------------------------------------------------
# admissibility


@dataclass(frozen=True)
class AdmissibilityReport:
    kind: str
    holds: bool
    checked: int
    max_residual: float
    witness: tuple | None = None


def check_admissible(
    index: GraphIndexFunction, sits: Iterable[CommunicationSituation], tol: float = config.AXIOM_TOL
) -> AdmissibilityReport:
    """Zero across components and agreement with the index of ``(v|_C, G_C)`` inside a component."""
    worst, witness, checked = 0.0, None, 0
    for sit in sits:
        vals = index.values(sit)
        for s in range(1, 1 << sit.n):
            if spans_components(sit.graph, s):
                res = abs(vals[s])
                checked += 1
                if res > worst:
                    worst, witness = res, (sit, s, "spans components")
        for comp in components(sit.graph, full(sit.n)):
            local = CommunicationSituation(sit.game.restrict(comp), sit.graph.induced(comp))
            local_vals = index.values(local)
            members = [p - 1 for p in players(comp)]
            embed = new_subgame_index(members)
            diff = np.abs(vals[embed[1:]] - local_vals[1:])
            checked += diff.size
            k = int(np.argmax(diff))
            if diff[k] > worst:
                worst, witness = float(diff[k]), (sit, int(embed[k + 1]), "component restriction")
    return AdmissibilityReport(index.label(), worst <= tol, checked, worst, witness)


# ---------------------------------------------------------------------------
# axiom cases


@dataclass(frozen=True, eq=False)
class Case:
    """One quantified instance of an axiom; enough to recompute its residual."""

    axiom: str
    sit: CommunicationSituation
    mask: int = 0
    edge: tuple[int, int] | None = None
    player: int | None = None
    partners: int | None = None
    other: CommunicationSituation | None = None
    weights: tuple[float, float] | None = None

    def describe(self) -> dict:
        out = {
            "axiom": self.axiom,
            "n": self.sit.n,
            "game": self.sit.game.values.tolist(),
            "edges": [list(e) for e in self.sit.graph.edges],
            "coalition": coalition_key(self.mask),
        }
        if self.edge is not None:
            out["edge"] = list(self.edge)
        if self.player is not None:
            out["player"] = self.player
        if self.partners is not None:
            out["partnership"] = coalition_key(self.partners)
        if self.other is not None:
            out["other_game"] = self.other.game.values.tolist()
        if self.weights is not None:
            out["weights"] = list(self.weights)
        return out


def _cases(axiom: str, sits: list[CommunicationSituation]) -> Iterator[Case]:
    if axiom == "ICE":
        for sit in sits:
            for comp in components(sit.graph, full(sit.n)):
                yield Case(axiom, sit, comp)
    elif axiom == "IGN":
        for sit in sits:
            for i in sorted(graph_null_players(sit)):
                bit = 1 << (i - 1)
                for s in subsets(full(sit.n) & ~bit):
                    yield Case(axiom, sit, s | bit, player=i)
    elif axiom == "IF":
        for sit in sits:
            for i, j in sit.graph.edges:
                pair = coalition(i, j)
                for s in subsets(full(sit.n) & ~pair):
                    yield Case(axiom, sit, s, edge=(i, j))
    elif axiom == "ISRVPC":
        for sit in sits:
            for p in veto_graph_partnerships(sit):
                for s in subsets(full(sit.n) & ~p):
                    yield Case(axiom, sit, s | p, partners=p)
    elif axiom == "IL":
        for first, second in _pairs(sits):
            for w in IL_WEIGHTS:
                for s in range(1, 1 << first.n):
                    yield Case(axiom, first, s, other=second, weights=w)
    else:
        raise UnknownKind(f"unknown axiom {axiom!r}; expected one of {AXIOMS}")


def _pairs(sits: list[CommunicationSituation]):
    for first, second in zip(sits[::2], sits[1::2]):
        if first.graph == second.graph:
            yield first, second


def residual(index: GraphIndexFunction, case: Case) -> float:
    """Signed amount by which ``case`` violates its axiom (0 when it holds exactly)."""
    sit, mask = case.sit, case.mask
    vals = index.values(sit)
    if case.axiom == "ICE":
        return float(sum(vals[1 << (i - 1)] for i in players(mask)) - sit.game(mask))
    if case.axiom == "IGN":
        return float(vals[mask])
    if case.axiom == "IF":
        i, j = case.edge
        cut = index.values(sit.with_graph(sit.graph.without_edges([case.edge])))
        with_i, with_j = mask | coalition(i), mask | coalition(j)
        return float((vals[with_i] - cut[with_i]) - (vals[with_j] - cut[with_j]))
    if case.axiom == "ISRVPC":
        partners = case.partners
        quotient = srvpc_quotient(sit, partners)
        qmap = QuotientMap.build(sit.n, partners)
        return float(vals[mask] - index.values(quotient)[qmap.to_quotient(mask)])
    if case.axiom == "IL":
        a, b = case.weights
        other = case.other
        mixed = CommunicationSituation(TUGame(sit.n, a * sit.game.values + b * other.game.values), sit.graph)
        return float(index.values(mixed)[mask] - a * vals[mask] - b * index.values(other)[mask])
    raise UnknownKind(f"unknown axiom {case.axiom!r}")


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of one axiom on a finite quantification domain.

    ``holds`` means no checked instance exceeded the tolerance; it says nothing
    beyond the ``domain`` that was enumerated.  The witness is the first
    instance over the tolerance, in enumeration order.
    """

    index: str
    axiom: str
    verdict: str
    tolerance: float
    checked: int
    max_residual: float
    domain: str
    witness: Case | None = None
    witness_residual: float | None = None

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    def as_dict(self) -> dict:
        out = {
            "index": self.index,
            "axiom": self.axiom,
            "verdict": self.verdict,
            "tolerance": self.tolerance,
            "checked": self.checked,
            "max_residual": self.max_residual,
            "domain": self.domain,
        }
        if self.witness is not None:
            out["witness"] = self.witness.describe()
            out["witness_residual"] = self.witness_residual
        return out


def check_axiom(
    index: GraphIndexFunction,
    axiom: str,
    sits: Iterable[CommunicationSituation],
    tol: float = config.AXIOM_TOL,
    domain: str | None = None,
) -> AxiomReport:
    sits = list(sits)
    if axiom not in AXIOMS:
        raise UnknownKind(f"unknown axiom {axiom!r}; expected one of {AXIOMS}")
    cap = config.axiom_cap(axiom)
    for sit in sits:
        if sit.n > cap:
            raise SizeCapExceeded(sit.n, cap, f"player count for exhaustive {axiom} checking")
    worst, witness, witness_res, checked = 0.0, None, None, 0
    for case in _cases(axiom, sits):
        res = residual(index, case)
        checked += 1
        worst = max(worst, abs(res))
        if witness is None and abs(res) > tol:
            witness, witness_res = case, res
    verdict = "violated" if worst > tol else "holds"
    if domain is None:
        sizes = sorted({s.n for s in sits})
        domain = f"{len(sits)} situations, n in {sizes}, {checked} instances"
    return AxiomReport(
        index.label(),
        axiom,
        verdict,
        tol,
        checked,
        worst,
        domain,
        witness,
        witness_res,
    )


def replay(index: GraphIndexFunction, report: AxiomReport) -> float:
    """Recompute the residual of a violated report's witness."""
    if report.witness is None:
        raise ValueError("only violated reports carry a witness")
    fresh = GraphIndexFunction(index.kind, index.alpha)
    return residual(fresh, report.witness)


# ---------------------------------------------------------------------------
# suites


def fixed_games(n: int, seed: int = 0) -> list[TUGame]:
    """Ten deterministic games on ``n`` players spanning the cases the axioms care about.

    Includes games with veto partnerships, null players, strict positivity and
    generic random dividends.
    """
    rng = np.random.default_rng(1000 + 17 * n + seed)
    size = 1 << n
    idx = np.arange(size)
    games = [
        messages(n),
        unanimity(n, full(n)),
        unanimity(n, coalition(1, n)),
        dictator(n, 1),
        null_game(n),
        TUGame(n, np.concatenate([[0.0], rng.integers(-5, 6, size - 1).astype(float)])),
    ]
    core = coalition(1, min(2, n))
    veto = np.where((idx & core) == core, rng.integers(0, 4, size), 0).astype(float)
    games.append(_from_dividends(n, veto))
    games.append(TUGame(n, np.concatenate([[0.0], rng.integers(1, 9, size - 1).astype(float)])))
    left = coalition(*range(1, n + 1, 2))
    glove = [min(popcount(m & left), popcount(m & ~left)) for m in idx]
    games.append(TUGame(n, np.array(glove, dtype=float)))
    sparse = np.zeros(size)
    for m in rng.choice(np.arange(1, size), size=min(3, size - 1), replace=False):
        sparse[m] = rng.integers(-3, 4)
    games.append(_from_dividends(n, sparse))
    return games


def _from_dividends(n: int, deltas: np.ndarray) -> TUGame:
    arr = np.array(deltas, dtype=float)
    arr[0] = 0.0
    for b in range(n):
        view = arr.reshape(-1, 2, 1 << b)
        view[:, 1, :] += view[:, 0, :]
    return TUGame(n, arr)


def random_graph(n: int, rng: np.random.Generator, p: float = 0.5) -> CommGraph:
    return CommGraph.from_edges(n, (e for e in combinations(range(1, n + 1), 2) if rng.random() < p))


def random_game(n: int, rng: np.random.Generator, style: str | None = None) -> TUGame:
    style = style or rng.choice(["integer", "positive", "veto", "sparse"])
    size = 1 << n
    if style == "integer":
        return TUGame(n, np.concatenate([[0.0], rng.integers(-6, 7, size - 1).astype(float)]))
    if style == "positive":
        return TUGame(n, np.concatenate([[0.0], rng.uniform(0.5, 5.0, size - 1)]))
    idx = np.arange(size)
    if style == "veto":
        core = int(rng.integers(1, size))
        deltas = np.where((idx & core) == core, rng.integers(-2, 4, size), 0)
        return _from_dividends(n, deltas)
    deltas = np.zeros(size)
    for m in rng.choice(np.arange(1, size), size=min(3, size - 1), replace=False):
        deltas[m] = rng.integers(-3, 4)
    return _from_dividends(n, deltas)


def exhaustive_suite(max_nodes: int = 4, seed: int = 0) -> list[CommunicationSituation]:
    """Every graph on ``1..max_nodes`` nodes crossed with :func:`fixed_games`.

    Consecutive situations share a graph, so :func:`check_axiom` pairs them for
    the linearity check.
    """
    out = []
    for n in range(1, max_nodes + 1):
        games = fixed_games(n, seed)
        for graph in all_graphs(n):
            out.extend(CommunicationSituation(g, graph) for g in games)
    return out


def random_suite(count: int = 200, sizes: tuple[int, ...] = (2, 3, 4, 5), seed: int = 7) -> list[CommunicationSituation]:
    """``count`` random situations, generated in same-graph pairs."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.choice(sizes))
        graph = random_graph(n, rng)
        for _ in range(2):
            out.append(CommunicationSituation(random_game(n, rng), graph))
    return out[:count]


WITNESS_GRAPH = CommGraph.from_edges(5, [(1, 2), (1, 3), (1, 4), (2, 5), (3, 5), (4, 5)])


def witness_suite(kind: str) -> list[CommunicationSituation]:
    """The concrete instance that breaks ``kind``'s targeted axiom."""
    if kind == "banzhaf_graph":
        # any game with inefficient Banzhaf singletons on a complete graph
        return [CommunicationSituation(unanimity(3, coalition(1, 2, 3)), CommGraph.complete(3))]
    if kind == "fgn_modified":
        # u_{1,2} on the path 1-2-3: player 3 is graph null, yet N gains alpha
        return [CommunicationSituation(unanimity(3, coalition(1, 2)), CommGraph.from_edges(3, [(1, 2), (2, 3)]))]
    if kind == "scaled_essential":
        return [CommunicationSituation(unanimity(5, coalition(1, 5)), WITNESS_GRAPH)]
    if kind == "first_order_only":
        return [CommunicationSituation(unanimity(2, coalition(1, 2)), CommGraph.complete(2))]
    if kind == "squared_game":
        graph = CommGraph.complete(2)
        return [
            CommunicationSituation(TUGame(2, [0.0, 1.0, 1.0, 3.0]), graph),
            CommunicationSituation(TUGame(2, [0.0, 2.0, 1.0, 4.0]), graph),
        ]
    return []


def independence_suite(
    sits: list[CommunicationSituation] | None = None, alpha: float = 1.0
) -> list[AxiomReport]:
    """Five counterexample indices × five axioms.

    The targeted axiom of each index is checked on the index's own witness
    instance followed by the shared suite, so a violation names that instance
    as its witness; the other four run on the shared suite alone, which
    defaults to :func:`random_suite`.
    """
    base = sits if sits is not None else random_suite()
    reports = []
    for kind, target in TARGETS.items():
        index = GraphIndexFunction(kind, alpha)
        for axiom in AXIOMS:
            domain = witness_suite(kind) + base if axiom == target else base
            reports.append(check_axiom(index, axiom, domain))
    return reports


def expected_verdict(kind: str, axiom: str) -> str:
    if kind == "myerson":
        return "holds"
    return "violated" if TARGETS[kind] == axiom else "holds"


def is_strictly_positive(game: TUGame) -> bool:
    return _strictly_positive(game)


__all__ = [
    "AXIOMS",
    "AdmissibilityReport",
    "AxiomReport",
    "Case",
    "GraphIndexFunction",
    "INDEX_KINDS",
    "MYERSON",
    "TARGETS",
    "alt_index",
    "check_admissible",
    "check_axiom",
    "exhaustive_suite",
    "expected_verdict",
    "fgn_condition",
    "fixed_games",
    "independence_suite",
    "is_strictly_positive",
    "random_game",
    "random_graph",
    "random_suite",
    "replay",
    "residual",
    "witness_suite",
]
