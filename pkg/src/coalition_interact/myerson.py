"""Graph-restricted games and the interaction indices built on them."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from . import config
from .core import (
    DividendVector,
    QuotientMap,
    TUGame,
    check_coalition,
    coalition,
    full,
    nonempty_subsets,
    null_players,
    players,
    popcount,
    quotient_game,
    subsets,
    veto_partnerships,
)
from .errors import (
    EmptyCoalition,
    NotATree,
    NotAVetoGraphPartnership,
    PlayerOutOfRange,
    PreconditionViolated,
    SizeMismatch,
)
from .graph import (
    CommGraph,
    _reach,
    component_of,
    components,
    connects,
    cutnodes,
    essential_intermediaries,
    intermediaries,
    is_connected_in,
    minimal_connecting_sets,
    quotient_graph,
)
from .indices import interaction_values, shapley, sii_div


def restricted_values(game: TUGame, graph: CommGraph) -> np.ndarray:
    """``v^G(S)`` for every ``S``: the worth of each component of ``G_S``, summed.

    Peels off the component holding the lowest member of ``S`` and reuses the
    already computed value of what remains.
    """
    v = game.values.tolist()
    out = [0.0] * (1 << game.n)
    for s in range(1, 1 << game.n):
        comp = _reach(graph, s & -s, s)
        out[s] = v[comp] + out[s ^ comp]
    return np.array(out)


@dataclass(frozen=True, eq=False)
class CommunicationSituation:
    """A game together with the graph that limits who can coordinate.

    The restricted game and its dividends are built lazily on first access and
    then reused; concurrent first access at worst recomputes identical arrays.
    """

    game: TUGame
    graph: CommGraph

    def __post_init__(self):
        if self.game.n != self.graph.n:
            raise SizeMismatch(f"game has {self.game.n} players but graph has {self.graph.n} nodes")

    @property
    def n(self) -> int:
        return self.game.n

    @cached_property
    def restricted(self) -> TUGame:
        return TUGame(self.n, restricted_values(self.game, self.graph))

    @property
    def restricted_dividends(self) -> DividendVector:
        return self.restricted.dividends

    @cached_property
    def mii_values(self) -> np.ndarray:
        return interaction_values(self.restricted_dividends, "shapley")

    def with_graph(self, graph: CommGraph) -> CommunicationSituation:
        return CommunicationSituation(self.game, graph)

    def with_game(self, game: TUGame) -> CommunicationSituation:
        return CommunicationSituation(game, self.graph)


def situation(game: TUGame, graph: CommGraph | None = None) -> CommunicationSituation:
    """Pair a game with a graph; no graph means the complete graph."""
    return CommunicationSituation(game, CommGraph.complete(game.n) if graph is None else graph)


def restricted_game(sit: CommunicationSituation) -> TUGame:
    return sit.restricted


def myerson_value(sit: CommunicationSituation) -> np.ndarray:
    """Shapley value of the restricted game."""
    return shapley(sit.restricted)


def _require(sit: CommunicationSituation, mask: int) -> int:
    if not mask:
        raise EmptyCoalition("interaction indices are defined on non-empty coalitions")
    return check_coalition(mask, sit.n)


def mii(sit: CommunicationSituation, mask: int) -> float:
    """Myerson interaction index: the Shapley interaction index of ``v^G``."""
    _require(sit, mask)
    return sii_div(sit.restricted_dividends, mask)


def nii(sit: CommunicationSituation, mask: int) -> float:
    """Network-induced interaction, ``MI(S) - SI(S)``."""
    _require(sit, mask)
    return mii(sit, mask) - sii_div(sit.game, mask)


def nii_values(sit: CommunicationSituation) -> np.ndarray:
    return sit.mii_values - interaction_values(sit.game.dividends, "shapley")


# ---------------------------------------------------------------------------
# graph null players


def graph_null_players(sit: CommunicationSituation) -> set[int]:
    """All graph null players, judging each component on its own.

    Inside a component ``C`` a player must be null in ``v|_C`` and, whenever it
    intermediates between two other players of ``C``, one of those two must
    be null in ``v|_C`` as well.
    """
    out = set()
    for comp in components(sit.graph, full(sit.n)):
        members = players(comp)
        local_null = {members[k - 1] for k in null_players(sit.game.restrict(comp))}
        for i in members:
            if i not in local_null:
                continue
            bit = 1 << (i - 1)
            if all(
                j in local_null or k in local_null
                for j, k in combinations([m for m in members if m != i], 2)
                if intermediaries(sit.graph, coalition(j, k)) & bit
            ):
                out.add(i)
    return out


def is_graph_null(sit: CommunicationSituation, i: int) -> bool:
    if not 1 <= i <= sit.n:
        raise PlayerOutOfRange(f"player {i} outside 1..{sit.n}")
    return i in graph_null_players(sit)


# ---------------------------------------------------------------------------
# veto graph partnerships


def veto_graph_witness(sit: CommunicationSituation, group: int) -> int | None:
    """Smallest veto partnership ``P`` with ``group`` inside ``P`` plus its essential intermediaries."""
    if not group:
        raise EmptyCoalition("a veto graph partnership must be non-empty")
    check_coalition(group, sit.n)
    config.check_enum_size(sit.n)
    for p in veto_partnerships(sit.game):
        if group & ~(p | essential_intermediaries(sit.graph, p)) == 0:
            return p
    return None


def is_veto_graph_partnership(sit: CommunicationSituation, group: int) -> bool:
    return veto_graph_witness(sit, group) is not None


def veto_graph_partnerships(sit: CommunicationSituation) -> list[int]:
    """Every veto graph partnership, by ascending cardinality then mask."""
    config.check_enum_size(sit.n)
    found = set()
    for p in veto_partnerships(sit.game):
        found.update(nonempty_subsets(p | essential_intermediaries(sit.graph, p)))
    return sorted(found, key=lambda m: (popcount(m), m))


def srvpc_quotient(sit: CommunicationSituation, partners: int) -> CommunicationSituation:
    """Quotient of the restricted game and of the graph with respect to a veto graph partnership.

    Player ids follow :class:`QuotientMap`: ``QuotientMap.build(sit.n, partners)``
    reproduces the relabelling.
    """
    if not is_veto_graph_partnership(sit, partners):
        raise NotAVetoGraphPartnership(f"{players(partners)} is not a veto graph partnership")
    qgame, _ = quotient_game(sit.restricted, partners)
    qgraph, _ = quotient_graph(sit.graph, partners)
    return CommunicationSituation(qgame, qgraph)


def quotient_map(sit: CommunicationSituation, partners: int) -> QuotientMap:
    return QuotientMap.build(sit.n, partners)


# ---------------------------------------------------------------------------
# dividends of the restricted game


def restricted_dividend_direct(sit: CommunicationSituation, mask: int) -> float:
    _require(sit, mask)
    return sit.restricted_dividends[mask]


def restricted_dividend_general(sit: CommunicationSituation, mask: int) -> float:
    """Restricted-game dividend rebuilt from the dividends of ``v``.

    Every ``T`` inside ``S`` contributes once for each non-empty family of its
    minimal connecting sets (taken in ``G_S``) whose union is exactly ``S``,
    with sign ``(-1)^(|family| + 1)``.
    """
    _require(sit, mask)
    if not is_connected_in(sit.graph, mask):
        raise PreconditionViolated(f"{players(mask)} is not connected in the graph")
    local = sit.graph.restricted_to(mask)
    deltas = sit.game.dividends
    total = 0.0
    for t in nonempty_subsets(mask):
        if deltas[t] == 0.0:
            continue
        family = minimal_connecting_sets(local, t)
        coeff = 0
        for pick in range(1, 1 << len(family)):
            union = 0
            for k, member in enumerate(family):
                if pick >> k & 1:
                    union |= member
            if union == mask:
                coeff += 1 if popcount(pick) % 2 else -1
        total += coeff * deltas[t]
    return total


def restricted_dividend_tree(sit: CommunicationSituation, mask: int, reading: str = "induced") -> float:
    """Restricted-game dividend on a forest, summing ``Delta_v(S \\ L)`` over sets ``L`` of cutnodes.

    ``reading="induced"`` takes cut vertices of ``G_S``; ``reading="hull"`` judges
    them inside the component of the whole graph that holds ``S``.
    """
    _require(sit, mask)
    if not sit.graph.is_forest():
        raise NotATree("the communication graph has a cycle")
    if not is_connected_in(sit.graph, mask):
        raise PreconditionViolated(f"{players(mask)} is not connected in the graph")
    if reading == "induced":
        cut = cutnodes(sit.graph, mask)
    elif reading == "hull":
        cut = cutnodes(sit.graph, mask, component_of(sit.graph, players(mask)[0]))
    else:
        raise ValueError(f"unknown cutnode reading {reading!r}")
    deltas = sit.game.dividends
    return float(sum(deltas[mask & ~drop] for drop in subsets(cut)))


@dataclass(frozen=True)
class DividendCheck:
    label: str
    mask: int
    direct: float
    formula: float
    agrees: bool


def dividend_relation_report(
    sits: list[CommunicationSituation],
    relation: str = "tree",
    reading: str = "induced",
    tol: float = config.AXIOM_TOL,
) -> list[DividendCheck]:
    """Compare a closed-form dividend relation with the direct transform on every connected coalition."""
    rows = []
    for k, sit in enumerate(sits):
        for mask in range(1, 1 << sit.n):
            if not is_connected_in(sit.graph, mask):
                continue
            direct = restricted_dividend_direct(sit, mask)
            if relation == "tree":
                value = restricted_dividend_tree(sit, mask, reading)
            else:
                value = restricted_dividend_general(sit, mask)
            rows.append(DividendCheck(f"sit{k}", mask, direct, value, abs(direct - value) <= tol))
    return rows


def spans_components(graph: CommGraph, mask: int) -> bool:
    """True when no single component of the graph holds all of ``S``."""
    return not connects(graph, full(graph.n), mask)
