"""Undirected communication graphs stored as neighbour bit masks."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable

from . import config
from .core import QuotientMap, check_coalition, full, players, popcount, subsets
from .errors import DuplicateEdge, EdgeAlreadyPresent, LoopEdge, NoSuchEdge, PlayerOutOfRange


@dataclass(frozen=True)
class CommGraph:
    """Simple undirected graph on players ``1..n``; ``adj[b]`` is the neighbour mask of bit ``b``."""

    n: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise PlayerOutOfRange(f"expected {self.n} adjacency rows, got {len(self.adj)}")
        for b, nb in enumerate(self.adj):
            if nb >> self.n:
                raise PlayerOutOfRange(f"player {b + 1} has a neighbour outside 1..{self.n}")
            if nb >> b & 1:
                raise LoopEdge(f"loop at player {b + 1}")
            for c in range(self.n):
                if nb >> c & 1 and not self.adj[c] >> b & 1:
                    raise ValueError(f"adjacency is not symmetric between {b + 1} and {c + 1}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], strict: bool = True) -> CommGraph:
        """Build from 1-based edge pairs; with ``strict`` duplicates are an error."""
        adj = [0] * n
        for i, j in edges:
            if not (1 <= i <= n and 1 <= j <= n):
                raise PlayerOutOfRange(f"edge ({i}, {j}) has an endpoint outside 1..{n}")
            if i == j:
                raise LoopEdge(f"loop edge ({i}, {j})")
            if adj[i - 1] >> (j - 1) & 1:
                if strict:
                    raise DuplicateEdge(f"duplicate edge ({min(i, j)}, {max(i, j)})")
                continue
            adj[i - 1] |= 1 << (j - 1)
            adj[j - 1] |= 1 << (i - 1)
        return cls(n, tuple(adj))

    @classmethod
    def complete(cls, n: int) -> CommGraph:
        return cls.from_edges(n, combinations(range(1, n + 1), 2))

    @classmethod
    def empty(cls, n: int) -> CommGraph:
        return cls(n, (0,) * n)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [
            (b + 1, c + 1)
            for b in range(self.n)
            for c in range(b + 1, self.n)
            if self.adj[b] >> c & 1
        ]

    def has_edge(self, i: int, j: int) -> bool:
        return i != j and bool(self.adj[i - 1] >> (j - 1) & 1)

    def neighbours(self, mask: int) -> int:
        out = 0
        for i in players(mask):
            out |= self.adj[i - 1]
        return out

    def is_forest(self) -> bool:
        n_edges = len(self.edges)
        return n_edges == self.n - len(components(self, full(self.n)))

    def is_tree(self) -> bool:
        return self.is_forest() and len(components(self, full(self.n))) == 1

    def induced(self, mask: int) -> CommGraph:
        """``Gamma_C`` relabelled onto the players of ``mask`` in ascending order."""
        members = players(mask)
        pos = {p: k + 1 for k, p in enumerate(members)}
        return CommGraph.from_edges(
            len(members),
            ((pos[i], pos[j]) for i, j in self.edges if i in pos and j in pos),
        ) if members else CommGraph(0, ())

    def restricted_to(self, mask: int) -> CommGraph:
        """Keep only edges inside ``mask``; labels are unchanged."""
        return CommGraph(
            self.n, tuple(nb & mask if mask >> b & 1 else 0 for b, nb in enumerate(self.adj))
        )

    def without_edges(self, edges: Iterable[tuple[int, int]]) -> CommGraph:
        adj = list(self.adj)
        for i, j in edges:
            adj[i - 1] &= ~(1 << (j - 1))
            adj[j - 1] &= ~(1 << (i - 1))
        return CommGraph(self.n, tuple(adj))


def _reach(graph: CommGraph, start: int, within: int) -> int:
    # flood fill from the bits of ``start`` inside ``within``
    seen = start
    frontier = start
    adj = graph.adj
    while frontier:
        grown = 0
        f = frontier
        while f:
            low = f & -f
            grown |= adj[low.bit_length() - 1]
            f ^= low
        frontier = grown & within & ~seen
        seen |= frontier
    return seen


def component_of(graph: CommGraph, i: int, within: int | None = None) -> int:
    """Component of player ``i`` in ``Gamma_within`` (whole graph by default)."""
    within = full(graph.n) if within is None else within
    return _reach(graph, 1 << (i - 1), within)


def components(graph: CommGraph, mask: int) -> list[int]:
    """Connected components of ``Gamma_S`` ordered by their smallest player."""
    out = []
    rest = mask
    while rest:
        comp = _reach(graph, rest & -rest, mask)
        out.append(comp)
        rest &= ~comp
    return out


def is_connected_in(graph: CommGraph, mask: int) -> bool:
    if popcount(mask) <= 1:
        return True
    return _reach(graph, mask & -mask, mask) == mask


def connects(graph: CommGraph, nodes: int, target: int) -> bool:
    """Whether ``Gamma_nodes`` puts all of ``target`` in one component."""
    if target & nodes != target:
        return False
    if popcount(target) <= 1:
        return True
    return _reach(graph, target & -target, nodes) & target == target


@lru_cache(maxsize=65536)
def _minimal_connecting(graph: CommGraph, target: int) -> tuple[int, ...]:
    home = _reach(graph, target & -target, full(graph.n))
    if target & ~home:
        return ()
    free = home & ~target
    found = []
    for extra in subsets(free):
        nodes = target | extra
        if not connects(graph, nodes, target):
            continue
        if all(not connects(graph, nodes & ~(1 << (x.bit_length() - 1)), target)
               for x in _bits(extra)):
            found.append(nodes)
    return tuple(sorted(found))


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low
        mask ^= low


def minimal_connecting_sets(graph: CommGraph, target: int) -> list[int]:
    """Node sets of all minimal ``S``-connecting subgraphs, ascending by mask.

    Brute force over every superset of ``S`` inside its component, keeping those
    that connect ``S`` and lose that property when any single non-``S`` node is
    dropped.  Empty when ``S`` spans several components.
    """
    if not target:
        raise ValueError("minimal connecting sets need a non-empty coalition")
    check_coalition(target, graph.n)
    config.check_enum_size(graph.n)
    return list(_minimal_connecting(graph, target))


def intermediaries(graph: CommGraph, target: int) -> int:
    union = 0
    for m in minimal_connecting_sets(graph, target):
        union |= m
    return union & ~target


def essential_intermediaries(graph: CommGraph, target: int) -> int:
    family = minimal_connecting_sets(graph, target)
    if not family:
        return 0
    inter = full(graph.n)
    for m in family:
        inter &= m
    return inter & ~target


def quotient_graph(graph: CommGraph, merged: int) -> tuple[CommGraph, QuotientMap]:
    """Merge ``C`` into the proxy node ``[C]``, adjacent to every neighbour of ``C``."""
    qmap = QuotientMap.build(graph.n, merged)
    rel = qmap.relabel

    def image(i: int) -> int:
        return qmap.proxy if merged >> (i - 1) & 1 else i

    edges = set()
    for i, j in graph.edges:
        a, b = image(i), image(j)
        if a != b:
            edges.add((rel[min(a, b)] + 1, rel[max(a, b)] + 1))
    return CommGraph.from_edges(qmap.n, sorted(edges)), qmap


def remove_edge(graph: CommGraph, i: int, j: int) -> CommGraph:
    if not graph.has_edge(i, j):
        raise NoSuchEdge(f"edge ({i}, {j}) is not in the graph")
    return graph.without_edges([(i, j)])


def add_edge(graph: CommGraph, i: int, j: int) -> CommGraph:
    if not (1 <= i <= graph.n and 1 <= j <= graph.n):
        raise PlayerOutOfRange(f"edge ({i}, {j}) has an endpoint outside 1..{graph.n}")
    if i == j:
        raise LoopEdge(f"loop edge ({i}, {j})")
    if graph.has_edge(i, j):
        raise EdgeAlreadyPresent(f"edge ({i}, {j}) is already in the graph")
    adj = list(graph.adj)
    adj[i - 1] |= 1 << (j - 1)
    adj[j - 1] |= 1 << (i - 1)
    return CommGraph(graph.n, tuple(adj))


def boundary(graph: CommGraph, mask: int) -> list[tuple[int, int]]:
    """Edges with exactly one endpoint in ``mask``."""
    return [(i, j) for i, j in graph.edges if (mask >> (i - 1) & 1) != (mask >> (j - 1) & 1)]


def all_graphs(n: int) -> Iterable[CommGraph]:
    """Every labelled simple graph on ``n`` nodes."""
    pairs = list(combinations(range(1, n + 1), 2))
    for chosen in range(1 << len(pairs)):
        yield CommGraph.from_edges(n, (p for k, p in enumerate(pairs) if chosen >> k & 1))


def cutnodes(graph: CommGraph, mask: int, ambient: int | None = None) -> int:
    """Members of ``S`` whose removal disconnects the rest of ``S``.

    Connectivity is judged inside ``Gamma_ambient``; the default ambient set is
    ``S`` itself, i.e. cut vertices of the induced subgraph.
    """
    ambient = mask if ambient is None else ambient
    out = 0
    for x in players(mask):
        bit = 1 << (x - 1)
        rest = mask & ~bit
        if rest and not connects(graph, ambient & ~bit, rest):
            out |= bit
    return out


def hull_on_tree(graph: CommGraph, target: int) -> int:
    """Union of the unique paths between members of ``S`` on a tree (path-union oracle)."""
    hull = target
    members = players(target)
    for a, b in combinations(members, 2):
        hull |= _tree_path(graph, a, b)
    return hull


def _tree_path(graph: CommGraph, a: int, b: int) -> int:
    parent = {a: None}
    stack = [a]
    while stack:
        x = stack.pop()
        for y in players(graph.adj[x - 1]):
            if y not in parent:
                parent[y] = x
                stack.append(y)
    if b not in parent:
        return 0
    path = 0
    x = b
    while x is not None:
        path |= 1 << (x - 1)
        x = parent[x]
    return path


__all__ = [
    "CommGraph",
    "add_edge",
    "all_graphs",
    "boundary",
    "component_of",
    "components",
    "connects",
    "essential_intermediaries",
    "hull_on_tree",
    "intermediaries",
    "is_connected_in",
    "minimal_connecting_sets",
    "quotient_graph",
    "remove_edge",
]
