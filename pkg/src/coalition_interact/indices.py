"""Shapley value and the unrestricted interaction indices.

Production evaluation goes through the Harsanyi dividends of the game.  The
derivative forms (``sii_deriv``, ``banzhaf_deriv``) sum weighted S-derivatives
directly over the lattice and exist to cross-check the dividend forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from .core import (
    DividendVector,
    TUGame,
    check_coalition,
    coalition_key,
    new_subgame_index,
    players,
    popcount,
    popcounts,
    subsets,
)
from .errors import EmptyCoalition, OrderOutOfRange, OverlappingArguments, UnknownKind

INDEX_KINDS = ("shapley", "banzhaf")


@lru_cache(maxsize=None)
def _popcounts(n: int) -> np.ndarray:
    counts = popcounts(n)
    counts.setflags(write=False)
    return counts


@lru_cache(maxsize=None)
def _arange(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    idx.setflags(write=False)
    return idx


def _require(mask: int, n: int) -> int:
    if not mask:
        raise EmptyCoalition("interaction indices are defined on non-empty coalitions")
    return check_coalition(mask, n)


def shapley(game: TUGame) -> np.ndarray:
    """Shapley value, ``phi_i = sum over S containing i of Delta(S) / s``."""
    deltas = game.dividends.deltas
    share = np.zeros_like(deltas)
    share[1:] = deltas[1:] / _popcounts(game.n)[1:]
    idx = _arange(game.n)
    return np.array([share[(idx >> b) & 1 == 1].sum() for b in range(game.n)])


def s_derivative(game: TUGame, mask: int, base: int) -> float:
    """``sum_{L <= S} (-1)^{s-l} v(T | L)`` for ``T`` disjoint from ``S``."""
    _require(mask, game.n)
    check_coalition(base, game.n)
    if mask & base:
        raise OverlappingArguments(
            f"S={{{coalition_key(mask)}}} and T={{{coalition_key(base)}}} must be disjoint"
        )
    s = popcount(mask)
    total = 0.0
    for sub in subsets(mask):
        sign = -1.0 if (s - popcount(sub)) % 2 else 1.0
        total += sign * game.values[base | sub]
    return total


def _derivatives(game: TUGame, mask: int) -> tuple[np.ndarray, np.ndarray]:
    """S-derivative at every ``T`` outside ``S`` plus the sizes of those ``T``."""
    outside = [b for b in range(game.n) if not mask >> b & 1]
    bases = new_subgame_index(outside)
    s = popcount(mask)
    deriv = np.zeros(bases.size)
    for sub in subsets(mask):
        sign = -1.0 if (s - popcount(sub)) % 2 else 1.0
        deriv += sign * game.values[bases | sub]
    return deriv, _popcounts(game.n)[bases]


@lru_cache(maxsize=None)
def _sii_weights(n: int, s: int) -> np.ndarray:
    # (n-t-s)! t! / (n-s+1)! in exact arithmetic, one float conversion each
    return np.array(
        [float(Fraction(factorial(n - t - s) * factorial(t), factorial(n - s + 1))) for t in range(n - s + 1)]
    )


def sii_deriv(game: TUGame, mask: int) -> float:
    """Shapley interaction index from weighted S-derivatives (oracle path)."""
    _require(mask, game.n)
    deriv, sizes = _derivatives(game, mask)
    return float(np.dot(_sii_weights(game.n, popcount(mask))[sizes], deriv))


def _supersets(n: int, mask: int) -> np.ndarray:
    idx = _arange(n)
    return idx[(idx & mask) == mask]


def sii_div(game: TUGame | DividendVector, mask: int) -> float:
    """Shapley interaction index as ``sum_{T >= S} Delta(T) / (t - s + 1)``."""
    dv = game.dividends if isinstance(game, TUGame) else game
    _require(mask, dv.n)
    sup = _supersets(dv.n, mask)
    gap = _popcounts(dv.n)[sup] - popcount(mask)
    return float(np.sum(dv.deltas[sup] / (gap + 1)))


def banzhaf_deriv(game: TUGame, mask: int) -> float:
    _require(mask, game.n)
    deriv, _ = _derivatives(game, mask)
    return float(deriv.sum() / 2.0 ** (game.n - popcount(mask)))


def banzhaf_div(game: TUGame | DividendVector, mask: int) -> float:
    dv = game.dividends if isinstance(game, TUGame) else game
    _require(mask, dv.n)
    sup = _supersets(dv.n, mask)
    gap = _popcounts(dv.n)[sup] - popcount(mask)
    return float(np.sum(dv.deltas[sup] / 2.0**gap))


def banzhaf_ii(game: TUGame | DividendVector, mask: int) -> float:
    """Banzhaf interaction index (dividend form)."""
    return banzhaf_div(game, mask)


def interaction_values(dividends: DividendVector, kind: str = "shapley") -> np.ndarray:
    """Index value for every coalition at once; entry 0 is unused and set to 0.

    Runs a superset-sum transform whose entries are polynomials in a weight
    ``x`` tracking ``|T \\ S|``: for each ``S`` it accumulates
    ``sum_{T >= S} Delta(T) x^{t-s}``.  The Shapley index integrates that over
    ``[0, 1]``; the Banzhaf index evaluates it at ``x = 1/2``.
    """
    n = dividends.n
    if kind == "banzhaf":
        arr = np.array(dividends.deltas, dtype=float)
        for b in range(n):
            view = arr.reshape(-1, 2, 1 << b)
            view[:, 0, :] += 0.5 * view[:, 1, :]
        arr[0] = 0.0
        return arr
    if kind != "shapley":
        raise UnknownKind(f"unknown interaction index {kind!r}")
    coef = np.zeros((1 << n, n + 1))
    coef[:, 0] = dividends.deltas
    for b in range(n):
        view = coef.reshape(-1, 2, 1 << b, n + 1)
        view[:, 0, :, 1:] += view[:, 1, :, :-1]
    out = coef @ (1.0 / np.arange(1, n + 2))
    out[0] = 0.0
    return out


@dataclass(frozen=True)
class InteractionTable:
    """Index values keyed by coalition mask, tagged with the index that produced them."""

    kind: str
    n: int
    entries: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if 0 in self.entries:
            raise EmptyCoalition("interaction tables have no entry for the empty coalition")

    def __getitem__(self, mask: int) -> float:
        return self.entries[mask]

    def __len__(self) -> int:
        return len(self.entries)

    def rows(self) -> list[tuple[int, float]]:
        """``(mask, value)`` sorted by order, then mask."""
        return sorted(self.entries.items(), key=lambda kv: (popcount(kv[0]), kv[0]))

    def order(self, k: int) -> dict[int, float]:
        return {m: v for m, v in self.rows() if popcount(m) == k}

    def merge(self, other: InteractionTable) -> InteractionTable:
        if other.kind != self.kind or other.n != self.n:
            raise ValueError(f"refusing to merge a {other.kind!r} table into a {self.kind!r} table")
        return InteractionTable(self.kind, self.n, {**self.entries, **other.entries})

    def as_players(self) -> dict[tuple[int, ...], float]:
        return {tuple(players(m)): v for m, v in self.rows()}


def coalitions_up_to(n: int, max_order: int) -> list[int]:
    if not 1 <= max_order <= n:
        raise OrderOutOfRange(f"max_order must lie in 1..{n}, got {max_order}")
    sizes = _popcounts(n)
    return [int(m) for m in np.flatnonzero((sizes >= 1) & (sizes <= max_order))]


def table_from_values(kind: str, n: int, values: np.ndarray, max_order: int) -> InteractionTable:
    return InteractionTable(kind, n, {m: float(values[m]) for m in coalitions_up_to(n, max_order)})


def interaction_table(game: TUGame, kind: str = "shapley", max_order: int = 2) -> InteractionTable:
    if kind not in INDEX_KINDS:
        raise UnknownKind(f"unknown interaction index {kind!r}; expected one of {INDEX_KINDS}")
    return table_from_values(kind, game.n, interaction_values(game.dividends, kind), max_order)
