"""TU games on a dense subset lattice.

Coalitions are plain ``int`` bit masks: player ``i`` (1-based) occupies bit
``i - 1``, so the mask is also the index into every lattice table.  Use
:func:`coalition` to build masks from player ids and :func:`players` to go back.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import config
from .errors import (
    EmptyCoalition,
    NonZeroEmptyCoalition,
    PlayerOutOfRange,
    PreconditionViolated,
    SizeMismatch,
    UnknownKind,
)

# ---------------------------------------------------------------------------
# coalition helpers


def coalition(*ids: int) -> int:
    """Mask for the given 1-based player ids: ``coalition(1, 3) == 0b101``."""
    mask = 0
    for i in ids:
        if i < 1:
            raise PlayerOutOfRange(f"player ids are 1-based, got {i}")
        mask |= 1 << (i - 1)
    return mask


def players(mask: int) -> list[int]:
    """Ascending 1-based player ids contained in ``mask``."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def full(n: int) -> int:
    return (1 << n) - 1


def check_coalition(mask: int, n: int) -> int:
    if mask < 0 or mask >> n:
        raise PlayerOutOfRange(f"coalition {coalition_key(mask)} has players outside 1..{n}")
    return mask


def coalition_key(mask: int) -> str:
    """Canonical text key, e.g. ``"1,3,5"``; the empty coalition is ``""``."""
    return ",".join(str(i) for i in players(mask))


def parse_coalition_key(key: str) -> int:
    key = key.strip()
    if not key:
        return 0
    return coalition(*(int(tok) for tok in key.split(",")))


def subsets(mask: int) -> Iterable[int]:
    """All subsets of ``mask`` including 0 and ``mask`` itself, ascending."""
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


def nonempty_subsets(mask: int) -> Iterable[int]:
    for sub in subsets(mask):
        if sub:
            yield sub


def popcounts(n: int) -> np.ndarray:
    """Cardinality of every coalition index ``0 .. 2**n - 1``."""
    counts = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        counts[1 << i : 1 << (i + 1)] = counts[: 1 << i] + 1
    return counts


# ---------------------------------------------------------------------------
# games


def _frozen(values: Sequence[float] | np.ndarray) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TUGame:
    """A transferable-utility game with a dense table of ``2**n`` values."""

    n: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise SizeMismatch(f"a game needs at least one player, got n={self.n}")
        config.check_size(self.n)
        arr = _frozen(self.values)
        if arr.shape != (1 << self.n,):
            raise SizeMismatch(f"expected {1 << self.n} values for n={self.n}, got {arr.size}")
        if abs(arr[0]) > config.VALUE_TOL:
            raise NonZeroEmptyCoalition(f"v(empty set) must be 0, got {arr[0]}")
        if arr[0] != 0.0:
            arr = arr.copy()
            arr[0] = 0.0
            arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def grand(self) -> int:
        return full(self.n)

    @cached_property
    def dividends(self) -> DividendVector:
        # computed once per game; a racing first access just recomputes the same vector
        return mobius(self)

    def __call__(self, mask: int) -> float:
        return float(self.values[mask])

    def __eq__(self, other):
        if not isinstance(other, TUGame):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.n, self.values.tobytes()))

    def allclose(self, other: TUGame, atol: float = config.VALUE_TOL) -> bool:
        return self.n == other.n and bool(np.allclose(self.values, other.values, rtol=0, atol=atol))

    def __add__(self, other: TUGame) -> TUGame:
        return TUGame(self.n, self.values + other.values)

    def __mul__(self, alpha: float) -> TUGame:
        return TUGame(self.n, alpha * self.values)

    __rmul__ = __mul__

    def restrict(self, mask: int) -> TUGame:
        """``v|_C`` relabelled onto the players of ``mask`` in ascending order."""
        members = [i - 1 for i in players(mask)]
        sub = new_subgame_index(members)
        return TUGame(len(members), self.values[sub])

    def squared(self) -> TUGame:
        return TUGame(self.n, self.values**2)


def new_subgame_index(bits: Sequence[int]) -> np.ndarray:
    """Original lattice index of every coalition of the compact game on ``bits``."""
    k = len(bits)
    idx = np.zeros(1 << k, dtype=np.int64)
    for pos, b in enumerate(bits):
        idx[1 << pos : 1 << (pos + 1)] = idx[: 1 << pos] | (1 << b)
    return idx


def new_game(n: int, values: Sequence[float] | np.ndarray) -> TUGame:
    return TUGame(n, values)


@dataclass(frozen=True, eq=False)
class DividendVector:
    """Harsanyi dividends, one per coalition; ``deltas[0] == 0``."""

    n: int
    deltas: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = _frozen(self.deltas)
        if arr.shape != (1 << self.n,):
            raise SizeMismatch(f"expected {1 << self.n} dividends for n={self.n}, got {arr.size}")
        if arr[0] != 0.0:
            raise NonZeroEmptyCoalition("the empty coalition carries no dividend")
        object.__setattr__(self, "deltas", arr)

    def __getitem__(self, mask: int) -> float:
        return float(self.deltas[mask])

    def support(self, tol: float = 0.0) -> list[int]:
        return [int(t) for t in np.flatnonzero(np.abs(self.deltas) > tol)]


def _subset_difference(values: np.ndarray, n: int, bits: Iterable[int], sign: float) -> np.ndarray:
    # in-place lattice transform along the given bit directions
    arr = np.array(values, dtype=float)
    for i in bits:
        view = arr.reshape(-1, 2, 1 << i)
        view[:, 1, :] += sign * view[:, 0, :]
    return arr


def mobius(game: TUGame) -> DividendVector:
    """Harsanyi dividends by the O(n 2^n) subset-lattice Möbius transform."""
    return DividendVector(game.n, _subset_difference(game.values, game.n, range(game.n), -1.0))


def zeta(dividends: DividendVector) -> TUGame:
    """Inverse of :func:`mobius`: ``v(S) = sum of dividends of subsets of S``."""
    return TUGame(dividends.n, _subset_difference(dividends.deltas, dividends.n, range(dividends.n), 1.0))


def finite_difference(values: np.ndarray, n: int, mask: int) -> np.ndarray:
    """Alternating differences along the bits of ``mask``.

    Entry ``T | mask`` of the result is ``sum_{L <= mask} (-1)^{|mask|-|L|} v(T | L)``
    for every ``T`` disjoint from ``mask``.
    """
    return _subset_difference(values, n, (i for i in range(n) if mask >> i & 1), -1.0)


# ---------------------------------------------------------------------------
# quotients


@dataclass(frozen=True)
class QuotientMap:
    """Relabelling used by quotient games and graphs.

    The proxy ``[C]`` takes the smallest original id in ``C``; the surviving ids
    are then compacted in ascending order onto bits ``0 .. n - c``.
    """

    original_n: int
    merged: int
    retained: tuple[int, ...]
    proxy: int

    @classmethod
    def build(cls, n: int, merged: int) -> QuotientMap:
        if not merged:
            raise EmptyCoalition("cannot form a quotient with respect to the empty coalition")
        check_coalition(merged, n)
        proxy = players(merged)[0]
        retained = tuple(i for i in range(1, n + 1) if not merged >> (i - 1) & 1)
        return cls(n, merged, retained, proxy)

    @property
    def n(self) -> int:
        return len(self.retained) + 1

    @property
    def order(self) -> tuple[int, ...]:
        """Original ids (proxy standing for ``[C]``) in compact order."""
        return tuple(sorted(self.retained + (self.proxy,)))

    @property
    def relabel(self) -> dict[int, int]:
        """Original id -> compact 0-based position; the proxy id stands for ``[C]``."""
        return {orig: pos for pos, orig in enumerate(self.order)}

    @property
    def proxy_bit(self) -> int:
        return 1 << self.relabel[self.proxy]

    def to_quotient(self, mask: int) -> int:
        """Map an original coalition that contains all or none of ``C``."""
        inside = mask & self.merged
        if inside and inside != self.merged:
            raise PreconditionViolated("coalition splits the merged set; it has no quotient image")
        rel = self.relabel
        out = self.proxy_bit if inside else 0
        for i in players(mask & ~self.merged):
            out |= 1 << rel[i]
        return out

    def from_quotient(self, qmask: int) -> int:
        order = self.order
        out = 0
        for pos in range(len(order)):
            if qmask >> pos & 1:
                orig = order[pos]
                out |= self.merged if orig == self.proxy else 1 << (orig - 1)
        return out

    def original_index(self) -> np.ndarray:
        """Original lattice index of every quotient coalition."""
        return np.array([self.from_quotient(q) for q in range(1 << self.n)], dtype=np.int64)


def quotient_game(game: TUGame, merged: int) -> tuple[TUGame, QuotientMap]:
    qmap = QuotientMap.build(game.n, merged)
    return TUGame(qmap.n, game.values[qmap.original_index()]), qmap


# ---------------------------------------------------------------------------
# player and coalition predicates


def null_players(game: TUGame, tol: float = config.VALUE_TOL) -> set[int]:
    out = set()
    for b in range(game.n):
        view = game.values.reshape(-1, 2, 1 << b)
        if np.all(np.abs(view[:, 1, :] - view[:, 0, :]) <= tol):
            out.add(b + 1)
    return out


def is_veto_partnership(game: TUGame, partners: int, tol: float = config.VALUE_TOL) -> bool:
    """``v(T | S) = v(T) = 0`` for all ``T`` outside the partnership and ``S`` a proper part of it.

    The quantified coalitions are exactly those that do not contain the whole
    partnership, so the test is a single sweep over the lattice.
    """
    if not partners:
        raise EmptyCoalition("a veto partnership must be non-empty")
    check_coalition(partners, game.n)
    idx = np.arange(1 << game.n)
    lacking = (idx & partners) != partners
    return bool(np.all(np.abs(game.values[lacking]) <= tol))


def veto_core(game: TUGame, tol: float = config.VALUE_TOL) -> int:
    """Largest set every veto partnership lives in.

    A partnership is veto iff it is contained in every coalition of non-zero
    worth, so the veto partnerships are exactly the non-empty subsets of the
    intersection of those coalitions (all of ``N`` for the null game).
    """
    core = game.grand
    for mask in np.flatnonzero(np.abs(game.values) > tol):
        core &= int(mask)
    return core


def veto_partnerships(game: TUGame, tol: float = config.VALUE_TOL) -> list[int]:
    """Every veto partnership, by ascending cardinality then mask."""
    config.check_enum_size(game.n)
    core = veto_core(game, tol)
    found = [p for p in nonempty_subsets(core) if is_veto_partnership(game, p, tol)]
    return sorted(found, key=lambda p: (popcount(p), p))


def is_superadditive(game: TUGame, tol: float = config.VALUE_TOL) -> bool:
    v = game.values
    for s in range(1, 1 << game.n):
        rest = game.grand & ~s
        # each unordered disjoint pair once: T ranges over subsets of the complement above S
        for t in nonempty_subsets(rest):
            if t < s:
                continue
            if v[s | t] < v[s] + v[t] - tol:
                return False
    return True


# ---------------------------------------------------------------------------
# built-in games


def unanimity(n: int, carrier: int) -> TUGame:
    if not carrier:
        raise EmptyCoalition("unanimity games need a non-empty carrier")
    check_coalition(carrier, n)
    idx = np.arange(1 << n)
    return TUGame(n, ((idx & carrier) == carrier).astype(float))


def dictator(n: int, i: int) -> TUGame:
    return unanimity(n, coalition(i))


def null_game(n: int) -> TUGame:
    return TUGame(n, np.zeros(1 << n))


def messages(n: int) -> TUGame:
    """``v(S) = s (s - 1)``: every ordered pair of members can exchange a message."""
    s = popcounts(n).astype(float)
    return TUGame(n, s * (s - 1))


def horse_market() -> TUGame:
    """Seller 1, middlemen 2 and 3, buyers 4 (values the horse at 90) and 5 (at 100)."""
    values = np.zeros(32)
    for mask in range(32):
        if not mask & 1:
            continue
        if mask & 0b10000:
            values[mask] = 100.0
        elif mask & 0b01000:
            values[mask] = 90.0
    return TUGame(5, values)


def builtin(kind: str, n: int | None = None, carrier: Iterable[int] = (), player: int | None = None) -> TUGame:
    """Named games: ``messages``, ``horse_market``, ``unanimity``, ``dictator``, ``null``."""
    if kind == "messages":
        return messages(5 if n is None else n)
    if kind in ("horse_market", "horse"):
        return horse_market()
    if kind == "unanimity":
        return unanimity(n, coalition(*carrier))
    if kind == "dictator":
        return dictator(n, player)
    if kind == "null":
        return null_game(n)
    raise UnknownKind(f"unknown built-in game {kind!r}")
