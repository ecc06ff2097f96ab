"""Size caps and numeric tolerances."""

from __future__ import annotations

import os

from .errors import SizeCapExceeded

ENV_MAX_N = "COALITION_INTERACT_MAX_N"

DEFAULT_MAX_N = 20
DEFAULT_ENUM_MAX_N = 16

# value/dividend comparisons vs. accumulated arithmetic in axiom checks
VALUE_TOL = 1e-12
AXIOM_TOL = 1e-9

# exhaustive quantification limits for the axiom checkers
AXIOM_CAPS = {"ICE": 6, "IGN": 6, "IF": 6, "ISRVPC": 5, "IL": 6}


def max_players() -> int:
    raw = os.environ.get(ENV_MAX_N)
    return int(raw) if raw else DEFAULT_MAX_N


def enum_max_players() -> int:
    # an explicit override lifts both caps; otherwise subset enumeration stays at 16
    raw = os.environ.get(ENV_MAX_N)
    return max(int(raw), DEFAULT_ENUM_MAX_N) if raw else DEFAULT_ENUM_MAX_N


def check_size(n: int, cap: int | None = None, what: str = "player count") -> None:
    cap = max_players() if cap is None else cap
    if n > cap:
        raise SizeCapExceeded(n, cap, what)


def check_enum_size(n: int) -> None:
    check_size(n, enum_max_players(), "player count for subset enumeration")


def axiom_cap(axiom: str) -> int:
    # same override rule as enumeration: it can raise a cap, never lower it
    raw = os.environ.get(ENV_MAX_N)
    base = AXIOM_CAPS[axiom]
    return max(int(raw), base) if raw else base
