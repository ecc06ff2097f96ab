"""Exact interaction indices for cooperative games restricted by communication graphs."""

from .core import (
    DividendVector,
    QuotientMap,
    TUGame,
    builtin,
    coalition,
    coalition_key,
    dictator,
    horse_market,
    messages,
    mobius,
    null_game,
    players,
    unanimity,
    zeta,
)
from .errors import InteractError, ParseError, SizeCapExceeded, ValidationError
from .graph import CommGraph, components, minimal_connecting_sets
from .indices import InteractionTable, banzhaf_ii, interaction_table, shapley, sii_deriv, sii_div
from .myerson import (
    CommunicationSituation,
    mii,
    myerson_value,
    nii,
    restricted_game,
    situation,
)

__version__ = "0.1.0"
