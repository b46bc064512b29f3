"""Per-node trust bookkeeping and the rule-based decision block.

Each node carries two integer trust indicators, one per predictor channel.
An indicator is incremented when that channel's error exceeds its threshold,
unless the channel is inside its post-increment transitory window. The pair
is classified into 5 x 5 categories relative to (alpha, beta) and a total
25-entry rule table maps every pair to an action.
"""

import json
from dataclasses import dataclass
from enum import Enum, IntEnum

from .errors import ConfigurationError


class TrustCategory(IntEnum):
    ZERO = 0
    BELOW_ALPHA = 1
    AT_ALPHA = 2
    BETWEEN_ALPHA_BETA = 3
    AT_OR_ABOVE_BETA = 4


class Action(Enum):
    SELF_DESTRUCT = "self_destruct"
    DO_NOTHING = "do_nothing"


_CATEGORY_NAMES = {c.name.lower(): c for c in TrustCategory}


@dataclass
class ThresholdConfig:
    eps_ar: float = 1.0
    eps_nn: float = 2.0
    alpha: int = 3
    beta: int = 5
    transitory_len: int = 4
    reset_window: int = 60

    def validate(self):
        problems = []
        if self.eps_ar <= 0:
            problems.append("eps_ar must be positive")
        if self.eps_nn <= 0:
            problems.append("eps_nn must be positive")
        if not (0 < self.alpha < self.beta):
            problems.append("0 < alpha < beta required")
        if self.transitory_len < 1:
            problems.append("transitory_len must be >= 1")
        if self.reset_window <= self.transitory_len:
            problems.append("reset_window must exceed transitory_len")
        return problems


@dataclass
class TrustState:
    b_ar: int = 0
    b_nn: int = 0
    transitory_ar: int = 0
    transitory_nn: int = 0
    steps_since_event: int = 0


def classify_trust(b, alpha, beta):
    """Map a trust indicator to one of the five categories.

    Values above beta saturate into the top category.
    """
    if not 0 < alpha < beta:
        raise ConfigurationError("0 < alpha < beta required")
    if b == 0:
        return TrustCategory.ZERO
    if b < alpha:
        return TrustCategory.BELOW_ALPHA
    if b == alpha:
        return TrustCategory.AT_ALPHA
    if b < beta:
        return TrustCategory.BETWEEN_ALPHA_BETA
    return TrustCategory.AT_OR_ABOVE_BETA


def update_trust(state, err_ar, err_nn, cfg):
    """Advance one step; returns (ar_incremented, nn_incremented).

    A None error means that channel produced no prediction this step
    (warm-up) and is skipped. Indicators reset to zero after reset_window
    consecutive steps without an increment on either channel.
    """
    changed_ar = changed_nn = False
    if err_ar is not None and abs(err_ar) > cfg.eps_ar and state.transitory_ar == 0:
        state.b_ar += 1
        state.transitory_ar = cfg.transitory_len
        changed_ar = True
    elif state.transitory_ar > 0:
        state.transitory_ar -= 1

    if err_nn is not None and err_nn > cfg.eps_nn and state.transitory_nn == 0:
        state.b_nn += 1
        state.transitory_nn = cfg.transitory_len
        changed_nn = True
    elif state.transitory_nn > 0:
        state.transitory_nn -= 1

    if changed_ar or changed_nn:
        state.steps_since_event = 0
    else:
        state.steps_since_event += 1
        if state.steps_since_event >= cfg.reset_window and (state.b_ar or state.b_nn):
            state.b_ar = 0
            state.b_nn = 0
            state.transitory_ar = 0
            state.transitory_nn = 0
            state.steps_since_event = 0
    return changed_ar, changed_nn


class RuleTable:
    """Total mapping (AR category, NN category) -> Action."""

    def __init__(self, cells):
        missing = [(a, n) for a in TrustCategory for n in TrustCategory
                   if (a, n) not in cells]
        if missing:
            raise ConfigurationError(f"rule table is not total; missing {missing}")
        extra = set(cells) - {(a, n) for a in TrustCategory for n in TrustCategory}
        if extra:
            raise ConfigurationError(f"rule table has unknown cells: {sorted(extra)}")
        self._cells = dict(cells)

    def lookup(self, cat_ar, cat_nn):
        return self._cells[(TrustCategory(cat_ar), TrustCategory(cat_nn))]

    def items(self):
        return self._cells.items()

    @classmethod
    def default(cls):
        """Corroborated-evidence table.

        Fires when both channels are at least AT_ALPHA, or when one channel
        saturated (>= beta) and the other shows any nonzero evidence.
        """
        cells = {}
        for a in TrustCategory:
            for n in TrustCategory:
                fire = (a >= TrustCategory.AT_ALPHA and n >= TrustCategory.AT_ALPHA)
                fire = fire or (a == TrustCategory.AT_OR_ABOVE_BETA
                                and n >= TrustCategory.BELOW_ALPHA)
                fire = fire or (n == TrustCategory.AT_OR_ABOVE_BETA
                                and a >= TrustCategory.BELOW_ALPHA)
                cells[(a, n)] = Action.SELF_DESTRUCT if fire else Action.DO_NOTHING
        return cls(cells)

    @classmethod
    def ar_only(cls):
        """Counterfactual table gating on the AR channel alone."""
        cells = {(a, n): (Action.SELF_DESTRUCT if a >= TrustCategory.AT_ALPHA
                          else Action.DO_NOTHING)
                 for a in TrustCategory for n in TrustCategory}
        return cls(cells)

    # -- text config interface -------------------------------------------

    @classmethod
    def from_mapping(cls, mapping):
        """Parse {"at_alpha,zero": "do_nothing", ...}; must cover all 25 pairs."""
        cells = {}
        for key, value in mapping.items():
            try:
                ar_name, nn_name = (part.strip() for part in key.split(","))
                cat_ar = _CATEGORY_NAMES[ar_name]
                cat_nn = _CATEGORY_NAMES[nn_name]
                action = Action(value)
            except (ValueError, KeyError) as exc:
                raise ConfigurationError(f"bad rule entry {key!r}: {value!r}") from exc
            cells[(cat_ar, cat_nn)] = action
        return cls(cells)

    def to_mapping(self):
        return {f"{a.name.lower()},{n.name.lower()}": act.value
                for (a, n), act in sorted(self._cells.items())}

    @classmethod
    def from_file(cls, path):
        try:
            with open(path) as fh:
                mapping = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read rule table {path}: {exc}") from exc
        if not isinstance(mapping, dict):
            raise ConfigurationError("rule table file must hold a JSON object")
        return cls.from_mapping(mapping)
