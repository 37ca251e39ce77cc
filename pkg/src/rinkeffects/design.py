"""Design matrix encoding for the yearly and pooled rink effect models.

Yearly model columns (one season)::

    intercept | rink[j] | asd | team_for[k] | team_against[l] | home | home_rink[j]

Pooled model columns: intercept, asd, team_for, team_against and home are repeated per
season (`label@season`) while rink and home_rink are shared by every season.
"""

### IMPORTS
### ============================================================================
## Future
from __future__ import annotations

## Standard Library
from dataclasses import dataclass
import re
from typing import Iterable, List, Sequence

## Installed
import numpy as np
import pandas as pd

## Application
from .exceptions import DesignError
from .models import MODEL_EVENTS, TeamGame

### CONSTANTS
### ============================================================================
RESPONSE_FLOOR = 1e-3
"""Added to every rate before taking the log so zero counts stay finite"""

FAMILIES: tuple[str, ...] = (
    "intercept",
    "rink",
    "asd",
    "team_for",
    "team_against",
    "home",
    "home_rink",
)
"""Column families in column order"""

SHARED_FAMILIES = frozenset({"rink", "home_rink"})
"""Families not split by season in the pooled model"""

PENALIZABLE_FAMILIES = frozenset(FAMILIES) - {"intercept"}

_label_regex = re.compile(r"^(?P<family>[a-z_]+)(?:\[(?P<level>[^\]]*)\])?(?:@(?P<season>.+))?$")


### CLASSES
### ============================================================================
@dataclass(frozen=True, order=True)
class ColumnLabel:
    """Label of a design matrix column.

    Rendered as `family[level]@season`, with `[level]` omitted for families without
    levels and `@season` omitted for shared / single season columns.
    """

    family: str
    level: str | None = None
    season: str | None = None

    def __str__(self) -> str:
        label = self.family
        if self.level is not None:
            label += f"[{self.level}]"
        if self.season is not None:
            label += f"@{self.season}"
        return label

    @classmethod
    def parse(cls, label: str) -> ColumnLabel:
        """Recover a `ColumnLabel` from its string form"""
        match = _label_regex.match(label)
        if match is None or match.group("family") not in FAMILIES:
            raise ValueError(f"invalid column label {label!r}")
        return cls(match.group("family"), match.group("level"), match.group("season"))


@dataclass(frozen=True)
class DesignMatrix:
    """Encoded regression inputs.

    Attributes:
        values: `(n_rows, n_columns)` float array
        labels: label of every column
        penalized: whether each column is penalized by the elastic net
    """

    values: np.ndarray
    labels: tuple[ColumnLabel, ...]
    penalized: np.ndarray

    @property
    def n_rows(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_columns(self) -> int:
        return int(self.values.shape[1])

    @property
    def column_names(self) -> List[str]:
        return [str(label) for label in self.labels]

    def indices(self, family: str, season: str | None = None) -> List[int]:
        """Column indices of a family, optionally restricted to one season"""
        return [
            i
            for i, label in enumerate(self.labels)
            if label.family == family and (season is None or label.season == season)
        ]

    def index(self, label: ColumnLabel | str) -> int:
        """Column index of a label"""
        if isinstance(label, str):
            label = ColumnLabel.parse(label)
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(str(label)) from None

    def column(self, label: ColumnLabel | str) -> np.ndarray:
        return self.values[:, self.index(label)]

    def take_rows(self, rows: np.ndarray) -> DesignMatrix:
        """Subset of rows with the same columns"""
        return DesignMatrix(self.values[rows], self.labels, self.penalized)

    def to_frame(self) -> pd.DataFrame:
        """Values as a `DataFrame` whose columns are the labels"""
        return pd.DataFrame(self.values, columns=self.column_names)


@dataclass(frozen=True)
class ResponseVector:
    """Log transformed rates of one event.

    Attributes:
        event: event type
        values: `ln(rate + RESPONSE_FLOOR)` per row
    """

    event: str
    values: np.ndarray

    def take_rows(self, rows: np.ndarray) -> ResponseVector:
        return ResponseVector(self.event, self.values[rows])


### FUNCTIONS
### ============================================================================
def encode_yearly(
    team_games: Sequence[TeamGame], event: str, *, unpenalized: Iterable[str] = ()
) -> tuple[DesignMatrix, ResponseVector]:
    """Encode one season of team-games for the yearly model.

    Args:
        team_games: observations of a single season
        event: event type whose rate is the response
        unpenalized: families to exempt from the penalty (intercept is always exempt)

    Raises:
        DesignError: multiple seasons, unknown event, fewer than two rinks
    """
    seasons = sorted({team_game.season for team_game in team_games})
    if len(seasons) > 1:
        raise DesignError(f"yearly model needs a single season, got {seasons}")
    return _encode(team_games, event, pooled=False, unpenalized=unpenalized)


def encode_pooled(
    team_games: Sequence[TeamGame], event: str, *, unpenalized: Iterable[str] = ()
) -> tuple[DesignMatrix, ResponseVector]:
    """Encode team-games of any number of seasons for the pooled model.

    Args:
        team_games: observations, possibly spanning seasons
        event: event type whose rate is the response
        unpenalized: families to exempt from the penalty (intercept is always exempt)

    Raises:
        DesignError: unknown event, fewer than two rinks
    """
    return _encode(team_games, event, pooled=True, unpenalized=unpenalized)


def encode_response(team_games: Sequence[TeamGame], event: str) -> ResponseVector:
    """Log transformed rates of the given event"""
    if event not in MODEL_EVENTS:
        raise DesignError(f"unknown event {event!r}, expected one of {MODEL_EVENTS}")
    rates = np.array([team_game.rate[event] for team_game in team_games], dtype=float)
    return ResponseVector(event, np.log(rates + RESPONSE_FLOOR))


def _encode(
    team_games: Sequence[TeamGame], event: str, *, pooled: bool, unpenalized: Iterable[str]
) -> tuple[DesignMatrix, ResponseVector]:
    # pylint: disable=too-many-locals
    unpenalized = set(unpenalized)
    unknown = unpenalized - PENALIZABLE_FAMILIES - {"intercept"}
    if unknown:
        raise DesignError(f"unknown families {sorted(unknown)}")

    response = encode_response(team_games, event)
    if not team_games:
        raise DesignError("no team-games to encode")

    rinks = sorted({team_game.rink for team_game in team_games})
    if len(rinks) < 2:
        raise DesignError(f"need at least 2 rinks, got {rinks}")

    seasons = sorted({team_game.season for team_game in team_games})
    season_col = np.array([team_game.season for team_game in team_games])
    rink_col = np.array([team_game.rink for team_game in team_games])
    for_col = np.array([team_game.for_team for team_game in team_games])
    against_col = np.array([team_game.against_team for team_game in team_games])
    home = np.array([team_game.is_home for team_game in team_games], dtype=float)
    asd = np.array([team_game.asd for team_game in team_games], dtype=float)

    blocks: List[np.ndarray] = []
    labels: List[ColumnLabel] = []

    def add(family: str, values: np.ndarray, levels: Sequence[str | None], season: str | None):
        blocks.append(values.reshape(len(team_games), -1))
        labels.extend(ColumnLabel(family, level, season) for level in levels)
        return

    block_seasons: List[str | None] = list(seasons) if pooled else [None]

    def season_mask(season: str | None) -> np.ndarray:
        if season is None:
            return np.ones(len(team_games), dtype=float)
        return (season_col == season).astype(float)

    for season in block_seasons:
        add("intercept", season_mask(season), [None], season)
    add("rink", _indicators(rink_col, rinks), rinks, None)
    for season in block_seasons:
        add("asd", asd * season_mask(season), [None], season)
    for family, column in (("team_for", for_col), ("team_against", against_col)):
        for season in block_seasons:
            mask = season_mask(season).astype(bool)
            levels = sorted(set(column[mask]))
            add(family, _indicators(column, levels) * mask[:, None], levels, season)
    for season in block_seasons:
        add("home", home * season_mask(season), [None], season)
    add("home_rink", _indicators(rink_col, rinks) * home[:, None], rinks, None)

    penalized = np.array(
        [label.family != "intercept" and label.family not in unpenalized for label in labels]
    )
    design = DesignMatrix(np.hstack(blocks), tuple(labels), penalized)
    return design, response


def _indicators(column: np.ndarray, levels: Sequence[str]) -> np.ndarray:
    """0/1 matrix with one column per level"""
    return (column.astype(object)[:, None] == np.array(levels, dtype=object)[None, :]).astype(
        float
    )
