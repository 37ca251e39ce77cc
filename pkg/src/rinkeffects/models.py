"""Domain types shared by the pipeline stages."""

### IMPORTS
### ============================================================================
## Future
from __future__ import annotations

## Standard Library
from dataclasses import dataclass, field
import enum
from typing import Dict, Optional

## Installed

## Application


### CONSTANTS
### ============================================================================
REGULATION_SECONDS = 3600
"""Length of periods 1-3 in seconds"""

PERIOD_SECONDS = 1200

RATE_BASE_SECONDS = 3600
"""Rates are expressed per this many seconds of NEN5v5 play"""


class EventType(str, enum.Enum):
    """Event types recorded in play-by-play logs"""

    SHOT = "SHOT"
    MISS = "MISS"
    BLOCK = "BLOCK"
    HIT = "HIT"
    GIVE = "GIVE"
    TAKE = "TAKE"
    GOAL = "GOAL"
    FAC = "FAC"
    OTHER = "OTHER"

    def __str__(self) -> str:
        return self.value


TEAMLESS_EVENTS = frozenset({EventType.FAC, EventType.OTHER})
"""Events that may be recorded without an `event_team`"""

PRIMARY_EVENTS: tuple[str, ...] = ("BLOCK", "GIVE", "HIT", "MISS", "SHOT", "TAKE")
"""Events recorded directly by scorers that are modeled"""

DERIVED_EVENTS: tuple[str, ...] = ("CORSI", "FENWICK", "TURN")
"""Events computed from the primary events"""

MODEL_EVENTS: tuple[str, ...] = PRIMARY_EVENTS + DERIVED_EVENTS
"""Every event with a rate on `TeamGame`, in reporting order"""

COUNT_EVENTS: tuple[str, ...] = MODEL_EVENTS + ("GOAL",)
"""Every event with a raw count on `TeamGame`"""


### CLASSES
### ============================================================================
@dataclass(frozen=True)
class RawEvent:  # pylint: disable=too-many-instance-attributes
    """One recorded play-by-play row.

    Attributes:
        season: season id e.g. `"20072008"`
        game_id: opaque game identifier
        period: period number (4+ is overtime)
        elapsed_seconds: seconds since the start of the game
        event_type: the type of event
        event_team: team credited with the event, `None` for faceoffs / other
        home_team: designated home team
        away_team: away team
        home_score: home goals at this event
        away_score: away goals at this event
        home_skaters: home skaters on ice (3-6)
        away_skaters: away skaters on ice (3-6)
        home_goalie_on: home goalie on ice
        away_goalie_on: away goalie on ice
        player: player credited with the event if known
    """

    season: str
    game_id: str
    period: int
    elapsed_seconds: int
    event_type: EventType
    event_team: Optional[str]
    home_team: str
    away_team: str
    home_score: int
    away_score: int
    home_skaters: int
    away_skaters: int
    home_goalie_on: bool
    away_goalie_on: bool
    player: Optional[str] = None

    @property
    def is_nen5v5(self) -> bool:
        """Non-empty-net five-on-five regulation play"""
        return (
            self.period <= 3
            and self.home_skaters == 5
            and self.away_skaters == 5
            and self.home_goalie_on
            and self.away_goalie_on
        )

    @property
    def score_differential(self) -> int:
        """Home score minus away score"""
        return self.home_score - self.away_score


@dataclass(frozen=True)
class EventInterval:
    """An event together with the time until the next event.

    Attributes:
        event: the event starting this interval
        length_seconds: seconds until the next event (or the end of regulation)
    """

    event: RawEvent
    length_seconds: float


@dataclass(frozen=True)
class TeamGame:  # pylint: disable=too-many-instance-attributes
    """One team's side of one game.

    Attributes:
        game_id: game identifier
        season: season id
        for_team: team credited with the events of this row
        against_team: the opposing team
        is_home: `for_team` is the designated home team
        rink: rink the game was played in
        asd: average score differential
        nen5v5_seconds: seconds of NEN5v5 play in the game
        rate: events per 3600 seconds of NEN5v5 for every event in `MODEL_EVENTS`
        count: raw NEN5v5 counts for every event in `COUNT_EVENTS`
    """

    game_id: str
    season: str
    for_team: str
    against_team: str
    is_home: bool
    rink: str
    asd: float
    nen5v5_seconds: float
    rate: Dict[str, float] = field(default_factory=dict)
    count: Dict[str, float] = field(default_factory=dict)
