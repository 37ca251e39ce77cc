### IMPORTS
### ============================================================================
## Future
from __future__ import annotations

## Standard Library
from typing import Dict, Optional

## Installed

## Application
from rinkeffects.effects import PersistenceEntry, PersistenceReport
from rinkeffects.models import COUNT_EVENTS, MODEL_EVENTS, EventType, RawEvent, TeamGame

### CONSTANTS
### ============================================================================
HOME = "HOM"
AWAY = "AWY"


### FUNCTIONS
### ============================================================================
def make_event(
    elapsed: int,
    event_type: str = "OTHER",
    team: Optional[str] = None,
    *,
    period: Optional[int] = None,
    season: str = "20122013",
    game_id: str = "G1",
    home: str = HOME,
    away: str = AWAY,
    home_score: int = 0,
    away_score: int = 0,
    home_skaters: int = 5,
    away_skaters: int = 5,
    home_goalie_on: bool = True,
    away_goalie_on: bool = True,
    player: Optional[str] = None,
) -> RawEvent:
    if period is None:
        period = min(3, elapsed // 1200 + 1)
    return RawEvent(
        season=season,
        game_id=game_id,
        period=period,
        elapsed_seconds=elapsed,
        event_type=EventType(event_type),
        event_team=team,
        home_team=home,
        away_team=away,
        home_score=home_score,
        away_score=away_score,
        home_skaters=home_skaters,
        away_skaters=away_skaters,
        home_goalie_on=home_goalie_on,
        away_goalie_on=away_goalie_on,
        player=player,
    )


def make_team_game(
    game_id: str,
    for_team: str,
    against_team: str,
    is_home: bool,
    *,
    season: str = "20122013",
    rink: Optional[str] = None,
    asd: float = 0.0,
    rate: Optional[Dict[str, float]] = None,
    count: Optional[Dict[str, float]] = None,
) -> TeamGame:
    if rink is None:
        rink = for_team if is_home else against_team
    rates = {event: 10.0 for event in MODEL_EVENTS}
    rates.update(rate or {})
    counts = {event: 5.0 for event in COUNT_EVENTS}
    counts.update(count or {})
    return TeamGame(
        game_id=game_id,
        season=season,
        for_team=for_team,
        against_team=against_team,
        is_home=is_home,
        rink=rink,
        asd=asd,
        nen5v5_seconds=3000.0,
        rate=rates,
        count=counts,
    )


def make_entry(
    rink: str,
    event: str = "HIT",
    *,
    pooled: float = 1.0,
    homer: float = 1.0,
    persistent: Optional[bool] = None,
    homer_persistent: Optional[bool] = None,
) -> PersistenceEntry:
    """Entry whose persistence defaults to `effect != 1`"""
    if persistent is None:
        persistent = pooled != 1.0
    if homer_persistent is None:
        homer_persistent = homer != 1.0
    return PersistenceEntry(
        rink=rink,
        event=event,
        persistent=persistent,
        direction=(("above" if pooled > 1 else "below") if persistent else None),
        pooled_effect=pooled,
        yearly_effects={"20122013": pooled},
        homer_persistent=homer_persistent,
        homer_direction=(("above" if homer > 1 else "below") if homer_persistent else None),
        pooled_homer_effect=homer,
        yearly_homer_effects={"20122013": homer},
    )


def make_report(*entries: PersistenceEntry, event: str = "HIT") -> PersistenceReport:
    return PersistenceReport(
        event=event,
        seasons=("20122013",),
        entries={entry.rink: entry for entry in sorted(entries, key=lambda e: e.rink)},
        asd_effects={"20122013": 1.0},
        home_effects={"20122013": 1.0},
    )
