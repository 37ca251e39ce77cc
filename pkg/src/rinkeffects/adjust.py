"""Rink adjusted event counts.

Every event recorded at a rink with a persistent effect is weighted by the reciprocal
of the pooled effect, and home team events at rinks with a persistent homer effect are
additionally weighted by the reciprocal of the homer effect.
"""

### IMPORTS
### ============================================================================
## Future
from __future__ import annotations

## Standard Library
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

## Installed

## Application
from .effects import PersistenceReport
from .exceptions import AdjustmentError
from .models import MODEL_EVENTS, EventType, RawEvent, TeamGame
from .rinks import RinkTable

### CONSTANTS
### ============================================================================
PLAYER_EVENT_TYPES: Dict[str, tuple[EventType, ...]] = {
    "BLOCK": (EventType.BLOCK,),
    "GIVE": (EventType.GIVE,),
    "HIT": (EventType.HIT,),
    "MISS": (EventType.MISS,),
    "SHOT": (EventType.SHOT,),
    "TAKE": (EventType.TAKE,),
    "CORSI": (EventType.SHOT, EventType.MISS, EventType.BLOCK, EventType.GOAL),
    "FENWICK": (EventType.SHOT, EventType.MISS, EventType.GOAL),
}
"""Recorded event types credited to a player for each adjustable event"""

WeightKey = Tuple[str, str, bool]


### FUNCTIONS
### ============================================================================
def event_weight(rink: str, event: str, is_home: bool, report: PersistenceReport) -> float:
    """Multiplier applied to one recorded event.

    Args:
        rink: rink the event was recorded at
        event: event type
        is_home: the event was credited to the home team
        report: persistence report of `event`

    Returns:
        1 when the rink effect is not persistent, otherwise `1 / pooled_effect`, or
        `1 / (pooled_effect * pooled_homer_effect)` for home events at a rink with a
        persistent homer effect.

    Raises:
        AdjustmentError: the report is for another event or does not cover `rink`
    """
    if report.event != event:
        raise AdjustmentError(f"report is for {report.event}, not {event}")
    entry = report.entries.get(rink)
    if entry is None:
        raise AdjustmentError(f"rink {rink!r} has no {event} persistence entry")
    if not entry.persistent:
        return 1.0
    if is_home and entry.homer_persistent:
        return 1.0 / (entry.pooled_effect * entry.pooled_homer_effect)
    return 1.0 / entry.pooled_effect


def adjust_player_counts(
    events: Iterable[RawEvent],
    report: PersistenceReport,
    season: str,
    event: str,
    rinks: RinkTable | None = None,
) -> AdjustedCounts:
    """Rink adjusted per player counts of one season.

    Args:
        events: play-by-play events carrying player attribution
        report: persistence report of `event`
        season: season to count
        event: event to count, any key of `PLAYER_EVENT_TYPES`
        rinks: rink lookup, defaults to `RinkTable.default()`

    Returns:
        Rows sorted by adjusted count (descending) then player, plus the number of
        matching events without a player

    Raises:
        AdjustmentError: `event` cannot be credited to players, or a rink is not covered
    """
    if event not in PLAYER_EVENT_TYPES:
        raise AdjustmentError(f"{event} cannot be attributed to players")
    if rinks is None:
        rinks = RinkTable.default()
    event_types = PLAYER_EVENT_TYPES[event]

    adjusted: Dict[str, float] = {}
    raw: Dict[str, int] = {}
    teams: Dict[str, List[str]] = {}
    skipped = 0
    for recorded in events:
        if recorded.season != season or recorded.event_type not in event_types:
            continue
        if recorded.player is None:
            skipped += 1
            continue
        rink = rinks.lookup(season, recorded.home_team)
        weight = event_weight(rink, event, recorded.event_team == recorded.home_team, report)
        player = recorded.player
        adjusted[player] = adjusted.get(player, 0.0) + weight
        raw[player] = raw.get(player, 0) + 1
        player_teams = teams.setdefault(player, [])
        if recorded.event_team is not None and recorded.event_team not in player_teams:
            player_teams.append(recorded.event_team)

    rows = [
        AdjustedCountRow(
            name=player,
            team=", ".join(teams[player]),
            event=event,
            adjusted=adjusted[player],
            raw=raw[player],
        )
        for player in adjusted
    ]
    rows.sort(key=lambda row: (-row.adjusted, row.name))
    return AdjustedCounts(event=event, season=season, rows=tuple(rows), skipped=skipped)


def adjust_corsi_pct(
    team_games: Sequence[TeamGame],
    report: PersistenceReport,
    season: str,
    *,
    event: str = "CORSI",
) -> List[CorsiPctRow]:
    """Raw and rink adjusted share of events per team.

    Each team-game's count is weighted by its rink's weight, so both the for and the
    against side of every game move together.

    Args:
        team_games: observations
        report: persistence report of `event`
        season: season to aggregate
        event: event whose share is computed

    Returns:
        One row per team sorted by team, percentages at full precision
    """
    if event not in MODEL_EVENTS:
        raise AdjustmentError(f"unknown event {event!r}")

    raw_for: Dict[str, float] = {}
    raw_against: Dict[str, float] = {}
    adjusted_for: Dict[str, float] = {}
    adjusted_against: Dict[str, float] = {}
    for team_game in team_games:
        if team_game.season != season:
            continue
        count = team_game.count[event]
        weighted = count * event_weight(team_game.rink, event, team_game.is_home, report)
        for totals, team, value in (
            (raw_for, team_game.for_team, count),
            (raw_against, team_game.against_team, count),
            (adjusted_for, team_game.for_team, weighted),
            (adjusted_against, team_game.against_team, weighted),
        ):
            totals[team] = totals.get(team, 0.0) + value

    rows = []
    for team in sorted(set(raw_for) | set(raw_against)):
        rows.append(
            CorsiPctRow(
                team=team,
                event=event,
                raw_pct=_share(raw_for.get(team, 0.0), raw_against.get(team, 0.0)),
                adjusted_pct=_share(adjusted_for.get(team, 0.0), adjusted_against.get(team, 0.0)),
            )
        )
    return rows


def _share(for_: float, against: float) -> float:
    total = for_ + against
    return for_ / total if total > 0 else float("nan")


### CLASSES
### ============================================================================
@dataclass(frozen=True)
class AdjustmentWeights:
    """Weights for every `(rink, event, is_home)` covered by a set of reports"""

    weights: Dict[WeightKey, float] = field(default_factory=dict)

    @classmethod
    def from_reports(cls, reports: Iterable[PersistenceReport]) -> AdjustmentWeights:
        weights: Dict[WeightKey, float] = {}
        for report in reports:
            for rink in report.entries:
                for is_home in (False, True):
                    weights[(rink, report.event, is_home)] = event_weight(
                        rink, report.event, is_home, report
                    )
        return cls(weights)

    def weight(self, rink: str, event: str, is_home: bool) -> float:
        """Get a weight

        Raises:
            AdjustmentError: no report covered this rink and event
        """
        try:
            return self.weights[(rink, event, is_home)]
        except KeyError:
            raise AdjustmentError(f"no weight for rink {rink!r}, event {event}") from None

    def non_identity(self) -> Mapping[WeightKey, float]:
        """Weights that change counts"""
        return {key: value for key, value in self.weights.items() if value != 1.0}


@dataclass(frozen=True)
class AdjustedCountRow:
    """Adjusted count of one player"""

    name: str
    team: str
    event: str
    adjusted: float
    raw: int

    @property
    def differential(self) -> float:
        return self.adjusted - self.raw


@dataclass(frozen=True)
class AdjustedCounts:
    """Ranked adjusted counts.

    Attributes:
        skipped: matching events without player attribution
    """

    event: str
    season: str
    rows: tuple[AdjustedCountRow, ...]
    skipped: int = 0


@dataclass(frozen=True)
class CorsiPctRow:
    """Raw and adjusted event share of one team"""

    team: str
    event: str
    raw_pct: float
    adjusted_pct: float
