"""Aggregation of games into team-game observations."""

### IMPORTS
### ============================================================================
## Future
from __future__ import annotations

## Standard Library
from collections import Counter
from dataclasses import dataclass, field
from typing import List, Mapping, Tuple

## Installed
from pillar.logging import LoggingMixin

## Application
from .exceptions import ConfigError, GameRejectedError, IntervalError
from .ingest import compute_intervals, filter_nen5v5
from .models import (
    PRIMARY_EVENTS,
    RATE_BASE_SECONDS,
    REGULATION_SECONDS,
    EventInterval,
    EventType,
    RawEvent,
    TeamGame,
)
from .rinks import RinkTable

### CONSTANTS
### ============================================================================
ASD_ORIENTATIONS = ("for-team", "home")
GOAL_TERMS = ("raw", "prorated")
NEUTRAL_SITE_MODES = ("designated-home", "exclude")


### FUNCTIONS
### ============================================================================
def prorate(count: float, nen5v5_seconds: float) -> float:
    """Scale an event count to a rate per 3600 seconds of NEN5v5 play.

    Raises:
        ValueError: `nen5v5_seconds` is not positive
    """
    if nen5v5_seconds <= 0:
        raise ValueError(f"nen5v5_seconds must be > 0, got {nen5v5_seconds}")
    # multiply first so integer inputs stay exact until the single division
    return count * RATE_BASE_SECONDS / nen5v5_seconds


def compute_asd(intervals: List[EventInterval], orientation: str) -> float:
    """Average score differential of a game.

    The time weighted mean of (home score - away score) over regulation, negated when
    oriented to the away team.

    Args:
        intervals: every interval of the game, at all strengths
        orientation: team id the result is oriented to

    Raises:
        IntervalError: intervals do not cover regulation
        ValueError: `orientation` did not play in the game
    """
    if not intervals:
        raise IntervalError("no intervals")
    total = sum(interval.length_seconds for interval in intervals)
    if abs(total - REGULATION_SECONDS) > 1e-9:
        raise IntervalError(f"intervals cover {total:g}s, expected {REGULATION_SECONDS}s")

    first = intervals[0].event
    if orientation == first.home_team:
        sign = 1.0
    elif orientation == first.away_team:
        sign = -1.0
    else:
        raise ValueError(f"{orientation!r} did not play in game {first.game_id!r}")

    weighted = sum(
        interval.event.score_differential * interval.length_seconds for interval in intervals
    )
    return sign * weighted / REGULATION_SECONDS


def build_team_games(
    intervals: List[EventInterval], options: TeamGameOptions | None = None
) -> Tuple[TeamGame, TeamGame]:
    """Build the home and away observations of one game.

    Args:
        intervals: every interval of the game as produced by `compute_intervals`
        options: aggregation options, defaults to `TeamGameOptions()`

    Returns:
        `(home_row, away_row)`

    Raises:
        GameRejectedError: the game has no NEN5v5 time or is an excluded neutral site game
    """
    # pylint: disable=too-many-locals
    if options is None:
        options = TeamGameOptions()

    first = intervals[0].event
    game_id, season = first.game_id, first.season
    home, away = first.home_team, first.away_team

    if game_id in options.neutral_site_games and options.neutral_sites == "exclude":
        raise GameRejectedError(game_id, "neutral site game")

    nen5v5 = filter_nen5v5(intervals)
    seconds = sum(interval.length_seconds for interval in nen5v5)
    if seconds <= 0:
        raise GameRejectedError(game_id, "no NEN5v5 time")

    counts: Counter[tuple[str | None, EventType]] = Counter(
        (interval.event.event_team, interval.event.event_type) for interval in nen5v5
    )
    rink = options.rinks.lookup(season, home)
    home_asd = compute_asd(intervals, home)

    rows = []
    for for_team, against_team in ((home, away), (away, home)):
        count: dict[str, float] = {}
        for name in PRIMARY_EVENTS:
            count[name] = float(counts[(for_team, EventType(name))])
        count["GOAL"] = float(counts[(for_team, EventType.GOAL)])
        count["CORSI"] = count["SHOT"] + count["MISS"] + count["BLOCK"] + count["GOAL"]
        count["FENWICK"] = count["SHOT"] + count["MISS"] + count["GOAL"]
        count["TURN"] = count["TAKE"] + float(counts[(against_team, EventType.GIVE)])

        rate = {name: prorate(count[name], seconds) for name in PRIMARY_EVENTS}
        if options.goal_term == "raw":
            goal_term = count["GOAL"]
        else:
            goal_term = prorate(count["GOAL"], seconds)
        rate["CORSI"] = rate["SHOT"] + rate["MISS"] + rate["BLOCK"] + goal_term
        rate["FENWICK"] = rate["SHOT"] + rate["MISS"] + goal_term
        rate["TURN"] = prorate(count["TURN"], seconds)

        is_home = for_team == home
        if is_home or options.asd_orientation == "home":
            asd = home_asd
        else:
            asd = -home_asd

        rows.append(
            TeamGame(
                game_id=game_id,
                season=season,
                for_team=for_team,
                against_team=against_team,
                is_home=is_home,
                rink=rink,
                asd=asd,
                nen5v5_seconds=seconds,
                rate=rate,
                count=count,
            )
        )
    return rows[0], rows[1]


### CLASSES
### ============================================================================
@dataclass(frozen=True)
class TeamGameOptions:
    """Options controlling how games are aggregated.

    Attributes:
        asd_orientation: `"for-team"` negates ASD on the away row, `"home"` keeps the
            home oriented value on both rows
        goal_term: add `"raw"` or `"prorated"` goal counts to CORSI / FENWICK rates
        neutral_sites: `"designated-home"` uses the designated home team's rink for
            neutral site games, `"exclude"` drops them
        neutral_site_games: game ids played at neutral sites
        rinks: rink lookup table
    """

    asd_orientation: str = "for-team"
    goal_term: str = "raw"
    neutral_sites: str = "designated-home"
    neutral_site_games: frozenset[str] = frozenset()
    rinks: RinkTable = field(default_factory=RinkTable.default)

    def __post_init__(self) -> None:
        if self.asd_orientation not in ASD_ORIENTATIONS:
            raise ConfigError(f"asd_orientation must be one of {ASD_ORIENTATIONS}")
        if self.goal_term not in GOAL_TERMS:
            raise ConfigError(f"goal_term must be one of {GOAL_TERMS}")
        if self.neutral_sites not in NEUTRAL_SITE_MODES:
            raise ConfigError(f"neutral_sites must be one of {NEUTRAL_SITE_MODES}")
        return


class TeamGameBuilder(LoggingMixin):
    """Turns parsed games into team-game observations, dropping unusable games.

    Attributes:
        options: aggregation options
        rejected: reasons for every game dropped by the last `build`
    """

    def __init__(self, options: TeamGameOptions | None = None) -> None:
        self.options = options if options is not None else TeamGameOptions()
        self.rejected: dict[str, str] = {}
        self.logger = self.get_logger()
        return

    def build(self, games: Mapping[str, List[RawEvent]]) -> List[TeamGame]:
        """Build team-games for every game.

        Output is ordered by `(season, game_id)` with the home row first.
        """
        self.rejected = {}
        team_games: List[TeamGame] = []
        for game_id in sorted(games, key=lambda g: (games[g][0].season, g)):
            try:
                intervals = compute_intervals(games[game_id])
                team_games.extend(build_team_games(intervals, self.options))
            except (GameRejectedError, IntervalError) as e:
                reason = e.reason if isinstance(e, GameRejectedError) else str(e)
                self.warning(f"Dropping game {game_id}: {reason}")
                self.rejected[game_id] = reason
        self.info(f"Built {len(team_games)} team-games from {len(games)} games")
        return team_games
