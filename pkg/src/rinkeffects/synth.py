"""Synthetic leagues with planted rink effects.

Rates follow the yearly model's structure: the log rate of a team-game is the sum of
the log planted effects plus noise. Every team plays its home games in its own rink.
"""

### IMPORTS
### ============================================================================
## Future
from __future__ import annotations

## Standard Library
from dataclasses import dataclass, field
import math
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

## Installed
import numpy as np
from pillar.logging import LoggingMixin

## Application
from .effects import ABOVE, BELOW, EffectTable, PersistenceReport
from .exceptions import ConfigError
from .ingest import GameEvents
from .models import (
    PERIOD_SECONDS,
    PRIMARY_EVENTS,
    RATE_BASE_SECONDS,
    REGULATION_SECONDS,
    EventType,
    RawEvent,
    TeamGame,
)
from .rinks import RinkTable
from .teamgame import GOAL_TERMS, TeamGameBuilder, TeamGameOptions, prorate
from .util import derive_seed

### CONSTANTS
### ============================================================================
DEFAULT_MEANS: Dict[str, float] = {
    "BLOCK": 14.0,
    "GIVE": 8.0,
    "HIT": 22.0,
    "MISS": 11.0,
    "SHOT": 28.0,
    "TAKE": 6.0,
}
"""Baseline rates per 3600 NEN5v5 seconds of events without planted truth"""

NOISE_MODES = ("lognormal", "poisson")


### CLASSES
### ============================================================================
@dataclass(frozen=True)
class EventTruth:
    """Planted multiplicative effects of one event.

    Effects not listed are 1.

    Attributes:
        mean: league rate per 3600 NEN5v5 seconds
        asd: effect of one goal of average score differential
        home: home effect
        rink: rink effect per rink
        homer: homer effect per rink
        team_for: effect of the team recording the event
        team_against: effect of the opposing team
    """

    mean: float
    asd: float = 1.0
    home: float = 1.0
    rink: Dict[str, float] = field(default_factory=dict)
    homer: Dict[str, float] = field(default_factory=dict)
    team_for: Dict[str, float] = field(default_factory=dict)
    team_against: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        values = [self.mean, self.asd, self.home]
        for mapping in (self.rink, self.homer, self.team_for, self.team_against):
            values.extend(mapping.values())
        if not all(value > 0 and math.isfinite(value) for value in values):
            raise ConfigError("planted effects must be finite and > 0")
        return

    def log_rate(
        self, rink: str, for_team: str, against_team: str, is_home: bool, asd: float
    ) -> float:
        """Noise free log rate of a team-game"""
        value = (
            math.log(self.mean)
            + math.log(self.rink.get(rink, 1.0))
            + math.log(self.asd) * asd
            + math.log(self.team_for.get(for_team, 1.0))
            + math.log(self.team_against.get(against_team, 1.0))
        )
        if is_home:
            value += math.log(self.home) + math.log(self.homer.get(rink, 1.0))
        return value

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mean": self.mean,
            "asd": self.asd,
            "home": self.home,
            "rink": dict(sorted(self.rink.items())),
            "homer": dict(sorted(self.homer.items())),
            "team_for": dict(sorted(self.team_for.items())),
            "team_against": dict(sorted(self.team_against.items())),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> EventTruth:
        return cls(
            mean=float(data["mean"]),
            asd=float(data.get("asd", 1.0)),
            home=float(data.get("home", 1.0)),
            rink={k: float(v) for k, v in data.get("rink", {}).items()},
            homer={k: float(v) for k, v in data.get("homer", {}).items()},
            team_for={k: float(v) for k, v in data.get("team_for", {}).items()},
            team_against={k: float(v) for k, v in data.get("team_against", {}).items()},
        )


@dataclass(frozen=True)
class SyntheticConfig:  # pylint: disable=too-many-instance-attributes
    """Shape of a synthetic league.

    Attributes:
        seasons: season ids
        games_per_season: games of every season, or one value per season to allow a
            shortened season
        teams: team ids, each team's rink has the same id
        truth: planted effects per primary event, other primary events use
            `DEFAULT_MEANS` with every effect 1
        noise_sd: standard deviation of the Gaussian noise added to log rates
        noise_mode: `"lognormal"` noise or `"poisson"` counts with no log noise
        asd_sd: spread of the home oriented average score differential
        home_asd_shift: center of the home oriented average score differential
        nen5v5_seconds: inclusive range of simulated NEN5v5 seconds per game
        goal_rate: goals per 3600 NEN5v5 seconds per team
        goal_term: goal term of CORSI / FENWICK rates, as `TeamGameOptions.goal_term`
        counts: also emit play-by-play events, team-games are then rebuilt from them
        players_per_team: players credited with a team's events when `counts` is set
        seed: run seed
    """

    seasons: tuple[str, ...] = ("20072008", "20082009", "20092010")
    games_per_season: Union[int, tuple[int, ...]] = 60
    teams: tuple[str, ...] = tuple(f"T{k:02d}" for k in range(1, 9))
    truth: Dict[str, EventTruth] = field(default_factory=lambda: {"HIT": EventTruth(22.0)})
    noise_sd: float = 0.35
    noise_mode: str = "lognormal"
    asd_sd: float = 0.9
    home_asd_shift: float = 0.1
    nen5v5_seconds: tuple[int, int] = (2400, 3000)
    goal_rate: float = 2.2
    goal_term: str = "raw"
    counts: bool = False
    players_per_team: int = 4
    seed: int = 0

    def __post_init__(self) -> None:
        # pylint: disable=too-many-branches
        if not self.seasons or len(set(self.seasons)) != len(self.seasons):
            raise ConfigError("seasons must be non-empty and unique")
        if len(self.teams) < 2 or len(set(self.teams)) != len(self.teams):
            raise ConfigError("need at least 2 unique teams")
        games = self.season_games
        if len(games) != len(self.seasons):
            raise ConfigError("games_per_season must have one value per season")
        if any(n < len(self.teams) / 2 for n in games):
            raise ConfigError(f"every season needs at least {len(self.teams) / 2:g} games")
        unknown = set(self.truth) - set(PRIMARY_EVENTS)
        if unknown:
            raise ConfigError(
                f"truth can only be planted on {PRIMARY_EVENTS}, got {sorted(unknown)}"
            )
        for event, truth in self.truth.items():
            for mapping in (truth.rink, truth.homer, truth.team_for, truth.team_against):
                if set(mapping) - set(self.teams):
                    raise ConfigError(f"{event} truth names unknown teams / rinks")
        if self.noise_mode not in NOISE_MODES:
            raise ConfigError(f"noise_mode must be one of {NOISE_MODES}")
        if self.goal_term not in GOAL_TERMS:
            raise ConfigError(f"goal_term must be one of {GOAL_TERMS}")
        if self.noise_sd < 0 or self.asd_sd < 0 or self.goal_rate < 0:
            raise ConfigError("noise_sd, asd_sd and goal_rate must be >= 0")
        low, high = self.nen5v5_seconds
        if not 0 < low <= high <= REGULATION_SECONDS:
            raise ConfigError(
                f"nen5v5_seconds must satisfy 0 < low <= high <= {REGULATION_SECONDS}"
            )
        if self.players_per_team < 1:
            raise ConfigError("players_per_team must be >= 1")
        return

    @property
    def season_games(self) -> tuple[int, ...]:
        if isinstance(self.games_per_season, int):
            return (self.games_per_season,) * len(self.seasons)
        return tuple(self.games_per_season)

    def event_truth(self, event: str) -> EventTruth:
        return self.truth.get(event, EventTruth(DEFAULT_MEANS[event]))

    def truth_record(self) -> Dict[str, Any]:
        """Structured record of the planted truth"""
        return {
            "seed": self.seed,
            "seasons": list(self.seasons),
            "games_per_season": list(self.season_games),
            "teams": list(self.teams),
            "noise_sd": self.noise_sd,
            "noise_mode": self.noise_mode,
            "events": {event: self.truth[event].to_dict() for event in sorted(self.truth)},
        }


@dataclass(frozen=True)
class SyntheticData:
    """Generated league.

    Attributes:
        team_games: observations ordered by season then game
        events: play-by-play events per game, empty unless `config.counts`
        config: the generating configuration
    """

    team_games: List[TeamGame]
    events: GameEvents
    config: SyntheticConfig

    @property
    def truth(self) -> Dict[str, EventTruth]:
        return dict(self.config.truth)


class SyntheticLeague(LoggingMixin):
    """Generator of synthetic seasons.

    Each season draws from its own random stream derived from the run seed, so seasons
    are independent of each other and of the order they are generated in.
    """

    def __init__(self, config: SyntheticConfig | None = None) -> None:
        self.config = config if config is not None else SyntheticConfig()
        self.logger = self.get_logger()
        return

    def generate(self) -> SyntheticData:
        """Generate every season"""
        team_games: List[TeamGame] = []
        events: GameEvents = {}
        for season, n_games in zip(self.config.seasons, self.config.season_games):
            rng = np.random.default_rng(derive_seed(self.config.seed, "synth", season))
            if self.config.counts:
                games = self._season_events(season, n_games, rng)
                builder = TeamGameBuilder(self._options())
                team_games.extend(builder.build(games))
                events.update(games)
            else:
                team_games.extend(self._season_rates(season, n_games, rng))
            self.debug(f"Generated {n_games} games for {season}")
        self.info(f"Generated {len(team_games)} team-games over {len(self.config.seasons)} seasons")
        return SyntheticData(team_games, events, self.config)

    def _options(self) -> TeamGameOptions:
        return TeamGameOptions(goal_term=self.config.goal_term, rinks=RinkTable())

    def _schedule(self, n_games: int, rng: np.random.Generator) -> List[Tuple[str, str]]:
        """`(home, away)` pairs, cycling through shuffled ordered pairs"""
        teams = self.config.teams
        pairs = [(home, away) for home in teams for away in teams if home != away]
        schedule: List[Tuple[str, str]] = []
        while len(schedule) < n_games:
            order = rng.permutation(len(pairs))
            schedule.extend(pairs[i] for i in order[: n_games - len(schedule)])
        return schedule

    def _seconds(self, rng: np.random.Generator) -> int:
        low, high = self.config.nen5v5_seconds
        return int(rng.integers(low, high + 1))

    def _log_noise(self, rng: np.random.Generator) -> float:
        if self.config.noise_mode == "lognormal" and self.config.noise_sd > 0:
            return float(rng.normal(0.0, self.config.noise_sd))
        return 0.0

    def _primary_counts(
        self,
        home: str,
        away: str,
        home_asd: float,
        seconds: int,
        rng: np.random.Generator,
    ) -> Dict[bool, Dict[str, float]]:
        """Rates of every primary event for both rows, keyed by `is_home`.

        Returns rates directly in lognormal mode and prorated Poisson counts otherwise.
        """
        rates: Dict[bool, Dict[str, float]] = {True: {}, False: {}}
        for event in PRIMARY_EVENTS:
            truth = self.config.event_truth(event)
            for is_home, for_team, against_team, asd in (
                (True, home, away, home_asd),
                (False, away, home, -home_asd),
            ):
                log_rate = truth.log_rate(home, for_team, against_team, is_home, asd)
                expected = math.exp(log_rate + self._log_noise(rng))
                if self.config.noise_mode == "poisson":
                    count = float(rng.poisson(expected * seconds / RATE_BASE_SECONDS))
                    rates[is_home][event] = prorate(count, seconds)
                else:
                    rates[is_home][event] = expected
        return rates

    ## Rate level generation
    ## -------------------------------------------------------------------------
    def _season_rates(self, season: str, n_games: int, rng: np.random.Generator) -> List[TeamGame]:
        team_games: List[TeamGame] = []
        for number, (home, away) in enumerate(self._schedule(n_games, rng), start=1):
            game_id = f"{season}{number:04d}"
            seconds = self._seconds(rng)
            home_asd = float(rng.normal(self.config.home_asd_shift, self.config.asd_sd))
            rates = self._primary_counts(home, away, home_asd, seconds, rng)
            goals = {
                is_home: float(rng.poisson(self.config.goal_rate * seconds / RATE_BASE_SECONDS))
                for is_home in (True, False)
            }
            for is_home, for_team, against_team, asd in (
                (True, home, away, home_asd),
                (False, away, home, -home_asd),
            ):
                rate = dict(rates[is_home])
                count = {event: rate[event] * seconds / RATE_BASE_SECONDS for event in rate}
                count["GOAL"] = goals[is_home]
                goal_term = (
                    goals[is_home]
                    if self.config.goal_term == "raw"
                    else prorate(goals[is_home], seconds)
                )
                rate["CORSI"] = rate["SHOT"] + rate["MISS"] + rate["BLOCK"] + goal_term
                rate["FENWICK"] = rate["SHOT"] + rate["MISS"] + goal_term
                rate["TURN"] = rate["TAKE"] + rates[not is_home]["GIVE"]
                count["CORSI"] = count["SHOT"] + count["MISS"] + count["BLOCK"] + count["GOAL"]
                count["FENWICK"] = count["SHOT"] + count["MISS"] + count["GOAL"]
                opponent_gives = rates[not is_home]["GIVE"] * seconds / RATE_BASE_SECONDS
                count["TURN"] = count["TAKE"] + opponent_gives
                team_games.append(
                    TeamGame(
                        game_id=game_id,
                        season=season,
                        for_team=for_team,
                        against_team=against_team,
                        is_home=is_home,
                        rink=home,
                        asd=asd,
                        nen5v5_seconds=float(seconds),
                        rate=rate,
                        count=count,
                    )
                )
        return team_games

    ## Event level generation
    ## -------------------------------------------------------------------------
    def _season_events(self, season: str, n_games: int, rng: np.random.Generator) -> GameEvents:
        games: GameEvents = {}
        for number, (home, away) in enumerate(self._schedule(n_games, rng), start=1):
            game_id = f"{season}{number:04d}"
            games[game_id] = self._game_events(season, game_id, home, away, rng)
        return games

    def _game_events(
        self, season: str, game_id: str, home: str, away: str, rng: np.random.Generator
    ) -> List[RawEvent]:
        """Events of one game.

        NEN5v5 play runs from the opening faceoff until `seconds`, the rest of
        regulation is a home power play. Goals are placed first and fix the average
        score differential that the other event rates are drawn with.
        """
        # pylint: disable=too-many-locals
        seconds = self._seconds(rng)
        faceoffs = sorted({0, PERIOD_SECONDS, 2 * PERIOD_SECONDS, seconds} - {REGULATION_SECONDS})
        available = np.setdiff1d(np.arange(1, seconds), faceoffs)

        expected_goals = self.config.goal_rate * seconds / RATE_BASE_SECONDS
        n_home_goals = int(rng.poisson(expected_goals))
        n_away_goals = int(rng.poisson(expected_goals))
        goal_times = rng.choice(available, size=n_home_goals + n_away_goals, replace=False)
        home_goal_times = sorted(int(t) for t in goal_times[:n_home_goals])
        away_goal_times = sorted(int(t) for t in goal_times[n_home_goals:])
        home_asd = (
            sum(REGULATION_SECONDS - t for t in home_goal_times)
            - sum(REGULATION_SECONDS - t for t in away_goal_times)
        ) / REGULATION_SECONDS

        rates = self._primary_counts(home, away, home_asd, seconds, rng)
        planned: List[Tuple[EventType, str]] = []
        for is_home, team in ((True, home), (False, away)):
            for event in PRIMARY_EVENTS:
                count = int(round(rates[is_home][event] * seconds / RATE_BASE_SECONDS))
                planned.extend((EventType(event), team) for _ in range(count))

        remaining = np.setdiff1d(available, goal_times)
        if len(planned) > remaining.size:
            raise ConfigError(f"game {game_id}: {len(planned)} events do not fit in {seconds}s")
        times = rng.choice(remaining, size=len(planned), replace=False)
        players = rng.integers(1, self.config.players_per_team + 1, size=len(planned))

        timeline: List[Tuple[int, EventType, Optional[str], Optional[str]]] = [
            (t, EventType.FAC, None, None) for t in faceoffs
        ]
        for t in home_goal_times:
            timeline.append((t, EventType.GOAL, home, None))
        for t in away_goal_times:
            timeline.append((t, EventType.GOAL, away, None))
        for (event_type, team), t, player in zip(planned, times, players):
            timeline.append((int(t), event_type, team, f"{team} P{int(player):02d}"))
        timeline.sort(key=lambda item: item[0])

        events = []
        for t, event_type, team, player in timeline:
            if event_type is EventType.GOAL:
                player = f"{team} P{int(rng.integers(1, self.config.players_per_team + 1)):02d}"
            power_play = t >= seconds
            events.append(
                RawEvent(
                    season=season,
                    game_id=game_id,
                    period=min(3, t // PERIOD_SECONDS + 1),
                    elapsed_seconds=t,
                    event_type=event_type,
                    event_team=team,
                    home_team=home,
                    away_team=away,
                    home_score=sum(1 for g in home_goal_times if g <= t),
                    away_score=sum(1 for g in away_goal_times if g <= t),
                    home_skaters=5,
                    away_skaters=4 if power_play else 5,
                    home_goalie_on=True,
                    away_goalie_on=True,
                    player=player,
                )
            )
        return events


@dataclass(frozen=True)
class RecoveryError:
    """Accuracy of estimated rink effects against planted ones.

    Attributes:
        max_log_error: largest `|log(estimate) - log(truth)|` over planted effects
        mean_log_error: mean of the same
        false_positives: effects estimated away from 1 where the truth is 1
        false_negatives: planted effects estimated as exactly 1
        log_errors: error of every planted `(event, rink)`
    """

    max_log_error: float
    mean_log_error: float
    false_positives: int
    false_negatives: int
    log_errors: Dict[Tuple[str, str], float] = field(default_factory=dict)


@dataclass(frozen=True)
class PersistenceScore:
    """Persistence classification against planted rink effects.

    Attributes:
        planted: planted (event, rink) pairs
        recovered: planted pairs classified persistent in the planted direction
        false_positives: null pairs classified persistent
    """

    planted: int
    recovered: int
    false_positives: int

    @property
    def recovery_rate(self) -> float:
        return self.recovered / self.planted if self.planted else 1.0


### FUNCTIONS
### ============================================================================
def generate_team_games(config: SyntheticConfig | None = None) -> SyntheticData:
    """Generate a synthetic league.

    Shortcut for `SyntheticLeague(config).generate()`.
    """
    return SyntheticLeague(config).generate()


def recovery_error(
    truth: Mapping[str, EventTruth], tables: Mapping[str, EffectTable]
) -> RecoveryError:
    """Compare estimated rink effects with the planted truth.

    Args:
        truth: planted effects per event
        tables: one effect table (usually pooled) per event

    Raises:
        ValueError: the events differ, or the truth names a rink the table lacks
    """
    if set(truth) != set(tables):
        raise ValueError(f"truth events {sorted(truth)} != estimated {sorted(tables)}")

    log_errors: Dict[Tuple[str, str], float] = {}
    false_positives = 0
    false_negatives = 0
    for event, event_truth in sorted(truth.items()):
        estimated = tables[event].rink_effect
        missing = set(event_truth.rink) - set(estimated)
        if missing:
            raise ValueError(f"{event}: no estimate for rinks {sorted(missing)}")
        for rink, effect in estimated.items():
            planted = event_truth.rink.get(rink, 1.0)
            if planted != 1.0:
                log_errors[(event, rink)] = abs(math.log(effect) - math.log(planted))
                false_negatives += int(effect == 1.0)
            else:
                false_positives += int(effect != 1.0)

    errors = list(log_errors.values())
    return RecoveryError(
        max_log_error=max(errors) if errors else 0.0,
        mean_log_error=float(np.mean(errors)) if errors else 0.0,
        false_positives=false_positives,
        false_negatives=false_negatives,
        log_errors=log_errors,
    )


def score_persistence(
    truth: Mapping[str, EventTruth], reports: Sequence[PersistenceReport]
) -> PersistenceScore:
    """Score persistence classifications against the planted rink effects"""
    planted = recovered = false_positives = 0
    for report in reports:
        event_truth = truth.get(report.event)
        for rink, entry in report.entries.items():
            effect = event_truth.rink.get(rink, 1.0) if event_truth is not None else 1.0
            if effect == 1.0:
                false_positives += int(entry.persistent)
                continue
            planted += 1
            expected = ABOVE if effect > 1.0 else BELOW
            recovered += int(entry.direction == expected)
    return PersistenceScore(planted, recovered, false_positives)


def truth_from_record(record: Mapping[str, Any]) -> Dict[str, EventTruth]:
    """Planted truth from a record produced by `SyntheticConfig.truth_record`"""
    return {event: EventTruth.from_dict(data) for event, data in record["events"].items()}
