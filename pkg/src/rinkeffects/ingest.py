"""Play-by-play ingestion.

Parses the flat event file, groups events per game, and turns each game into
`EventInterval`s that account for the 3600 seconds of regulation.
"""

### IMPORTS
### ============================================================================
## Future
from __future__ import annotations

## Standard Library
from typing import IO, Dict, Iterable, List, Union
import os
import re

## Installed
import pandas as pd
from pillar.logging import LoggingMixin

## Application
from .exceptions import (
    DuplicateEventError,
    GameRejectedError,
    InputFileError,
    IntervalError,
    ParseError,
    SchemaError,
)
from .models import (
    PERIOD_SECONDS,
    REGULATION_SECONDS,
    TEAMLESS_EVENTS,
    EventInterval,
    EventType,
    RawEvent,
)
from .util import is_in_range

### CONSTANTS
### ============================================================================
PBP_COLUMNS: tuple[str, ...] = (
    "season",
    "game_id",
    "period",
    "elapsed_seconds",
    "event_type",
    "event_team",
    "home_team",
    "away_team",
    "home_score",
    "away_score",
    "home_skaters",
    "away_skaters",
    "home_goalie_on",
    "away_goalie_on",
)
"""Required columns of the play-by-play file, in order"""

PLAYER_COLUMN = "player"
"""Optional trailing column crediting a player with the event"""

STRENGTH_COLUMNS: tuple[str, ...] = (
    "home_skaters",
    "away_skaters",
    "home_goalie_on",
    "away_goalie_on",
)
"""Columns describing the manpower on ice; a game missing any of them is rejected"""

_BOOLEANS = {"1": True, "0": False}

PbpSource = Union[str, "os.PathLike[str]", IO[bytes], IO[str]]
GameEvents = Dict[str, List[RawEvent]]


### FUNCTIONS
### ============================================================================
def parse_pbp(source: PbpSource, *, strict: bool = False) -> GameEvents:
    """Parse a play-by-play file into events grouped by game.

    Shortcut for `PbpParser(strict=strict).parse(source)`.

    Args:
        source: path or open (byte) stream of the delimited file
        strict: raise instead of dropping games that cannot be used

    Returns:
        Events per game id, each list sorted by `(period, elapsed_seconds)`
    """
    return PbpParser(strict=strict).parse(source)


def serialize_pbp(games: GameEvents | Iterable[RawEvent], target: PbpSource) -> None:
    """Write events in the play-by-play file format.

    The `player` column is written only if at least one event carries a player.

    Args:
        games: events grouped by game or a flat iterable of events
        target: path or writable text stream
    """
    if isinstance(games, dict):
        events = [event for game in games.values() for event in game]
    else:
        events = list(games)

    with_player = any(event.player is not None for event in events)
    columns = list(PBP_COLUMNS) + ([PLAYER_COLUMN] if with_player else [])

    rows = []
    for event in events:
        row = [
            event.season,
            event.game_id,
            str(event.period),
            str(event.elapsed_seconds),
            event.event_type.value,
            event.event_team or "",
            event.home_team,
            event.away_team,
            str(event.home_score),
            str(event.away_score),
            str(event.home_skaters),
            str(event.away_skaters),
            "1" if event.home_goalie_on else "0",
            "1" if event.away_goalie_on else "0",
        ]
        if with_player:
            row.append(event.player or "")
        rows.append(row)

    frame = pd.DataFrame(rows, columns=columns, dtype=str)
    frame.to_csv(target, index=False, lineterminator="\n")  # type: ignore[arg-type]
    return


def compute_intervals(events: List[RawEvent]) -> List[EventInterval]:
    """Compute the length of time belonging to each event of one game.

    Only events in periods 1-3 take part. The length of an event is the time until
    the next event; the final event extends to the end of regulation.

    Args:
        events: events of a single game in recorded order

    Raises:
        IntervalError: timestamps decrease or the intervals do not cover regulation
    """
    regulation = [event for event in events if event.period <= 3]
    if not regulation:
        raise IntervalError("no events in regulation")

    for previous, current in zip(regulation, regulation[1:]):
        if current.elapsed_seconds < previous.elapsed_seconds:
            raise IntervalError(
                f"game {current.game_id!r}: event at {current.elapsed_seconds}s "
                f"follows event at {previous.elapsed_seconds}s"
            )

    intervals: List[EventInterval] = []
    for current, following in zip(regulation, regulation[1:]):
        length = following.elapsed_seconds - current.elapsed_seconds
        intervals.append(EventInterval(current, float(length)))
    last = regulation[-1]
    intervals.append(EventInterval(last, float(REGULATION_SECONDS - last.elapsed_seconds)))

    total = sum(interval.length_seconds for interval in intervals)
    if total != REGULATION_SECONDS:
        raise IntervalError(
            f"game {last.game_id!r}: intervals cover {total:g}s, expected {REGULATION_SECONDS}s"
        )
    return intervals


def filter_nen5v5(intervals: Iterable[EventInterval]) -> List[EventInterval]:
    """Keep only intervals of non-empty-net five-on-five regulation play"""
    return [interval for interval in intervals if interval.event.is_nen5v5]


### CLASSES
### ============================================================================
class PbpParser(LoggingMixin):
    """Parser for play-by-play files.

    Attributes:
        strict: raise `GameRejectedError` instead of dropping unusable games
        rejected: reasons for every game dropped by the last `parse`
        period_mismatches: number of events whose timestamp lies outside their period
    """

    def __init__(self, *, strict: bool = False) -> None:
        self.strict = strict
        self.rejected: dict[str, str] = {}
        self.period_mismatches = 0
        self.logger = self.get_logger()
        return

    def parse(self, source: PbpSource) -> GameEvents:
        """Parse the given file.

        Raises:
            InputFileError: `source` is a path that does not exist
            SchemaError: header is wrong, the file is not UTF-8 or a row has extra fields
            ParseError: a row is malformed
            DuplicateEventError: the same event appears twice
            GameRejectedError: game has no regulation events or lacks strength data
                (only if `strict`)
        """
        if isinstance(source, (str, os.PathLike)) and not os.path.isfile(source):
            raise InputFileError(os.fspath(source))

        frame = _read_frame(source)
        columns = tuple(frame.columns)
        if columns not in (PBP_COLUMNS, PBP_COLUMNS + (PLAYER_COLUMN,)):
            raise SchemaError(f"unexpected header {','.join(columns)}")

        self.rejected = {}
        self.period_mismatches = 0
        games: GameEvents = {}
        seen: dict[tuple, int] = {}

        for index, values in enumerate(frame.itertuples(index=False, name=None)):
            line = index + 2
            row = dict(zip(columns, values))
            missing = [column for column in STRENGTH_COLUMNS if not row[column]]
            if missing and row["game_id"]:
                if row["game_id"] not in self.rejected:
                    self.reject(row["game_id"], f"line {line}: no {', '.join(missing)}")
                continue

            event = self.parse_row(row, line)
            key = (
                event.game_id,
                event.period,
                event.elapsed_seconds,
                event.event_type,
                event.event_team,
                event.player,
            )
            if key in seen:
                raise DuplicateEventError(event.game_id, line, seen[key])
            seen[key] = line
            games.setdefault(event.game_id, []).append(event)

        result: GameEvents = {}
        for game_id, events in games.items():
            if game_id in self.rejected:
                continue
            events.sort(key=lambda e: (e.period, e.elapsed_seconds))
            if all(event.period > 3 for event in events):
                self.reject(game_id, "events only in periods > 3")
                continue
            result[game_id] = events

        self.info(f"Parsed {len(result)} games ({len(self.rejected)} rejected)")
        if self.period_mismatches:
            self.warning(f"{self.period_mismatches} events recorded outside their period")
        return result

    def parse_row(self, row: dict[str, str], line: int) -> RawEvent:
        """Parse a single row.

        Args:
            row: column name to raw value
            line: line number used in error messages
        """
        # pylint: disable=too-many-locals
        season = _required(row, "season", line)
        game_id = _required(row, "game_id", line)
        period = _integer(row, "period", line, 1, None)
        elapsed = _integer(row, "elapsed_seconds", line, 0, None)
        if period <= 3 and elapsed > REGULATION_SECONDS:
            raise ParseError(line, "elapsed_seconds", f"{elapsed} is beyond regulation")

        raw_type = _required(row, "event_type", line)
        try:
            event_type = EventType(raw_type)
        except ValueError:
            raise ParseError(line, "event_type", f"unknown event type {raw_type!r}") from None

        home_team = _required(row, "home_team", line)
        away_team = _required(row, "away_team", line)
        event_team = row["event_team"] or None
        if event_type not in TEAMLESS_EVENTS and event_team not in (home_team, away_team):
            raise ParseError(
                line, "event_team", f"{event_team!r} is neither {home_team!r} nor {away_team!r}"
            )

        if period <= 3 and not (
            (period - 1) * PERIOD_SECONDS <= elapsed <= period * PERIOD_SECONDS
        ):
            self.period_mismatches += 1
            self.debug(f"line {line}: {elapsed}s recorded in period {period}")

        return RawEvent(
            season=season,
            game_id=game_id,
            period=period,
            elapsed_seconds=elapsed,
            event_type=event_type,
            event_team=event_team,
            home_team=home_team,
            away_team=away_team,
            home_score=_integer(row, "home_score", line, 0, None),
            away_score=_integer(row, "away_score", line, 0, None),
            home_skaters=_integer(row, "home_skaters", line, 3, 6),
            away_skaters=_integer(row, "away_skaters", line, 3, 6),
            home_goalie_on=_boolean(row, "home_goalie_on", line),
            away_goalie_on=_boolean(row, "away_goalie_on", line),
            player=row.get(PLAYER_COLUMN) or None,
        )

    def reject(self, game_id: str, reason: str) -> None:
        """Drop a game, or raise if running in strict mode"""
        if self.strict:
            raise GameRejectedError(game_id, reason)
        self.warning(f"Rejected game {game_id}: {reason}")
        self.rejected[game_id] = reason
        return


## Field helpers
## -----------------------------------------------------------------------------
def _required(row: dict[str, str], field: str, line: int) -> str:
    value = row[field]
    if not value:
        raise ParseError(line, field, "value is required")
    return value


def _integer(row: dict[str, str], field: str, line: int, low: int | None, high: int | None) -> int:
    raw = _required(row, field, line)
    try:
        value = int(raw)
    except ValueError:
        raise ParseError(line, field, f"{raw!r} is not an integer") from None
    try:
        is_in_range(value, low, high, throw_error=True, value_name=field)
    except ValueError as e:
        raise ParseError(line, field, str(e)) from None
    return value


def _boolean(row: dict[str, str], field: str, line: int) -> bool:
    raw = _required(row, field, line)
    if raw not in _BOOLEANS:
        raise ParseError(line, field, f"{raw!r} is not 1 or 0")
    return _BOOLEANS[raw]


def _read_frame(source: PbpSource) -> pd.DataFrame:
    try:
        return pd.read_csv(source, dtype=str, keep_default_na=False, encoding="utf-8")
    except UnicodeDecodeError as e:
        raise SchemaError(f"input is not valid UTF-8 (byte offset {e.start})") from None
    except pd.errors.EmptyDataError:
        raise SchemaError("input is empty") from None
    except pd.errors.ParserError as e:
        found = re.search(r"Expected (\d+) fields in line (\d+), saw (\d+)", str(e))
        if found is None:
            raise SchemaError(f"malformed file: {e}") from None
        expected, line, saw = found.groups()
        raise SchemaError(f"line {line}: expected {expected} fields, saw {saw}") from None
