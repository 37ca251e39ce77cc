# pylint: disable=missing-class-docstring,missing-function-docstring

### IMPORTS
### ============================================================================
## Standard Library
import io

## Installed
import pytest

from rinkeffects.exceptions import (
    DuplicateEventError,
    GameRejectedError,
    InputFileError,
    IntervalError,
    ParseError,
    SchemaError,
)
from rinkeffects.ingest import (
    PBP_COLUMNS,
    PbpParser,
    compute_intervals,
    filter_nen5v5,
    parse_pbp,
    serialize_pbp,
)
from rinkeffects.models import EventType

## Application
from .helpers import AWAY, HOME, make_event

### UTILITY
### ============================================================================
HEADER = ",".join(PBP_COLUMNS)


def pbp(*rows: str, header: str = HEADER) -> io.StringIO:
    return io.StringIO("\n".join([header, *rows]) + "\n")


def row(
    elapsed=0,
    event_type="FAC",
    team="",
    *,
    game_id="G1",
    period=None,
    home_skaters=5,
    goalie="1",
) -> str:
    if period is None:
        period = min(3, elapsed // 1200 + 1)
    return (
        f"20122013,{game_id},{period},{elapsed},{event_type},{team},{HOME},{AWAY},"
        f"0,0,{home_skaters},5,{goalie},1"
    )


### TESTS
### ============================================================================
class TestParse:
    def test_groups_and_sorts_games(self):
        games = parse_pbp(
            pbp(
                row(1300, "HIT", HOME),
                row(0),
                row(0, game_id="G2"),
                row(50, "SHOT", AWAY),
            )
        )
        assert sorted(games) == ["G1", "G2"]
        assert [e.elapsed_seconds for e in games["G1"]] == [0, 50, 1300]
        first = games["G1"][1]
        assert first.event_type is EventType.SHOT
        assert first.event_team == AWAY
        assert first.period == 1
        assert first.is_nen5v5
        assert first.player is None
        return

    def test_player_column(self):
        games = parse_pbp(
            pbp(row(0) + ",", row(10, "HIT", HOME) + ",A Player", header=HEADER + ",player")
        )
        assert games["G1"][0].player is None
        assert games["G1"][1].player == "A Player"
        return

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputFileError):
            parse_pbp(str(tmp_path / "missing.csv"))
        return

    def test_bad_header(self):
        with pytest.raises(SchemaError, match="unexpected header"):
            parse_pbp(pbp(row(0), header=HEADER.replace("period", "per")))
        return

    @pytest.mark.parametrize(
        "text,field",
        [
            (row(0).replace(",1,0,FAC", ",x,0,FAC"), "period"),
            (row(0, "NOPE"), "event_type"),
            (row(0, "HIT", "XYZ"), "event_team"),
            (row(0, "HIT", ""), "event_team"),
            (row(0, home_skaters=7), "home_skaters"),
            (row(0, goalie="yes"), "home_goalie_on"),
            (row(3700, period=3), "elapsed_seconds"),
        ],
    )
    def test_bad_values(self, text: str, field: str):
        with pytest.raises(ParseError) as e:
            parse_pbp(pbp(row(0, game_id="G0"), text))
        assert e.value.line == 3
        assert e.value.field == field
        return

    @pytest.mark.parametrize("column", ["home_skaters", "away_goalie_on"])
    def test_missing_strength_rejects_game(self, column: str):
        fields = row(10, "HIT", HOME, game_id="G2").split(",")
        fields[PBP_COLUMNS.index(column)] = ""
        parser = PbpParser()
        games = parser.parse(
            pbp(row(0), row(0, game_id="G2"), ",".join(fields), row(0, game_id="G3"))
        )
        assert sorted(games) == ["G1", "G3"]
        assert list(parser.rejected) == ["G2"]
        assert column in parser.rejected["G2"]
        return

    def test_missing_strength_strict(self):
        fields = row(0).split(",")
        fields[PBP_COLUMNS.index("home_skaters")] = ""
        with pytest.raises(GameRejectedError) as e:
            parse_pbp(pbp(",".join(fields)), strict=True)
        assert e.value.game_id == "G1"
        return

    def test_extra_fields(self):
        with pytest.raises(SchemaError, match="line 3: expected 14 fields, saw 16"):
            parse_pbp(pbp(row(0), row(10, "HIT", HOME) + ",x,y"))
        return

    def test_not_utf8(self, tmp_path):
        path = tmp_path / "pbp.csv"
        path.write_bytes((HEADER + "\n").encode() + b"20122013,G\xff\xfe1\n")
        with pytest.raises(SchemaError, match="not valid UTF-8"):
            parse_pbp(str(path))
        return

    def test_empty_file(self, tmp_path):
        path = tmp_path / "pbp.csv"
        path.write_bytes(b"")
        with pytest.raises(SchemaError, match="empty"):
            parse_pbp(str(path))
        return

    def test_faceoff_without_team(self):
        games = parse_pbp(pbp(row(0, "FAC", "")))
        assert games["G1"][0].event_team is None
        return

    def test_duplicate(self):
        with pytest.raises(DuplicateEventError) as e:
            parse_pbp(pbp(row(0), row(10, "HIT", HOME), row(10, "HIT", HOME)))
        assert e.value.line == 4
        assert e.value.first_line == 3
        return

    def test_overtime_only_game_rejected(self):
        parser = PbpParser()
        games = parser.parse(pbp(row(0), row(3700, "HIT", HOME, game_id="G2", period=4)))
        assert list(games) == ["G1"]
        assert "G2" in parser.rejected
        return

    def test_overtime_only_game_strict(self):
        with pytest.raises(GameRejectedError):
            parse_pbp(pbp(row(3700, "HIT", HOME, period=4)), strict=True)
        return

    def test_period_mismatch_counted(self):
        parser = PbpParser()
        parser.parse(pbp(row(0), row(1500, "HIT", HOME, period=1)))
        assert parser.period_mismatches == 1
        return

    def test_serialize_matches_parse(self):
        events = [
            make_event(0, "FAC"),
            make_event(10, "HIT", HOME, player="A Player"),
            make_event(20, "GOAL", AWAY, away_score=1, away_skaters=4),
        ]
        target = io.StringIO()
        serialize_pbp(events, target)
        target.seek(0)
        assert parse_pbp(target)["G1"] == events
        return


class TestIntervals:
    def test_lengths(self):
        events = [make_event(0), make_event(1240), make_event(1453)]
        intervals = compute_intervals(events)
        assert [i.length_seconds for i in intervals] == [1240, 213, 2147]
        assert sum(i.length_seconds for i in intervals) == 3600
        return

    def test_overtime_ignored(self):
        events = [make_event(0), make_event(3650, period=4)]
        intervals = compute_intervals(events)
        assert len(intervals) == 1
        assert intervals[0].length_seconds == 3600
        return

    def test_decreasing(self):
        with pytest.raises(IntervalError):
            compute_intervals([make_event(0), make_event(100), make_event(50)])
        return

    def test_must_start_at_zero(self):
        with pytest.raises(IntervalError, match="expected 3600"):
            compute_intervals([make_event(30), make_event(100)])
        return

    def test_no_regulation_events(self):
        with pytest.raises(IntervalError):
            compute_intervals([make_event(3700, period=4)])
        return

    @pytest.mark.parametrize(
        "kwargs,expected",
        [
            ({}, True),
            ({"home_skaters": 4}, False),
            ({"away_skaters": 6}, False),
            ({"home_goalie_on": False}, False),
            ({"away_goalie_on": False}, False),
        ],
    )
    def test_filter_nen5v5(self, kwargs, expected: bool):
        intervals = compute_intervals([make_event(0, **kwargs)])
        assert bool(filter_nen5v5(intervals)) == expected
        return
