# pylint: disable=missing-class-docstring,missing-function-docstring

### IMPORTS
### ============================================================================
## Standard Library
import json
import math

## Installed
import numpy as np
import pytest

from rinkeffects.adjust import AdjustedCountRow, AdjustedCounts, CorsiPctRow
from rinkeffects.design import encode_yearly
from rinkeffects.effects import EffectTable, YearlyCoefficientRow, summarize
from rinkeffects.exceptions import InputFileError, SchemaError
from rinkeffects.reports import (
    SCHEMA_VERSION,
    TEAM_GAME_COLUMNS,
    adjusted_counts_frame,
    coefficient_path_frame,
    corsi_pct_frame,
    cv_diagnostics_frame,
    effect_table_from_dict,
    effect_table_to_dict,
    persistence_frame,
    read_json,
    read_persistence,
    read_team_games,
    rink_overview_frame,
    summary_frame,
    write_json,
    write_persistence,
    write_team_games,
    yearly_coefficients_frame,
)
from rinkeffects.solver import ElasticNetSpec, cross_validate

## Application
from .helpers import make_entry, make_report, make_team_game


### TESTS
### ============================================================================
class TestJson:
    def test_schema_version_and_sorted_keys(self, tmp_path):
        path = str(tmp_path / "doc.json")
        write_json({"b": 1, "a": {"y": 2, "x": 1}}, path)
        text = (tmp_path / "doc.json").read_text(encoding="utf-8")
        assert text.endswith("}\n")
        assert text.index('"a"') < text.index('"b"') < text.index('"schema_version"')
        assert read_json(path) == {"schema_version": SCHEMA_VERSION, "a": {"x": 1, "y": 2}, "b": 1}
        return

    def test_non_finite_written_as_null(self, tmp_path):
        path = tmp_path / "doc.json"
        write_json(
            {"a": math.nan, "b": [math.inf, np.float64(-math.inf)], "c": np.int64(3)}, str(path)
        )
        text = path.read_text(encoding="utf-8")
        assert "NaN" not in text
        assert "Infinity" not in text
        json.loads(text, parse_constant=pytest.fail)
        assert read_json(str(path)) == {
            "schema_version": SCHEMA_VERSION,
            "a": None,
            "b": [None, None],
            "c": 3,
        }
        return

    def test_missing(self, tmp_path):
        with pytest.raises(InputFileError):
            read_json(str(tmp_path / "missing.json"))
        return

    @pytest.mark.parametrize(
        "text", ["not json", "[1, 2]", json.dumps({"schema_version": SCHEMA_VERSION + 1})]
    )
    def test_invalid(self, tmp_path, text):
        path = tmp_path / "doc.json"
        path.write_text(text, encoding="utf-8")
        with pytest.raises(SchemaError):
            read_json(str(path))
        return


class TestTeamGames:
    def test_exact_floats(self, tmp_path, planted_league):
        path = str(tmp_path / "team_games.csv")
        write_team_games(planted_league.team_games[:40], path)
        assert read_team_games(path) == planted_league.team_games[:40]
        return

    def test_header(self, tmp_path):
        path = tmp_path / "team_games.csv"
        write_team_games([make_team_game("G1", "A", "B", True)], str(path))
        header = path.read_text(encoding="utf-8").splitlines()[0]
        assert tuple(header.split(",")) == TEAM_GAME_COLUMNS
        return

    def test_bad_columns(self, tmp_path):
        path = tmp_path / "team_games.csv"
        path.write_text("game_id,season\nG1,S1\n", encoding="utf-8")
        with pytest.raises(SchemaError):
            read_team_games(str(path))
        return

    def test_bad_value(self, tmp_path):
        path = tmp_path / "team_games.csv"
        write_team_games([make_team_game("G1", "A", "B", True)], str(path))
        lines = path.read_text(encoding="utf-8").splitlines()
        fields = lines[1].split(",")
        fields[TEAM_GAME_COLUMNS.index("asd")] = "lots"
        path.write_text("\n".join([lines[0], ",".join(fields)]) + "\n", encoding="utf-8")
        with pytest.raises(SchemaError, match="line 2"):
            read_team_games(str(path))
        return


class TestEffects:
    def table(self):
        return EffectTable(
            "HIT",
            "20122013",
            ("20122013",),
            0.01,
            0.02,
            0.0,
            {"intercept": math.log(22.0), "rink[A]": -0.2, "rink[B]": 0.0, "home": 0.05},
        )

    def test_effect_table(self):
        data = effect_table_to_dict(self.table())
        assert data["rink_effect"] == {"A": pytest.approx(math.exp(-0.2)), "B": 1.0}
        assert data["mean_effect"] == {"20122013": pytest.approx(22.0)}
        assert effect_table_from_dict(json.loads(json.dumps(data))) == self.table()
        return

    def test_effect_table_invalid(self):
        with pytest.raises(SchemaError):
            effect_table_from_dict({"event": "HIT"})
        return

    def test_persistence(self, tmp_path):
        reports = [
            make_report(make_entry("A", pooled=0.8), make_entry("B", homer=1.2)),
            make_report(make_entry("A", "SHOT"), event="SHOT"),
        ]
        path = str(tmp_path / "persistence.json")
        write_persistence(reports, path)
        assert read_persistence(path) == reports
        return

    def test_persistence_wrong_document(self, tmp_path):
        path = str(tmp_path / "persistence.json")
        write_json({"tables": []}, path)
        with pytest.raises(SchemaError, match="not a persistence document"):
            read_persistence(path)
        return

    def test_persistence_frame(self):
        frame = persistence_frame([make_report(make_entry("A", pooled=0.8), make_entry("B"))])
        assert list(frame["rink"]) == ["A", "B"]
        assert list(frame["direction"]) == ["below", ""]
        assert "effect_20122013" in frame.columns
        return

    def test_yearly_coefficients_blank_when_shrunk(self):
        frame = yearly_coefficients_frame([YearlyCoefficientRow("20122013", 22.0, None, 1.05)])
        assert frame.loc[0, "season"] == "2012-13"
        assert frame["asd"].isna().all()
        return

    def test_summary_frames(self):
        summary = summarize([make_report(make_entry("A", pooled=0.8), make_entry("B"))])
        frame = summary_frame(summary)
        assert frame.loc[0, "persistent_rinks"] == 1
        overview = rink_overview_frame(summary)
        assert list(overview["persistent_events"]) == [1, 0]
        return


class TestFitFrames:
    def test_diagnostics(self):
        games = []
        rng = np.random.default_rng(0)
        for number in range(20):
            home, away = ("A", "B") if number % 2 else ("B", "A")
            rate = {"HIT": float(rng.uniform(10, 30))}
            games.append(make_team_game(f"G{number}", home, away, True, rate=rate))
            games.append(make_team_game(f"G{number}", away, home, False, rate=rate))
        design, response = encode_yearly(games, "HIT")
        fit = cross_validate(design, response, ElasticNetSpec(n_lambda=8, folds=4))

        frame = cv_diagnostics_frame(fit)
        assert list(frame.columns) == ["lambda", "cv_mean", "cv_se", "nonzero", "chosen", "one_se"]
        assert frame["chosen"].sum() == 1
        assert frame.loc[fit.chosen_index, "chosen"] == 1
        assert frame["one_se"].sum() == 1

        path = coefficient_path_frame(design, fit)
        assert list(path.columns[:2]) == ["lambda", "intercept_free"]
        assert list(path.columns[2:]) == design.column_names
        assert len(path) == 8
        return


class TestAdjustmentFrames:
    def test_counts(self):
        counts = AdjustedCounts(
            "HIT", "20122013", (AdjustedCountRow("C Clutterbuck", "MIN", "HIT", 181.3, 155),)
        )
        frame = adjusted_counts_frame(counts)
        assert list(frame.columns) == ["name", "team", "adjusted", "raw", "differential"]
        assert frame.loc[0, "differential"] == pytest.approx(26.3)
        return

    def test_corsi_pct_rounded(self):
        frame = corsi_pct_frame([CorsiPctRow("LAK", "CORSI", 0.563012, 0.562849)])
        assert frame.loc[0, "raw_pct"] == 0.563
        assert frame.loc[0, "adjusted_pct"] == 0.5628
        return
