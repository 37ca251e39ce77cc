# pylint: disable=missing-class-docstring,missing-function-docstring,redefined-outer-name

### IMPORTS
### ============================================================================
## Standard Library
import argparse

## Installed
import pandas as pd
import pytest

from rinkeffects.cli import ExitCodeHandler, RunConfig, run
from rinkeffects.exceptions import (
    AdjustmentError,
    ConfigError,
    ConvergenceError,
    InputFileError,
    SchemaError,
)
from rinkeffects.ingest import PBP_COLUMNS, serialize_pbp
from rinkeffects.reports import (
    read_json,
    read_persistence,
    read_team_games,
    write_persistence,
    write_team_games,
)

## Application
from .helpers import make_entry, make_event, make_report, make_team_game

### CONSTANTS
### ============================================================================
MODEL_FLAGS = ["--events", "HIT", "--n-lambda", "8", "--folds", "3", "--seed", "4"]


### UTILITY
### ============================================================================
def synth(output, *extra):
    argv = ["synth", "--output", str(output), "--n-seasons", "2", "--games", "24", "--teams", "4"]
    argv += ["--plant", "HIT:T01=0.6", "--seed", "9", *extra]
    return run(argv)


def effects(team_games, output, *extra):
    argv = ["effects", "--input", str(team_games), "--output", str(output)]
    return run(argv + MODEL_FLAGS + list(extra))


### FIXTURES
### ============================================================================
@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    assert synth(root / "synth", "--counts") == 0
    events = str(root / "synth" / "events.csv")
    assert run(["ingest", "--input", events, "--output", str(root / "ingest")]) == 0
    assert effects(root / "ingest" / "team_games.csv", root / "effects") == 0
    return root


@pytest.fixture(scope="module")
def adjust_inputs(tmp_path_factory):
    """Two games between AAA and BBB, only AAA has persistent effects"""
    root = tmp_path_factory.mktemp("adjust")
    hit = make_report(make_entry("AAA", pooled=1.25, homer=0.5), make_entry("BBB"))
    corsi = make_report(make_entry("AAA", "CORSI", pooled=1.25), make_entry("BBB", "CORSI"))
    write_persistence([hit, corsi], str(root / "persistence.json"))

    first = {"game_id": "G1", "home": "AAA", "away": "BBB"}
    second = {"game_id": "G2", "home": "BBB", "away": "AAA"}
    events = [
        make_event(10, "HIT", "AAA", player="A Hitter", **first),
        make_event(20, "HIT", "AAA", player="A Hitter", **first),
        make_event(30, "HIT", "BBB", player="B Hitter", **first),
        make_event(40, "HIT", "BBB", player="B Hitter", **first),
        make_event(50, "HIT", "BBB", player="B Hitter", **first),
        make_event(10, "HIT", "AAA", player="A Hitter", **second),
    ]
    serialize_pbp(events, str(root / "events.csv"))

    team_games = [
        make_team_game("G1", "AAA", "BBB", True, count={"CORSI": 30}),
        make_team_game("G1", "BBB", "AAA", False, count={"CORSI": 20}),
        make_team_game("G2", "BBB", "AAA", True, count={"CORSI": 25}),
        make_team_game("G2", "AAA", "BBB", False, count={"CORSI": 15}),
    ]
    write_team_games(team_games, str(root / "team_games.csv"))
    (root / "neutral.csv").write_text("game_id\nG2\n", encoding="utf-8")
    return root


### TESTS
### ============================================================================
class TestExitCodes:
    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["bogus"],
            ["fit"],
            ["fit", "--input", "x.csv", "--alpha", "2"],
            ["fit", "--input", "x.csv", "--folds", "1"],
            ["fit", "--input", "x.csv", "--cv-repeats", "0"],
            ["effects", "--input", "x.csv", "--events", "FAC"],
            ["effects", "--input", "x.csv", "--unpenalized", "bogus"],
            ["ingest", "--input", "x.csv", "--goal-term", "half"],
            ["synth", "--plant", "HIT:T01"],
            ["synth", "--plant", "CORSI:T01=1.2"],
            ["synth", "--plant", "HIT:T01=-1"],
        ],
    )
    def test_config_errors(self, tmp_path, argv):
        if len(argv) > 1:
            argv = argv + ["--output", str(tmp_path)]
        assert run(argv) == 2
        return

    @pytest.mark.parametrize("command", ["ingest", "fit", "effects", "adjust", "report"])
    def test_missing_input(self, tmp_path, command):
        argv = [command, "--input", str(tmp_path / "missing"), "--output", str(tmp_path)]
        assert run(argv) == 3
        return

    def test_schema_error(self, tmp_path):
        path = tmp_path / "team_games.csv"
        path.write_text("game_id\nG1\n", encoding="utf-8")
        assert run(["fit", "--input", str(path), "--output", str(tmp_path)]) == 4
        return

    @pytest.mark.parametrize(
        "body",
        [
            b"20122013,G1,1,0,FAC,,AAA,BBB,0,0,5,5,1,1\n"
            b"20122013,G1,1,9,HIT,AAA,AAA,BBB,0,0,5,5,1,1,x,y\n",
            b"20122013,G\xff1,1,0,FAC,,AAA,BBB,0,0,5,5,1,1\n",
        ],
    )
    def test_malformed_pbp(self, tmp_path, body):
        path = tmp_path / "events.csv"
        path.write_bytes(",".join(PBP_COLUMNS).encode() + b"\n" + body)
        assert run(["ingest", "--input", str(path), "--output", str(tmp_path / "out")]) == 4
        return

    def test_adjust_without_corsi_report(self, workspace, tmp_path):
        argv = [
            "adjust",
            "--input",
            str(workspace / "effects" / "persistence.json"),
            "--team-games",
            str(workspace / "ingest" / "team_games.csv"),
            "--output",
            str(tmp_path),
        ]
        assert run(argv) == 6
        return


class TestExitCodeHandler:
    @pytest.mark.parametrize(
        "exception, code",
        [
            (ConfigError("bad"), 2),
            (InputFileError("x.csv"), 3),
            (SchemaError("bad"), 4),
            (ConvergenceError(3, 0.1, 100), 5),
            (AdjustmentError("bad"), 6),
            (KeyboardInterrupt(), 130),
            (RuntimeError("boom"), 1),
        ],
    )
    def test_codes(self, exception, code):
        assert ExitCodeHandler().exit_code(exception) == code
        return

    def test_custom_handler(self):
        handler = ExitCodeHandler({SchemaError: lambda e: 40})
        assert handler.exit_code(SchemaError("bad")) == 40
        assert handler.exit_code(ConfigError("bad")) == 2
        return


class TestRunConfig:
    def test_defaults(self):
        config = RunConfig.from_args(argparse.Namespace(command="synth", output="."))
        assert config.alpha == 0.5
        assert config.folds == 10
        assert config.n_lambda == 100
        assert config.cv_repeats == 1
        return

    def test_solver_spec(self):
        config = RunConfig("fit", ".", input="x.csv", folds=5, cv_repeats=3, seed=7)
        spec = config.solver_spec()
        assert (spec.folds, spec.repeats, spec.seed) == (5, 3, 7)
        return

    def test_synthetic_config(self):
        config = RunConfig(
            "synth",
            ".",
            n_seasons=3,
            games=40,
            short_season_games=20,
            teams=5,
            plant=("GIVE:T02=1.5",),
            plant_homer=("HIT:T03=1.2",),
        )
        synthetic = config.synthetic_config()
        assert synthetic.seasons == ("20072008", "20082009", "20092010")
        assert synthetic.season_games == (40, 40, 20)
        assert synthetic.teams == ("T01", "T02", "T03", "T04", "T05")
        assert synthetic.truth["GIVE"].rink == {"T02": 1.5}
        assert synthetic.truth["HIT"].homer == {"T03": 1.2}
        return

    def test_planted(self):
        assert RunConfig.planted(["HIT:A=0.8", "HIT:B=1.2", "GIVE:A=2"]) == {
            "HIT": {"A": 0.8, "B": 1.2},
            "GIVE": {"A": 2.0},
        }
        return


class TestPipeline:
    def test_ingest(self, workspace):
        ingested = read_team_games(str(workspace / "ingest" / "team_games.csv"))
        generated = read_team_games(str(workspace / "synth" / "team_games.csv"))
        assert ingested == generated
        rejections = pd.read_csv(workspace / "ingest" / "rejections.csv")
        assert list(rejections.columns) == ["stage", "game_id", "reason"]
        assert rejections.empty
        return

    def test_truth(self, workspace):
        truth = read_json(str(workspace / "synth" / "truth.json"))
        assert truth["events"]["HIT"]["rink"] == {"T01": 0.6}
        return

    def test_effects(self, workspace):
        output = workspace / "effects"
        for name in [
            "effects.json",
            "persistence.json",
            "persistence.csv",
            "yearly_HIT.csv",
            "significant_HIT.csv",
        ]:
            assert (output / name).is_file()
        (report,) = read_persistence(str(output / "persistence.json"))
        assert report.event == "HIT"
        assert report.seasons == ("20072008", "20082009")
        assert sorted(report.entries) == ["T01", "T02", "T03", "T04"]
        tables = read_json(str(output / "effects.json"))["tables"]
        assert len(tables) == 3
        return

    def test_fit(self, workspace, tmp_path):
        team_games = str(workspace / "ingest" / "team_games.csv")
        argv = ["fit", "--input", team_games, "--output", str(tmp_path), "--dump-design"]
        assert run(argv + MODEL_FLAGS) == 0
        for stem in ["HIT_20072008", "HIT_20082009", "HIT_pooled"]:
            for suffix in ["cv", "path", "design"]:
                assert (tmp_path / f"{stem}_{suffix}.csv").is_file()
        cv = pd.read_csv(tmp_path / "HIT_pooled_cv.csv")
        assert len(cv) == 8
        assert cv["chosen"].sum() == 1
        assert len(read_json(str(tmp_path / "fits.json"))["fits"]) == 3
        return

    def test_adjust(self, workspace, tmp_path):
        argv = [
            "adjust",
            "--input",
            str(workspace / "effects" / "persistence.json"),
            "--pbp",
            str(workspace / "synth" / "events.csv"),
            "--output",
            str(tmp_path),
        ]
        assert run(argv) == 0
        weights = pd.read_csv(tmp_path / "weights.csv")
        assert len(weights) == 8
        counts = pd.read_csv(tmp_path / "adjusted_HIT_20082009.csv")
        assert list(counts.columns) == ["name", "team", "adjusted", "raw", "differential"]
        assert (counts["raw"] > 0).all()
        differential = counts["adjusted"] - counts["raw"]
        assert differential.to_numpy() == pytest.approx(counts["differential"].to_numpy())
        return

    def test_adjust_weights_only(self, workspace, tmp_path):
        argv = ["adjust", "--input", str(workspace / "effects" / "persistence.json")]
        assert run(argv + ["--output", str(tmp_path)]) == 0
        assert [path.name for path in tmp_path.iterdir()] == ["weights.csv"]
        return

    def test_report(self, workspace, tmp_path):
        argv = ["report", "--input", str(workspace / "effects" / "persistence.json")]
        assert run(argv + ["--output", str(tmp_path)]) == 0
        for name in ["summary.csv", "summary.json", "rink_overview.csv", "grid.csv"]:
            assert (tmp_path / name).is_file()
        summary = read_json(str(tmp_path / "summary.json"))
        assert set(summary["rink_counts"]) == {"T01", "T02", "T03", "T04"}
        return


class TestDeterminism:
    def test_synth(self, tmp_path):
        assert synth(tmp_path / "a") == 0
        assert synth(tmp_path / "b") == 0
        for name in ["team_games.csv", "truth.json"]:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        return

    def test_effects(self, workspace, tmp_path):
        assert effects(workspace / "ingest" / "team_games.csv", tmp_path, "--jobs", "2") == 0
        for name in ["persistence.json", "effects.json", "persistence.csv", "yearly_HIT.csv"]:
            expected = (workspace / "effects" / name).read_bytes()
            assert (tmp_path / name).read_bytes() == expected
        return


class TestAdjustValues:
    def adjust(self, inputs, output, *extra):
        argv = [
            "adjust",
            "--input",
            str(inputs / "persistence.json"),
            "--pbp",
            str(inputs / "events.csv"),
            "--team-games",
            str(inputs / "team_games.csv"),
            "--output",
            str(output),
        ]
        assert run(argv + list(extra)) == 0
        counts = pd.read_csv(output / "adjusted_HIT_20122013.csv")
        shares = pd.read_csv(output / "corsi_pct_20122013.csv")
        return counts.set_index("name"), shares.set_index("team")

    def test_weights(self, adjust_inputs, tmp_path):
        self.adjust(adjust_inputs, tmp_path)
        weights = pd.read_csv(tmp_path / "weights.csv")
        assert len(weights) == 8
        weight = weights.set_index(["rink", "event", "is_home"])["weight"]
        assert weight[("AAA", "HIT", 1)] == pytest.approx(1 / (1.25 * 0.5))
        assert weight[("AAA", "HIT", 0)] == pytest.approx(1 / 1.25)
        assert weight[("AAA", "CORSI", 1)] == pytest.approx(1 / 1.25)
        assert weight[("BBB", "HIT", 1)] == 1.0
        return

    def test_player_counts(self, adjust_inputs, tmp_path):
        counts, _ = self.adjust(adjust_inputs, tmp_path)
        assert list(counts.index) == ["A Hitter", "B Hitter"]
        # two home hits at AAA (1.6 each) and one away hit at BBB
        assert counts.loc["A Hitter", "raw"] == 3
        assert counts.loc["A Hitter", "adjusted"] == pytest.approx(2 * 1.6 + 1.0)
        assert counts.loc["A Hitter", "differential"] == pytest.approx(1.2)
        # three away hits at AAA (0.8 each)
        assert counts.loc["B Hitter", "raw"] == 3
        assert counts.loc["B Hitter", "adjusted"] == pytest.approx(3 * 0.8)
        assert counts.loc["B Hitter", "differential"] == pytest.approx(-0.6)
        return

    def test_corsi_pct(self, adjust_inputs, tmp_path):
        _, shares = self.adjust(adjust_inputs, tmp_path)
        assert list(shares.index) == ["AAA", "BBB"]
        assert shares.loc["AAA", "raw_pct"] == 0.5
        assert shares.loc["BBB", "raw_pct"] == 0.5
        # G1 counts at AAA are weighted by 0.8 on both sides
        assert shares.loc["AAA", "adjusted_pct"] == pytest.approx((24 + 15) / 80)
        assert shares.loc["BBB", "adjusted_pct"] == pytest.approx((16 + 25) / 80)
        return

    def test_neutral_site_games_excluded(self, adjust_inputs, tmp_path):
        counts, shares = self.adjust(
            adjust_inputs,
            tmp_path,
            "--neutral-sites",
            "exclude",
            "--neutral-site-games",
            str(adjust_inputs / "neutral.csv"),
        )
        assert counts.loc["A Hitter", "raw"] == 2
        assert counts.loc["A Hitter", "adjusted"] == pytest.approx(3.2)
        assert shares.loc["AAA", "raw_pct"] == pytest.approx(0.6)
        assert shares.loc["AAA", "adjusted_pct"] == pytest.approx(0.6)
        return
