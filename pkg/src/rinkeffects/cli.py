### IMPORTS
### ============================================================================
## Future
from __future__ import annotations

## Standard Library
import argparse
from dataclasses import dataclass
import inspect
import os
from typing import Any, Callable, Dict, List, Optional, Sequence

## Installed
import pandas as pd
import pillar.application
from pillar.logging import LoggingMixin

## Application
from . import _version
from . import reports as r
from .adjust import AdjustmentWeights, adjust_corsi_pct, adjust_player_counts
from .design import PENALIZABLE_FAMILIES
from .effects import (
    EventModelFitter,
    EventModels,
    PersistenceReport,
    PersistenceRule,
    build_persistence_report,
    effect_grid,
    significant_rinks,
    summarize,
    yearly_coefficients,
)
from .exceptions import AdjustmentError, ConfigError, RinkEffectsError
from .ingest import PbpParser, parse_pbp, serialize_pbp
from .models import MODEL_EVENTS, PRIMARY_EVENTS, TeamGame
from .rinks import RinkTable
from .solver import ElasticNetSpec
from .synth import DEFAULT_MEANS, EventTruth, SyntheticConfig, SyntheticLeague
from .teamgame import (
    ASD_ORIENTATIONS,
    GOAL_TERMS,
    NEUTRAL_SITE_MODES,
    TeamGameBuilder,
    TeamGameOptions,
)
from .util import is_in_range

### CONSTANTS
### ============================================================================
COMMANDS = ("ingest", "fit", "effects", "adjust", "synth", "report")

EPILOG = """\
exit codes:
  0  success
  1  unexpected error
  2  invalid flags or configuration
  3  missing or unreadable input file
  4  input does not match the expected schema
  5  solver failure
  6  adjustment requested for something the reports do not cover

For full information including licence see https://github.com/nhairs/rinkeffects
"""

FIRST_SYNTHETIC_SEASON = 2007


### FUNCTIONS
### ============================================================================
def _csv_list(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


class _HelpFormatter(argparse.ArgumentDefaultsHelpFormatter, argparse.RawDescriptionHelpFormatter):
    pass


def add_arguments(parser: argparse.ArgumentParser) -> argparse.ArgumentParser:
    """Add the subcommands and their flags to a parser"""
    # pylint: disable=too-many-statements
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    def add_command(name: str, help_: str) -> argparse.ArgumentParser:
        command = subparsers.add_parser(
            name, help=help_, description=help_, epilog=EPILOG, formatter_class=_HelpFormatter
        )
        command.add_argument("--output", default=".", help="Directory to write artifacts to")
        command.add_argument("--seed", type=int, default=0, help="Seed of every random stream")
        return command

    def add_model_flags(command: argparse.ArgumentParser) -> None:
        command.add_argument("--alpha", type=float, default=0.5, help="Elastic net L1 weight")
        command.add_argument("--folds", type=int, default=10, help="Cross-validation folds")
        command.add_argument(
            "--cv-repeats",
            type=int,
            default=1,
            help="Cross-validation runs over fresh fold assignments, errors averaged",
        )
        command.add_argument("--n-lambda", type=int, default=100, help="Lambda path length")
        command.add_argument(
            "--path-ratio", type=float, default=1e-4, help="lambda_min / lambda_max"
        )
        command.add_argument(
            "--seasons", type=_csv_list, default=None, help="Comma separated seasons (all)"
        )
        command.add_argument(
            "--events",
            type=_csv_list,
            default=list(MODEL_EVENTS),
            help="Comma separated events to model",
        )
        command.add_argument(
            "--unpenalized",
            type=_csv_list,
            default=[],
            help=f"Comma separated families exempt from the penalty {sorted(PENALIZABLE_FAMILIES)}",
        )
        command.add_argument(
            "--persistence-threshold",
            type=int,
            default=None,
            help="Yearly fits that must agree in sign (n - 1 of n seasons)",
        )
        command.add_argument(
            "--jobs", type=int, default=1, help="Cross-validation folds fitted in parallel"
        )
        return

    def add_neutral_site_flags(command: argparse.ArgumentParser) -> None:
        command.add_argument(
            "--neutral-sites",
            choices=NEUTRAL_SITE_MODES,
            default="designated-home",
            help="Handling of neutral site games",
        )
        command.add_argument(
            "--neutral-site-games",
            default=None,
            help="File with a game_id column of neutral games",
        )
        return

    ## Ingest
    ## -------------------------------------------------------------------------
    ingest = add_command("ingest", "Parse play-by-play events into team-games")
    ingest.add_argument("--input", required=True, help="Play-by-play file")
    ingest.add_argument(
        "--asd-orientation", choices=ASD_ORIENTATIONS, default="for-team", help="ASD sign"
    )
    ingest.add_argument(
        "--goal-term", choices=GOAL_TERMS, default="raw", help="Goals in CORSI / FENWICK rates"
    )
    add_neutral_site_flags(ingest)
    ingest.add_argument("--rinks", default=None, help="Rink table with season,team,rink columns")
    ingest.add_argument("--seasons", type=_csv_list, default=None, help="Seasons to keep (all)")
    ingest.add_argument("--strict", action="store_true", help="Fail on unusable games")

    ## Fit / Effects
    ## -------------------------------------------------------------------------
    fit = add_command("fit", "Fit models and write cross-validation diagnostics")
    fit.add_argument("--input", required=True, help="Team-game table")
    fit.add_argument("--dump-design", action="store_true", help="Also write design matrices")
    add_model_flags(fit)

    effects = add_command("effects", "Fit models and classify persistent rink effects")
    effects.add_argument("--input", required=True, help="Team-game table")
    add_model_flags(effects)

    ## Adjust
    ## -------------------------------------------------------------------------
    adjust = add_command("adjust", "Rink adjusted player counts and team percentages")
    adjust.add_argument("--input", required=True, help="Persistence report (persistence.json)")
    adjust.add_argument("--event", default="HIT", help="Event to adjust player counts of")
    adjust.add_argument("--season", default=None, help="Season to adjust (last fitted season)")
    adjust.add_argument("--pbp", default=None, help="Play-by-play file with a player column")
    adjust.add_argument("--team-games", default=None, help="Team-game table for CORSI shares")
    adjust.add_argument("--rinks", default=None, help="Rink table with season,team,rink columns")
    add_neutral_site_flags(adjust)

    ## Synth
    ## -------------------------------------------------------------------------
    synth = add_command("synth", "Generate a synthetic league with planted effects")
    synth.add_argument("--n-seasons", type=int, default=3, help="Number of seasons")
    synth.add_argument("--games", type=int, default=60, help="Games per season")
    synth.add_argument(
        "--short-season-games", type=int, default=None, help="Games of the final season"
    )
    synth.add_argument("--teams", type=int, default=8, help="Number of teams / rinks")
    synth.add_argument(
        "--plant",
        action="append",
        default=[],
        metavar="EVENT:RINK=EFFECT",
        help="Planted rink effect, repeatable",
    )
    synth.add_argument(
        "--plant-homer",
        action="append",
        default=[],
        metavar="EVENT:RINK=EFFECT",
        help="Planted homer effect, repeatable",
    )
    synth.add_argument("--noise-sd", type=float, default=0.35, help="Log scale noise")
    synth.add_argument(
        "--noise-mode", choices=("lognormal", "poisson"), default="lognormal", help="Noise model"
    )
    synth.add_argument("--counts", action="store_true", help="Also write play-by-play events")

    ## Report
    ## -------------------------------------------------------------------------
    report = add_command("report", "Summarize persistence across events")
    report.add_argument("--input", required=True, help="Persistence report (persistence.json)")
    report.add_argument(
        "--events", type=_csv_list, default=None, help="Events counted in the rink overview"
    )
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line without the application wrapper.

    Returns:
        Process exit code
    """
    parser = argparse.ArgumentParser(
        prog="rinkeffects",
        description="Rink effect estimation and adjustment",
        epilog=EPILOG,
        formatter_class=_HelpFormatter,
    )
    add_arguments(parser)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else int(e.code is not None)
    return Pipeline().execute(args)


### CLASSES
### ============================================================================
class ExitCodeHandler:
    """Map exceptions to process exit codes.

    Handlers are looked up along the exception's MRO so the most specific registered
    class wins.

    Attributes:
        handlers: registered exit code handlers
    """

    def __init__(
        self, handlers: Dict[type[BaseException], Callable[[BaseException], int]] | None = None
    ) -> None:
        self.handlers: Dict[type[BaseException], Callable[[BaseException], int]] = {
            RinkEffectsError: lambda e: getattr(e, "exit_code", 1),
            KeyboardInterrupt: lambda e: 130,
        }
        if handlers:
            self.handlers.update(handlers)
        return

    def get_handler(self, exception: BaseException) -> Callable[[BaseException], int]:
        """Get the handler for the given exception

        Args:
            exception: the exception we wish to handle
        """
        for class_ in inspect.getmro(exception.__class__):
            if class_ in self.handlers:
                return self.handlers[class_]
        return self.default_handler

    def exit_code(self, exception: BaseException) -> int:
        return self.get_handler(exception)(exception)

    @staticmethod
    def default_handler(exception: BaseException) -> int:  # pylint: disable=unused-argument
        return 1


@dataclass(frozen=True)
class RunConfig:  # pylint: disable=too-many-instance-attributes
    """Validated command line settings"""

    command: str
    output: str
    seed: int = 0
    input: Optional[str] = None
    alpha: float = 0.5
    folds: int = 10
    cv_repeats: int = 1
    n_lambda: int = 100
    path_ratio: float = 1e-4
    seasons: Optional[tuple[str, ...]] = None
    events: tuple[str, ...] = MODEL_EVENTS
    unpenalized: tuple[str, ...] = ()
    persistence_threshold: Optional[int] = None
    jobs: int = 1
    asd_orientation: str = "for-team"
    goal_term: str = "raw"
    neutral_sites: str = "designated-home"
    neutral_site_games: Optional[str] = None
    rinks: Optional[str] = None
    strict: bool = False
    dump_design: bool = False
    event: str = "HIT"
    season: Optional[str] = None
    pbp: Optional[str] = None
    team_games: Optional[str] = None
    n_seasons: int = 3
    games: int = 60
    short_season_games: Optional[int] = None
    teams: int = 8
    plant: tuple[str, ...] = ()
    plant_homer: tuple[str, ...] = ()
    noise_sd: float = 0.35
    noise_mode: str = "lognormal"
    counts: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        """Build and validate a config from parsed arguments.

        Raises:
            ConfigError: a value is invalid
        """
        values: Dict[str, Any] = {}
        for name in cls.__dataclass_fields__:  # pylint: disable=no-member
            if hasattr(args, name) and getattr(args, name) is not None:
                value = getattr(args, name)
                values[name] = tuple(value) if isinstance(value, list) else value
        config = cls(**values)
        config.validate()
        return config

    def validate(self) -> None:
        """Raises: ConfigError: a value is invalid"""
        # pylint: disable=too-many-branches
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        try:
            is_in_range(self.alpha, 0, 1, throw_error=True, value_name="--alpha")
            is_in_range(self.folds, 2, throw_error=True, value_name="--folds")
            is_in_range(self.cv_repeats, 1, throw_error=True, value_name="--cv-repeats")
            is_in_range(self.n_lambda, 1, throw_error=True, value_name="--n-lambda")
            is_in_range(self.jobs, 1, throw_error=True, value_name="--jobs")
            is_in_range(self.n_seasons, 1, throw_error=True, value_name="--n-seasons")
            is_in_range(self.teams, 2, throw_error=True, value_name="--teams")
            is_in_range(self.noise_sd, 0, throw_error=True, value_name="--noise-sd")
        except ValueError as e:
            raise ConfigError(str(e)) from None
        if not 0 < self.path_ratio < 1:
            raise ConfigError("--path-ratio must be in (0, 1)")
        unknown = set(self.events) - set(MODEL_EVENTS)
        if unknown or not self.events:
            raise ConfigError(f"--events must be a subset of {MODEL_EVENTS}")
        if set(self.unpenalized) - PENALIZABLE_FAMILIES:
            raise ConfigError(f"--unpenalized must be a subset of {sorted(PENALIZABLE_FAMILIES)}")
        if self.persistence_threshold is not None and self.persistence_threshold < 1:
            raise ConfigError("--persistence-threshold must be >= 1")
        if self.event not in MODEL_EVENTS:
            raise ConfigError(f"--event must be one of {MODEL_EVENTS}")
        if self.asd_orientation not in ASD_ORIENTATIONS:
            raise ConfigError(f"--asd-orientation must be one of {ASD_ORIENTATIONS}")
        if self.goal_term not in GOAL_TERMS:
            raise ConfigError(f"--goal-term must be one of {GOAL_TERMS}")
        if self.neutral_sites not in NEUTRAL_SITE_MODES:
            raise ConfigError(f"--neutral-sites must be one of {NEUTRAL_SITE_MODES}")
        if self.command != "synth" and self.input is None:
            raise ConfigError(f"{self.command} requires --input")
        self.planted(self.plant)
        self.planted(self.plant_homer)
        return

    @staticmethod
    def planted(items: Sequence[str]) -> Dict[str, Dict[str, float]]:
        """Parse `EVENT:RINK=EFFECT` items into effects per event and rink"""
        result: Dict[str, Dict[str, float]] = {}
        for item in items:
            try:
                event, rest = item.split(":", 1)
                rink, effect = rest.split("=", 1)
                value = float(effect)
            except ValueError:
                raise ConfigError(f"invalid planted effect {item!r}") from None
            if event not in PRIMARY_EVENTS:
                raise ConfigError(f"effects can only be planted on {PRIMARY_EVENTS}")
            if not value > 0:
                raise ConfigError(f"planted effect must be > 0, got {item!r}")
            result.setdefault(event, {})[rink] = value
        return result

    def solver_spec(self) -> ElasticNetSpec:
        return ElasticNetSpec(
            alpha=self.alpha,
            n_lambda=self.n_lambda,
            path_ratio=self.path_ratio,
            folds=self.folds,
            repeats=self.cv_repeats,
            seed=self.seed,
        )

    def synthetic_config(self) -> SyntheticConfig:
        seasons = tuple(
            f"{FIRST_SYNTHETIC_SEASON + i}{FIRST_SYNTHETIC_SEASON + i + 1}"
            for i in range(self.n_seasons)
        )
        games = [self.games] * self.n_seasons
        if self.short_season_games is not None:
            games[-1] = self.short_season_games
        teams = tuple(f"T{k:02d}" for k in range(1, self.teams + 1))
        rink = self.planted(self.plant)
        homer = self.planted(self.plant_homer)
        truth = {
            event: EventTruth(
                mean=DEFAULT_MEANS[event], rink=rink.get(event, {}), homer=homer.get(event, {})
            )
            for event in sorted(set(rink) | set(homer) | {"HIT"})
        }
        return SyntheticConfig(
            seasons=seasons,
            games_per_season=tuple(games),
            teams=teams,
            truth=truth,
            noise_sd=self.noise_sd,
            noise_mode=self.noise_mode,
            goal_term=self.goal_term,
            counts=self.counts,
            seed=self.seed,
        )


class Pipeline(LoggingMixin):
    """Runs one command and turns failures into exit codes"""

    def __init__(self, exit_code_handler: ExitCodeHandler | None = None) -> None:
        self.exit_code_handler = (
            exit_code_handler if exit_code_handler is not None else ExitCodeHandler()
        )
        self.logger = self.get_logger()
        return

    def execute(self, args: argparse.Namespace) -> int:
        """Run the command described by `args`.

        Returns:
            0 on success, otherwise the exit code of the failure
        """
        try:
            config = RunConfig.from_args(args)
            handler = getattr(self, f"run_{config.command}")
            handler(config)
        except (Exception, KeyboardInterrupt) as e:  # pylint: disable=broad-except
            code = self.exit_code_handler.exit_code(e)
            self.error(f"{e.__class__.__name__}: {e}")
            return code
        return 0

    ## Commands
    ## -------------------------------------------------------------------------
    def run_ingest(self, config: RunConfig) -> None:
        assert config.input is not None
        rinks = RinkTable.from_csv(config.rinks) if config.rinks else RinkTable.default()
        options = TeamGameOptions(
            asd_orientation=config.asd_orientation,
            goal_term=config.goal_term,
            neutral_sites=config.neutral_sites,
            neutral_site_games=self._neutral_site_games(config),
            rinks=rinks,
        )

        parser = PbpParser(strict=config.strict)
        games = parser.parse(config.input)
        if config.seasons is not None:
            games = {k: v for k, v in games.items() if v[0].season in config.seasons}
        builder = TeamGameBuilder(options)
        team_games = builder.build(games)

        rejections = [("parse", game_id, reason) for game_id, reason in parser.rejected.items()]
        rejections += [
            ("teamgame", game_id, reason) for game_id, reason in builder.rejected.items()
        ]
        rejections.sort(key=lambda item: (item[1], item[0]))

        self._make_output(config)
        r.write_team_games(team_games, self._path(config, "team_games.csv"))
        r.write_table(
            pd.DataFrame(rejections, columns=["stage", "game_id", "reason"]),
            self._path(config, "rejections.csv"),
        )
        return

    def run_fit(self, config: RunConfig) -> None:
        team_games = self._read_team_games(config)
        self._make_output(config)
        fits = []
        for models in self._fit_events(config, team_games):
            for model in models.all_fits:
                stem = f"{model.event}_{model.scope}"
                r.write_table(
                    r.cv_diagnostics_frame(model.fit), self._path(config, f"{stem}_cv.csv")
                )
                r.write_table(
                    r.coefficient_path_frame(model.design, model.fit),
                    self._path(config, f"{stem}_path.csv"),
                )
                if config.dump_design:
                    r.write_table(
                        r.design_frame(model.design), self._path(config, f"{stem}_design.csv")
                    )
                fits.append(r.effect_table_to_dict(model.table))
        r.write_json({"fits": fits}, self._path(config, "fits.json"))
        return

    def run_effects(self, config: RunConfig) -> None:
        team_games = self._read_team_games(config)
        rule = PersistenceRule(config.persistence_threshold)
        self._make_output(config)

        tables = []
        reports = []
        for models in self._fit_events(config, team_games):
            report = build_persistence_report(models.yearly_tables, models.pooled_table, rule)
            reports.append(report)
            tables.extend(r.effect_table_to_dict(model.table) for model in models.all_fits)
            r.write_table(
                r.yearly_coefficients_frame(yearly_coefficients(models.yearly_tables)),
                self._path(config, f"yearly_{models.event}.csv"),
            )
            r.write_table(
                r.significant_rinks_frame(significant_rinks(report)),
                self._path(config, f"significant_{models.event}.csv"),
            )
            self.info(
                f"{models.event}: {len(report.persistent_rinks)} persistent rinks, "
                f"{len(report.homer_rinks)} persistent homers"
            )

        r.write_json({"tables": tables}, self._path(config, "effects.json"))
        r.write_persistence(reports, self._path(config, "persistence.json"))
        r.write_table(r.persistence_frame(reports), self._path(config, "persistence.csv"))
        return

    def run_adjust(self, config: RunConfig) -> None:
        assert config.input is not None
        reports = {report.event: report for report in r.read_persistence(config.input)}
        rinks = RinkTable.from_csv(config.rinks) if config.rinks else RinkTable.default()
        excluded: frozenset[str] = frozenset()
        if config.neutral_sites == "exclude":
            excluded = self._neutral_site_games(config)
        self._make_output(config)
        r.write_table(
            r.weights_frame(AdjustmentWeights.from_reports(reports.values())),
            self._path(config, "weights.csv"),
        )

        if config.pbp is None and config.team_games is None:
            self.warning("Neither --pbp nor --team-games given, only weights written")
            return

        if config.pbp is not None:
            report = self._report(reports, config.event)
            season = config.season or report.seasons[-1]
            games = parse_pbp(config.pbp)
            events = [
                event
                for game_id, game in games.items()
                if game_id not in excluded
                for event in game
            ]
            counts = adjust_player_counts(events, report, season, config.event, rinks)
            if counts.skipped:
                self.warning(f"{counts.skipped} {config.event} events have no player")
            r.write_table(
                r.adjusted_counts_frame(counts),
                self._path(config, f"adjusted_{config.event}_{season}.csv"),
            )

        if config.team_games is not None:
            report = self._report(reports, "CORSI")
            season = config.season or report.seasons[-1]
            team_games = [
                team_game
                for team_game in r.read_team_games(config.team_games)
                if team_game.game_id not in excluded
            ]
            rows = adjust_corsi_pct(team_games, report, season)
            r.write_table(
                r.corsi_pct_frame(rows), self._path(config, f"corsi_pct_{season}.csv"), "%.4f"
            )
        return

    def run_synth(self, config: RunConfig) -> None:
        synthetic = config.synthetic_config()
        data = SyntheticLeague(synthetic).generate()
        self._make_output(config)
        r.write_team_games(data.team_games, self._path(config, "team_games.csv"))
        r.write_json(synthetic.truth_record(), self._path(config, "truth.json"))
        if synthetic.counts:
            serialize_pbp(data.events, self._path(config, "events.csv"))
        return

    def run_report(self, config: RunConfig) -> None:
        assert config.input is not None
        reports = r.read_persistence(config.input)
        summary = summarize(reports, config.events)
        self._make_output(config)
        r.write_table(r.summary_frame(summary), self._path(config, "summary.csv"))
        r.write_json(
            {
                "summary": r.summary_frame(summary).to_dict(orient="records"),
                "rink_counts": summary.rink_counts,
                "quiet_rinks": summary.quiet_rinks,
            },
            self._path(config, "summary.json"),
        )
        r.write_table(r.rink_overview_frame(summary), self._path(config, "rink_overview.csv"))
        r.write_table(r.grid_frame(effect_grid(reports)), self._path(config, "grid.csv"))
        return

    ## Helpers
    ## -------------------------------------------------------------------------
    def _fit_events(self, config: RunConfig, team_games: List[TeamGame]) -> List[EventModels]:
        fitter = EventModelFitter(
            config.solver_spec(), unpenalized=config.unpenalized, jobs=config.jobs
        )
        return [fitter.fit(team_games, event, config.seasons) for event in config.events]

    def _read_team_games(self, config: RunConfig) -> List[TeamGame]:
        assert config.input is not None
        team_games = r.read_team_games(config.input)
        self.info(f"Read {len(team_games)} team-games from {config.input}")
        return team_games

    def _neutral_site_games(self, config: RunConfig) -> frozenset[str]:
        if not config.neutral_site_games:
            return frozenset()
        frame = r.read_table(config.neutral_site_games)
        if "game_id" not in frame.columns:
            raise ConfigError(f"{config.neutral_site_games}: needs a game_id column")
        self.debug(f"{len(frame)} neutral site games in {config.neutral_site_games}")
        return frozenset(frame["game_id"].astype(str))

    @staticmethod
    def _report(reports: Dict[str, PersistenceReport], event: str) -> PersistenceReport:
        if event not in reports:
            raise AdjustmentError(f"no persistence report for {event}")
        return reports[event]

    def _make_output(self, config: RunConfig) -> None:
        os.makedirs(config.output, exist_ok=True)
        self.debug(f"Writing artifacts to {config.output}")
        return

    @staticmethod
    def _path(config: RunConfig, name: str) -> str:
        return os.path.join(config.output, name)


class CliApplication(pillar.application.Application):
    """Rink effects CLI tool"""

    application_name = "rinkeffects"
    name = "rinkeffects"
    version = _version.VERSION_INFO_FULL
    epilog = EPILOG

    config_args_enabled = False

    def get_argument_parser(self) -> argparse.ArgumentParser:
        parser = super().get_argument_parser()
        parser.formatter_class = _HelpFormatter
        return add_arguments(parser)

    def main(self) -> int | None:
        return Pipeline().execute(self.args)
