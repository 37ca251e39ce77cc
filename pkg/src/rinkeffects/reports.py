"""Readers and writers for pipeline artifacts.

Delimited tables are written with pandas using fixed float formats so that re-running a
command reproduces files byte for byte. Structured reports are JSON documents carrying a
`schema_version`.
"""

### IMPORTS
### ============================================================================
## Future
from __future__ import annotations

## Standard Library
import json
import math
import os
from typing import Any, Dict, Iterable, List, Mapping, Sequence

## Installed
import numpy as np
import pandas as pd

## Application
from .adjust import AdjustedCounts, AdjustmentWeights, CorsiPctRow
from .design import DesignMatrix
from .effects import (
    EffectTable,
    GridCell,
    PersistenceEntry,
    PersistenceReport,
    Summary,
    YearlyCoefficientRow,
)
from .exceptions import InputFileError, SchemaError
from .models import COUNT_EVENTS, MODEL_EVENTS, TeamGame
from .solver import FitResult
from .util import format_season

### CONSTANTS
### ============================================================================
SCHEMA_VERSION = 1

EXACT_FLOAT_FORMAT = "%.17g"
"""Round trips every float"""

REPORT_FLOAT_FORMAT = "%.10g"

TEAM_GAME_COLUMNS: tuple[str, ...] = (
    "game_id",
    "season",
    "for_team",
    "against_team",
    "is_home",
    "rink",
    "asd",
    "nen5v5_seconds",
    *(f"rate_{event}" for event in MODEL_EVENTS),
    *(f"count_{event}" for event in COUNT_EVENTS),
)


### FUNCTIONS
### ============================================================================
## Generic
## -----------------------------------------------------------------------------
def write_json(data: Mapping[str, Any], path: str) -> None:
    """Write a structured report with sorted keys and a schema version.

    Non-finite numbers are written as `null`.
    """
    document = _json_safe({"schema_version": SCHEMA_VERSION, **data})
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(document, f, sort_keys=True, indent=2, allow_nan=False)
        f.write("\n")
    return


def _json_safe(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {key: _json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(item) for item in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    return value


def read_json(path: str) -> Dict[str, Any]:
    """Read a structured report.

    Raises:
        InputFileError: `path` does not exist
        SchemaError: the document is not JSON or has another schema version
    """
    if not os.path.isfile(path):
        raise InputFileError(path)
    with open(path, "r", encoding="utf-8") as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as e:
            raise SchemaError(f"{path}: {e}") from None
    version = document.get("schema_version") if isinstance(document, dict) else None
    if version != SCHEMA_VERSION:
        raise SchemaError(f"{path}: schema_version {version!r}, expected {SCHEMA_VERSION}")
    return document


def write_table(frame: pd.DataFrame, path: str, float_format: str = REPORT_FLOAT_FORMAT) -> None:
    """Write a delimited table"""
    frame.to_csv(path, index=False, lineterminator="\n", float_format=float_format)
    return


def read_table(path: str) -> pd.DataFrame:
    """Read a delimited table with every column as text.

    Raises:
        InputFileError: `path` does not exist
    """
    if not os.path.isfile(path):
        raise InputFileError(path)
    return pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")


## Team-games
## -----------------------------------------------------------------------------
def team_games_frame(team_games: Sequence[TeamGame]) -> pd.DataFrame:
    rows = []
    for team_game in team_games:
        row: Dict[str, Any] = {
            "game_id": team_game.game_id,
            "season": team_game.season,
            "for_team": team_game.for_team,
            "against_team": team_game.against_team,
            "is_home": int(team_game.is_home),
            "rink": team_game.rink,
            "asd": team_game.asd,
            "nen5v5_seconds": team_game.nen5v5_seconds,
        }
        row.update({f"rate_{event}": team_game.rate[event] for event in MODEL_EVENTS})
        row.update({f"count_{event}": team_game.count[event] for event in COUNT_EVENTS})
        rows.append(row)
    return pd.DataFrame(rows, columns=list(TEAM_GAME_COLUMNS))


def write_team_games(team_games: Sequence[TeamGame], path: str) -> None:
    write_table(team_games_frame(team_games), path, EXACT_FLOAT_FORMAT)
    return


def read_team_games(path: str) -> List[TeamGame]:
    """Read a team-game table written by `write_team_games`.

    Raises:
        InputFileError: `path` does not exist
        SchemaError: columns or values are wrong
    """
    frame = read_table(path)
    if tuple(frame.columns) != TEAM_GAME_COLUMNS:
        raise SchemaError(f"{path}: unexpected team-game columns")
    team_games = []
    for index, row in enumerate(frame.to_dict(orient="records")):
        try:
            team_games.append(
                TeamGame(
                    game_id=row["game_id"],
                    season=row["season"],
                    for_team=row["for_team"],
                    against_team=row["against_team"],
                    is_home=row["is_home"] == "1",
                    rink=row["rink"],
                    asd=float(row["asd"]),
                    nen5v5_seconds=float(row["nen5v5_seconds"]),
                    rate={event: float(row[f"rate_{event}"]) for event in MODEL_EVENTS},
                    count={event: float(row[f"count_{event}"]) for event in COUNT_EVENTS},
                )
            )
        except ValueError as e:
            raise SchemaError(f"{path}: line {index + 2}: {e}") from None
    return team_games


## Fits
## -----------------------------------------------------------------------------
def cv_diagnostics_frame(fit: FitResult) -> pd.DataFrame:
    """Lambda, mean held-out error, its standard error and the nonzero count"""
    frame = pd.DataFrame(
        {
            "lambda": fit.lambdas,
            "cv_mean": fit.cv_mean,
            "cv_se": fit.cv_se,
            "nonzero": fit.nonzero,
        }
    )
    frame["chosen"] = [int(i == fit.chosen_index) for i in range(len(frame))]
    frame["one_se"] = (frame["lambda"] == fit.lambda_1se).astype(int)
    return frame


def coefficient_path_frame(design: DesignMatrix, fit: FitResult) -> pd.DataFrame:
    """Coefficients of every column along the path"""
    frame = pd.DataFrame(fit.coefficients, columns=design.column_names)
    frame.insert(0, "intercept_free", fit.intercepts)
    frame.insert(0, "lambda", fit.lambdas)
    return frame


def design_frame(design: DesignMatrix) -> pd.DataFrame:
    """Design matrix dump, header carrying the column labels"""
    return design.to_frame()


## Effects
## -----------------------------------------------------------------------------
def effect_table_to_dict(table: EffectTable) -> Dict[str, Any]:
    return {
        "event": table.event,
        "scope": table.scope,
        "seasons": list(table.seasons),
        "lambda_chosen": table.lambda_chosen,
        "lambda_1se": table.lambda_1se,
        "intercept": table.intercept,
        "coefficients": dict(sorted(table.coefficients.items())),
        "mean_effect": table.mean_effect,
        "asd_effect": table.asd_effect,
        "home_effect": table.home_effect,
        "rink_effect": table.rink_effect,
        "homer_effect": table.homer_effect,
    }


def effect_table_from_dict(data: Mapping[str, Any]) -> EffectTable:
    """Rebuild an `EffectTable`, derived effects are recomputed from coefficients"""
    try:
        return EffectTable(
            event=data["event"],
            scope=data["scope"],
            seasons=tuple(data["seasons"]),
            lambda_chosen=float(data["lambda_chosen"]),
            lambda_1se=float(data["lambda_1se"]),
            intercept=float(data["intercept"]),
            coefficients={k: float(v) for k, v in data["coefficients"].items()},
        )
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"invalid effect table: {e!r}") from None


def persistence_entry_to_dict(entry: PersistenceEntry) -> Dict[str, Any]:
    return {
        "rink": entry.rink,
        "event": entry.event,
        "persistent": entry.persistent,
        "direction": entry.direction,
        "pooled_effect": entry.pooled_effect,
        "yearly_effects": entry.yearly_effects,
        "homer_persistent": entry.homer_persistent,
        "homer_direction": entry.homer_direction,
        "pooled_homer_effect": entry.pooled_homer_effect,
        "yearly_homer_effects": entry.yearly_homer_effects,
    }


def persistence_report_to_dict(report: PersistenceReport) -> Dict[str, Any]:
    return {
        "event": report.event,
        "seasons": list(report.seasons),
        "asd_effects": report.asd_effects,
        "home_effects": report.home_effects,
        "entries": [persistence_entry_to_dict(entry) for entry in report.entries.values()],
    }


def persistence_report_from_dict(data: Mapping[str, Any]) -> PersistenceReport:
    try:
        entries = {}
        for item in data["entries"]:
            entry = PersistenceEntry(
                rink=item["rink"],
                event=item["event"],
                persistent=bool(item["persistent"]),
                direction=item["direction"],
                pooled_effect=float(item["pooled_effect"]),
                yearly_effects={k: float(v) for k, v in item["yearly_effects"].items()},
                homer_persistent=bool(item["homer_persistent"]),
                homer_direction=item["homer_direction"],
                pooled_homer_effect=float(item["pooled_homer_effect"]),
                yearly_homer_effects={
                    k: float(v) for k, v in item["yearly_homer_effects"].items()
                },
            )
            entries[entry.rink] = entry
        return PersistenceReport(
            event=data["event"],
            seasons=tuple(data["seasons"]),
            entries=dict(sorted(entries.items())),
            asd_effects={k: float(v) for k, v in data["asd_effects"].items()},
            home_effects={k: float(v) for k, v in data["home_effects"].items()},
        )
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"invalid persistence report: {e!r}") from None


def write_persistence(reports: Iterable[PersistenceReport], path: str) -> None:
    write_json({"reports": [persistence_report_to_dict(report) for report in reports]}, path)
    return


def read_persistence(path: str) -> List[PersistenceReport]:
    document = read_json(path)
    if "reports" not in document:
        raise SchemaError(f"{path}: not a persistence document")
    return [persistence_report_from_dict(item) for item in document["reports"]]


def persistence_frame(reports: Iterable[PersistenceReport]) -> pd.DataFrame:
    """One row per (event, rink) with yearly effects spread over columns"""
    rows = []
    for report in reports:
        for entry in report.entries.values():
            row: Dict[str, Any] = {
                "event": entry.event,
                "rink": entry.rink,
                "persistent": int(entry.persistent),
                "direction": entry.direction or "",
                "pooled_effect": entry.pooled_effect,
                "homer_persistent": int(entry.homer_persistent),
                "homer_direction": entry.homer_direction or "",
                "pooled_homer_effect": entry.pooled_homer_effect,
            }
            for season, effect in entry.yearly_effects.items():
                row[f"effect_{season}"] = effect
            rows.append(row)
    return pd.DataFrame(rows)


def yearly_coefficients_frame(rows: Sequence[YearlyCoefficientRow]) -> pd.DataFrame:
    """Mean, ASD and home effects per season, blank where not significant"""
    return pd.DataFrame(
        [
            {
                "season": format_season(row.season),
                "mean": row.mean_effect,
                "asd": row.asd_effect,
                "home": row.home_effect,
            }
            for row in rows
        ],
        columns=["season", "mean", "asd", "home"],
    )


def significant_rinks_frame(rows: Sequence[tuple[str, float]]) -> pd.DataFrame:
    return pd.DataFrame(rows, columns=["rink", "effect"])


def summary_frame(summary: Summary) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "event": row.event,
                "persistent_rinks": row.persistent_rinks,
                "persistent_homers": row.persistent_homers,
                "effect_range": row.effect_range,
                "mean_asd_effect": row.mean_asd_effect,
                "mean_home_effect": row.mean_home_effect,
            }
            for row in summary.rows
        ],
        columns=[
            "event",
            "persistent_rinks",
            "persistent_homers",
            "effect_range",
            "mean_asd_effect",
            "mean_home_effect",
        ],
    )


def rink_overview_frame(summary: Summary) -> pd.DataFrame:
    return pd.DataFrame(list(summary.rink_counts.items()), columns=["rink", "persistent_events"])


def grid_frame(cells: Sequence[GridCell]) -> pd.DataFrame:
    """Plot ready rink by season by event effects"""
    return pd.DataFrame(
        [
            {
                "event": cell.event,
                "rink": cell.rink,
                "season": cell.season,
                "effect": cell.effect,
                "direction": cell.direction or "",
            }
            for cell in cells
        ],
        columns=["event", "rink", "season", "effect", "direction"],
    )


## Adjustments
## -----------------------------------------------------------------------------
def adjusted_counts_frame(counts: AdjustedCounts) -> pd.DataFrame:
    """Name, team, adjusted, raw, differential"""
    return pd.DataFrame(
        [
            {
                "name": row.name,
                "team": row.team,
                "adjusted": row.adjusted,
                "raw": row.raw,
                "differential": row.differential,
            }
            for row in counts.rows
        ],
        columns=["name", "team", "adjusted", "raw", "differential"],
    )


def corsi_pct_frame(rows: Sequence[CorsiPctRow]) -> pd.DataFrame:
    """Team percentages rounded to 4 decimal places"""
    return pd.DataFrame(
        [
            {
                "team": row.team,
                "raw_pct": round(row.raw_pct, 4),
                "adjusted_pct": round(row.adjusted_pct, 4),
            }
            for row in rows
        ],
        columns=["team", "raw_pct", "adjusted_pct"],
    )


def weights_frame(weights: AdjustmentWeights) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {"rink": rink, "event": event, "is_home": int(is_home), "weight": weight}
            for (rink, event, is_home), weight in sorted(weights.weights.items())
        ],
        columns=["rink", "event", "is_home", "weight"],
    )
