"""Rink effect estimation and persistence classification.

For every event a yearly model is fitted per season plus one pooled model over all
seasons. Coefficients become multiplicative effects via `exp`, and a rink effect is
*persistent* when its sign agrees across enough yearly fits and the pooled fit.
"""

### IMPORTS
### ============================================================================
## Future
from __future__ import annotations

## Standard Library
from dataclasses import dataclass, field, replace
import math
from typing import Dict, Iterable, List, Optional, Sequence

## Installed
import numpy as np
from pillar.logging import LoggingMixin

## Application
from .design import ColumnLabel, DesignMatrix, encode_pooled, encode_yearly
from .exceptions import ConfigError, ModelFitError, SolverError
from .models import TeamGame
from .solver import ElasticNet, ElasticNetSpec, FitResult
from .util import derive_seed

### CONSTANTS
### ============================================================================
POOLED_SCOPE = "pooled"

ABOVE = "above"
BELOW = "below"


### CLASSES
### ============================================================================
@dataclass(frozen=True)
class EffectTable:  # pylint: disable=too-many-instance-attributes
    """Coefficients of one fitted model at the cross-validated lambda.

    Effects are derived from `coefficients` so that a coefficient of exactly 0 always
    maps to an effect of exactly 1.

    Attributes:
        event: event type
        scope: season id of a yearly model or `"pooled"`
        seasons: seasons covered by the model
        lambda_chosen: lambda minimizing cross-validated error
        lambda_1se: largest lambda within one standard error of the minimum
        intercept: free intercept of the fit
        coefficients: coefficient per column label
    """

    event: str
    scope: str
    seasons: tuple[str, ...]
    lambda_chosen: float
    lambda_1se: float
    intercept: float
    coefficients: Dict[str, float] = field(default_factory=dict)

    @classmethod
    def from_fit(
        cls, event: str, scope: str, design: DesignMatrix, fit: FitResult
    ) -> EffectTable:
        """Build the table from a cross-validated fit of `design`"""
        seasons = sorted({label.season for label in design.labels if label.season is not None})
        if not seasons:
            seasons = [scope]
        coefficients = fit.chosen_coefficients
        return cls(
            event=event,
            scope=scope,
            seasons=tuple(seasons),
            lambda_chosen=fit.lambda_chosen,
            lambda_1se=float(fit.lambda_1se if fit.lambda_1se is not None else fit.lambda_chosen),
            intercept=fit.chosen_intercept,
            coefficients={
                str(label): float(value) for label, value in zip(design.labels, coefficients)
            },
        )

    @property
    def is_pooled(self) -> bool:
        return self.scope == POOLED_SCOPE

    def coefficient(
        self, family: str, level: str | None = None, season: str | None = None
    ) -> float:
        """Coefficient of a column, 0 if the column does not exist.

        For yearly tables `season` is ignored, seasonal families have a single column.
        """
        if not self.is_pooled or family in ("rink", "home_rink"):
            season = None
        return self.coefficients.get(str(ColumnLabel(family, level, season)), 0.0)

    @property
    def rinks(self) -> List[str]:
        """Rinks with a rink column in the model"""
        return sorted(
            label.level
            for label in map(ColumnLabel.parse, self.coefficients)
            if label.family == "rink" and label.level is not None
        )

    @property
    def mean_effect(self) -> Dict[str, float]:
        """`exp(intercept)` per season"""
        return {
            season: math.exp(self.intercept + self.coefficient("intercept", season=season))
            for season in self.seasons
        }

    @property
    def asd_effect(self) -> Dict[str, float]:
        return {season: math.exp(self.coefficient("asd", season=season)) for season in self.seasons}

    @property
    def home_effect(self) -> Dict[str, float]:
        return {
            season: math.exp(self.coefficient("home", season=season)) for season in self.seasons
        }

    @property
    def rink_effect(self) -> Dict[str, float]:
        return {rink: math.exp(self.coefficient("rink", rink)) for rink in self.rinks}

    @property
    def homer_effect(self) -> Dict[str, float]:
        return {rink: math.exp(self.coefficient("home_rink", rink)) for rink in self.rinks}

    @property
    def nonzero(self) -> Dict[str, bool]:
        """Whether each coefficient survived shrinkage"""
        return {label: value != 0 for label, value in self.coefficients.items()}


@dataclass(frozen=True)
class ModelFit:
    """A fitted model with the inputs needed to report on it"""

    event: str
    scope: str
    design: DesignMatrix
    fit: FitResult
    table: EffectTable


@dataclass(frozen=True)
class EventModels:
    """Yearly and pooled models of one event"""

    event: str
    yearly: tuple[ModelFit, ...]
    pooled: ModelFit

    @property
    def yearly_tables(self) -> List[EffectTable]:
        return [model.table for model in self.yearly]

    @property
    def pooled_table(self) -> EffectTable:
        return self.pooled.table

    @property
    def all_fits(self) -> List[ModelFit]:
        return [*self.yearly, self.pooled]


class EventModelFitter(LoggingMixin):
    """Fits the yearly and pooled models of events.

    Every fit gets its own fold seed derived from `spec.seed`, the event and the scope.
    """

    def __init__(
        self,
        spec: ElasticNetSpec | None = None,
        *,
        unpenalized: Iterable[str] = (),
        jobs: int = 1,
    ) -> None:
        """
        Args:
            spec: solver settings, `seed` is the run seed
            unpenalized: design families exempt from the penalty
            jobs: folds fitted concurrently within each cross-validation
        """
        self.spec = spec if spec is not None else ElasticNetSpec()
        self.unpenalized = tuple(unpenalized)
        self.jobs = jobs
        self.logger = self.get_logger()
        return

    def fit(
        self,
        team_games: Sequence[TeamGame],
        event: str,
        seasons: Optional[Sequence[str]] = None,
    ) -> EventModels:
        """Fit one yearly model per season and one pooled model.

        Args:
            team_games: observations
            event: event to model
            seasons: restrict to these seasons, defaults to every season present

        Raises:
            ModelFitError: the solver failed, tagged with event and scope
            DesignError: the observations cannot be encoded
        """
        if seasons is None:
            seasons = sorted({team_game.season for team_game in team_games})
        seasons = list(seasons)
        selected = [team_game for team_game in team_games if team_game.season in seasons]
        self.info(f"Fitting {event} over {len(seasons)} seasons ({len(selected)} team-games)")

        yearly = []
        for season in seasons:
            rows = [team_game for team_game in selected if team_game.season == season]
            design, response = encode_yearly(rows, event, unpenalized=self.unpenalized)
            yearly.append(self._fit(event, season, design, response.values))

        design, response = encode_pooled(selected, event, unpenalized=self.unpenalized)
        pooled = self._fit(event, POOLED_SCOPE, design, response.values)
        return EventModels(event, tuple(yearly), pooled)

    def _fit(self, event: str, scope: str, design: DesignMatrix, response: np.ndarray) -> ModelFit:
        spec = replace(self.spec, seed=derive_seed(self.spec.seed, "cv", event, scope))
        try:
            fit = ElasticNet(spec).cross_validate(design, response, jobs=self.jobs)
        except SolverError as e:
            raise ModelFitError(event, scope, e) from e
        table = EffectTable.from_fit(event, scope, design, fit)
        self.debug(
            f"{event}/{scope}: lambda={table.lambda_chosen:.6g}, "
            f"{int(fit.nonzero[fit.chosen_index])} nonzero penalized coefficients"
        )
        return ModelFit(event, scope, design, fit, table)


## Persistence
## -----------------------------------------------------------------------------
@dataclass(frozen=True)
class PersistenceRule:
    """Sign agreement rule for persistent effects.

    Attributes:
        min_agree: yearly fits that must have a nonzero coefficient with the pooled
            sign, `None` for `n - 1` of `n` seasons
    """

    min_agree: Optional[int] = None

    def __post_init__(self) -> None:
        if self.min_agree is not None and self.min_agree < 1:
            raise ConfigError(f"persistence threshold must be >= 1, got {self.min_agree}")
        return

    def threshold(self, n_seasons: int) -> int:
        if self.min_agree is not None:
            return self.min_agree
        return max(1, n_seasons - 1)

    def direction(self, yearly: Sequence[float], pooled: float) -> str | None:
        """Persistent direction of a coefficient, `None` if not persistent.

        Args:
            yearly: coefficient of each yearly fit, 0 where shrunk or absent
            pooled: coefficient of the pooled fit
        """
        if pooled == 0:
            return None
        sign = 1 if pooled > 0 else -1
        if any(value * sign < 0 for value in yearly):
            return None
        agree = sum(1 for value in yearly if value * sign > 0)
        if agree < self.threshold(len(yearly)):
            return None
        return ABOVE if sign > 0 else BELOW


@dataclass(frozen=True)
class PersistenceEntry:  # pylint: disable=too-many-instance-attributes
    """Persistence classification of one rink for one event"""

    rink: str
    event: str
    persistent: bool
    direction: str | None
    pooled_effect: float
    yearly_effects: Dict[str, float]
    homer_persistent: bool
    homer_direction: str | None
    pooled_homer_effect: float
    yearly_homer_effects: Dict[str, float]


@dataclass(frozen=True)
class PersistenceReport:
    """Persistence of every rink for one event.

    Attributes:
        event: event type
        seasons: seasons of the yearly fits
        entries: entry per rink, sorted by rink
        asd_effects: ASD effect of each yearly fit
        home_effects: home effect of each yearly fit
    """

    event: str
    seasons: tuple[str, ...]
    entries: Dict[str, PersistenceEntry]
    asd_effects: Dict[str, float] = field(default_factory=dict)
    home_effects: Dict[str, float] = field(default_factory=dict)

    @property
    def persistent_rinks(self) -> List[str]:
        return [rink for rink, entry in self.entries.items() if entry.persistent]

    @property
    def homer_rinks(self) -> List[str]:
        return [rink for rink, entry in self.entries.items() if entry.homer_persistent]


def classify_persistence(
    yearly: Sequence[EffectTable],
    pooled: EffectTable,
    rink: str,
    event: str,
    rule: PersistenceRule | None = None,
) -> PersistenceEntry:
    """Classify the rink and homer effects of one rink.

    A rink missing from a season's fit counts as a zero coefficient for that season.

    Raises:
        ValueError: tables are for a different event, or no yearly tables given
    """
    if rule is None:
        rule = PersistenceRule()
    if not yearly:
        raise ValueError("no yearly tables")
    for table in (*yearly, pooled):
        if table.event != event:
            raise ValueError(f"table for {table.event} passed while classifying {event}")

    yearly_rink = [table.coefficient("rink", rink) for table in yearly]
    yearly_homer = [table.coefficient("home_rink", rink) for table in yearly]
    pooled_rink = pooled.coefficient("rink", rink)
    pooled_homer = pooled.coefficient("home_rink", rink)

    direction = rule.direction(yearly_rink, pooled_rink)
    homer_direction = rule.direction(yearly_homer, pooled_homer)
    return PersistenceEntry(
        rink=rink,
        event=event,
        persistent=direction is not None,
        direction=direction,
        pooled_effect=math.exp(pooled_rink),
        yearly_effects={table.scope: math.exp(c) for table, c in zip(yearly, yearly_rink)},
        homer_persistent=homer_direction is not None,
        homer_direction=homer_direction,
        pooled_homer_effect=math.exp(pooled_homer),
        yearly_homer_effects={table.scope: math.exp(c) for table, c in zip(yearly, yearly_homer)},
    )


def build_persistence_report(
    yearly: Sequence[EffectTable], pooled: EffectTable, rule: PersistenceRule | None = None
) -> PersistenceReport:
    """Classify every rink seen in any of the fits"""
    event = pooled.event
    rinks = sorted(set(pooled.rinks).union(*(table.rinks for table in yearly)))
    entries = {rink: classify_persistence(yearly, pooled, rink, event, rule) for rink in rinks}
    asd_effects: Dict[str, float] = {}
    home_effects: Dict[str, float] = {}
    for table in yearly:
        asd_effects.update(table.asd_effect)
        home_effects.update(table.home_effect)
    return PersistenceReport(
        event=event,
        seasons=tuple(table.scope for table in yearly),
        entries=entries,
        asd_effects=asd_effects,
        home_effects=home_effects,
    )


## Summaries
## -----------------------------------------------------------------------------
@dataclass(frozen=True)
class SummaryRow:
    """Comparison of one event against the others"""

    event: str
    persistent_rinks: int
    persistent_homers: int
    effect_range: float
    mean_asd_effect: float
    mean_home_effect: float


@dataclass(frozen=True)
class Summary:
    """Overview across events.

    Attributes:
        rows: one row per event
        rink_counts: number of events with a persistent effect, per rink
    """

    rows: tuple[SummaryRow, ...]
    rink_counts: Dict[str, int]

    @property
    def quiet_rinks(self) -> List[str]:
        """Rinks without a persistent effect for any event"""
        return sorted(rink for rink, count in self.rink_counts.items() if count == 0)


def summarize(
    reports: Sequence[PersistenceReport], events: Optional[Iterable[str]] = None
) -> Summary:
    """Compare persistence across events.

    Args:
        reports: one report per event
        events: restrict the per-rink overview to these events, defaults to all
    """
    rows = []
    for report in reports:
        effects = [report.entries[rink].pooled_effect for rink in report.persistent_rinks]
        rows.append(
            SummaryRow(
                event=report.event,
                persistent_rinks=len(effects),
                persistent_homers=len(report.homer_rinks),
                effect_range=max(effects) - min(effects) if effects else 0.0,
                mean_asd_effect=_mean(report.asd_effects.values()),
                mean_home_effect=_mean(report.home_effects.values()),
            )
        )

    selected = set(events) if events is not None else {report.event for report in reports}
    rink_counts: Dict[str, int] = {}
    for report in reports:
        for rink, entry in report.entries.items():
            counted = report.event in selected and entry.persistent
            rink_counts[rink] = rink_counts.get(rink, 0) + int(counted)
    return Summary(tuple(rows), dict(sorted(rink_counts.items())))


@dataclass(frozen=True)
class GridCell:
    """Effect of one rink in one season for one event"""

    rink: str
    season: str
    event: str
    effect: float
    direction: str | None


def effect_grid(reports: Sequence[PersistenceReport]) -> List[GridCell]:
    """Rink by season by event yearly effects with the persistence direction.

    Ordered by event, rink then season.
    """
    cells = []
    for report in reports:
        for rink, entry in report.entries.items():
            for season, effect in entry.yearly_effects.items():
                cells.append(GridCell(rink, season, report.event, effect, entry.direction))
    cells.sort(key=lambda cell: (cell.event, cell.rink, cell.season))
    return cells


@dataclass(frozen=True)
class YearlyCoefficientRow:
    """Mean, ASD and home effects of one yearly fit, `None` where shrunk to zero"""

    season: str
    mean_effect: float
    asd_effect: Optional[float]
    home_effect: Optional[float]


def yearly_coefficients(yearly: Sequence[EffectTable]) -> List[YearlyCoefficientRow]:
    """Per season mean / ASD / home effects of the yearly fits"""
    rows = []
    for table in yearly:
        season = table.scope
        asd = table.coefficient("asd")
        home = table.coefficient("home")
        rows.append(
            YearlyCoefficientRow(
                season=season,
                mean_effect=table.mean_effect[season],
                asd_effect=math.exp(asd) if asd != 0 else None,
                home_effect=math.exp(home) if home != 0 else None,
            )
        )
    return rows


def significant_rinks(report: PersistenceReport) -> List[tuple[str, float]]:
    """Persistent pooled effects as `(name, effect)` rows.

    Above average rinks come first sorted by decreasing effect, then below average
    rinks sorted by increasing effect, then homer rows named `RINK*HOME`.
    """
    entries = list(report.entries.values())
    above = sorted(
        (entry for entry in entries if entry.direction == ABOVE),
        key=lambda entry: (-entry.pooled_effect, entry.rink),
    )
    below = sorted(
        (entry for entry in entries if entry.direction == BELOW),
        key=lambda entry: (entry.pooled_effect, entry.rink),
    )
    homers = [entry for entry in entries if entry.homer_persistent]
    rows = [(entry.rink, entry.pooled_effect) for entry in above + below]
    rows.extend((f"{entry.rink}*HOME", entry.pooled_homer_effect) for entry in homers)
    return rows


def fit_event_models(
    team_games: Sequence[TeamGame],
    event: str,
    spec: ElasticNetSpec | None = None,
    *,
    seasons: Optional[Sequence[str]] = None,
    unpenalized: Iterable[str] = (),
    jobs: int = 1,
) -> tuple[List[EffectTable], EffectTable]:
    """Fit the yearly and pooled models of one event.

    Shortcut for `EventModelFitter(...).fit(...)` returning only the effect tables.

    Returns:
        `(yearly_tables, pooled_table)`
    """
    models = EventModelFitter(spec, unpenalized=unpenalized, jobs=jobs).fit(
        team_games, event, seasons
    )
    return models.yearly_tables, models.pooled_table


def _mean(values: Iterable[float]) -> float:
    values = list(values)
    return float(np.mean(values)) if values else float("nan")
