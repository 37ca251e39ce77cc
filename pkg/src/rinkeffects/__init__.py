### IMPORTS
### ============================================================================
from .models import EventType, RawEvent, EventInterval, TeamGame, MODEL_EVENTS
from .ingest import parse_pbp, compute_intervals, PbpParser
from .teamgame import prorate, compute_asd, build_team_games, TeamGameBuilder, TeamGameOptions
from .design import encode_yearly, encode_pooled, DesignMatrix, ResponseVector
from .solver import soft_threshold, fit_path, cross_validate, ElasticNet, ElasticNetSpec, FitResult
from .effects import (
    fit_event_models,
    classify_persistence,
    build_persistence_report,
    summarize,
    EffectTable,
    PersistenceReport,
    PersistenceRule,
)
from .adjust import event_weight, adjust_player_counts, adjust_corsi_pct, AdjustmentWeights
from .synth import generate_team_games, recovery_error, SyntheticConfig, EventTruth
