# pylint: disable=redefined-outer-name

### IMPORTS
### ============================================================================
## Future
from __future__ import annotations

## Standard Library

## Installed
import pytest

## Application
from rinkeffects.effects import EventModelFitter, EventModels
from rinkeffects.synth import EventTruth, SyntheticConfig, SyntheticData, generate_team_games


### FIXTURES
### ============================================================================
@pytest.fixture(scope="session")
def planted_league() -> SyntheticData:
    """Small league with a strong below average HIT rink and a strong above average one"""
    config = SyntheticConfig(
        seasons=("20102011", "20112012", "20122013"),
        games_per_season=120,
        truth={"HIT": EventTruth(22.0, rink={"T01": 0.6, "T02": 1.6})},
        noise_sd=0.2,
        seed=11,
    )
    return generate_team_games(config)


@pytest.fixture(scope="session")
def planted_models(planted_league: SyntheticData) -> EventModels:
    return EventModelFitter().fit(planted_league.team_games, "HIT")
