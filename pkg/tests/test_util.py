# pylint: disable=missing-class-docstring,missing-function-docstring

### IMPORTS
### ============================================================================
## Standard Library

## Installed
import pytest

from rinkeffects.util import derive_seed, format_season, is_in_range

## Application


### TESTS
### ============================================================================
@pytest.mark.parametrize(
    "value,low,high,expected",
    [
        (0, 0, 1, True),
        (1, 0, 1, True),
        (0.5, 0, 1, True),
        (-0.1, 0, 1, False),
        (1.1, 0, 1, False),
        (10**9, 0, None, True),
        (-(10**9), None, 0, True),
        (3, 3, 6, True),
        (7, 3, 6, False),
        (float("nan"), None, None, False),
        (float("nan"), 0, 1, False),
    ],
)
def test_is_in_range(value: float, low, high, expected: bool):
    assert is_in_range(value, low, high) == expected

    if not expected:
        # Check also throws error correctly
        with pytest.raises(ValueError, match="xxx must be between"):
            is_in_range(value, low, high, throw_error=True, value_name="xxx")
    return


def test_is_in_range_bad_bounds():
    with pytest.raises(ValueError, match="low must be <= high"):
        is_in_range(1, 2, 1)
    return


def test_derive_seed_is_stable():
    assert derive_seed(7, "cv", "HIT", "pooled") == derive_seed(7, "cv", "HIT", "pooled")
    assert 0 <= derive_seed(7, "cv", "HIT", "pooled") < 2**63
    return


@pytest.mark.parametrize(
    "left,right",
    [
        ((7, "cv", "HIT", "pooled"), (8, "cv", "HIT", "pooled")),
        ((7, "cv", "HIT", "pooled"), (7, "cv", "SHOT", "pooled")),
        ((7, "cv", "HIT", "pooled"), (7, "cv", "HIT", "20122013")),
        ((7, "synth", "20122013"), (7, "cv", "20122013")),
    ],
)
def test_derive_seed_namespaces_differ(left, right):
    assert derive_seed(*left) != derive_seed(*right)
    return


@pytest.mark.parametrize(
    "season,expected",
    [
        ("20072008", "2007-08"),
        ("20122013", "2012-13"),
        ("19992000", "1999-00"),
        ("S1", "S1"),
    ],
)
def test_format_season(season: str, expected: str):
    assert format_season(season) == expected
    return
