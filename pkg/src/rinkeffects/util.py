### IMPORTS
### ============================================================================
## Future
from __future__ import annotations

## Standard Library
import hashlib

## Installed

## Application


### FUNCTIONS
### ============================================================================
def is_in_range(
    value: float,
    low: float | None = None,
    high: float | None = None,
    *,
    throw_error: bool = False,
    value_name: str = "value",
) -> bool:
    """Check if a given number lies within a closed interval.

    Args:
        value: number to check
        low: inclusive lower bound, `None` for unbounded
        high: inclusive upper bound, `None` for unbounded
        throw_error: throw a `ValueError` if the result is `False`
        value_name: name to use when throwing an error

    Raises:
        ValueError: if `low > high`
        ValueError: if `throw_error` is `True` and the result would be `False`.
    """
    if low is not None and high is not None and low > high:
        raise ValueError("low must be <= high")

    result = value == value  # NaN is never in range
    if low is not None:
        result = result and value >= low
    if high is not None:
        result = result and value <= high

    if not result and throw_error:
        low_str = "-inf" if low is None else f"{low}"
        high_str = "inf" if high is None else f"{high}"
        raise ValueError(f"{value_name} must be between {low_str} and {high_str} inclusive")
    return result


def derive_seed(seed: int, *namespace: str) -> int:
    """Derive an independent seed for a named purpose.

    Streams are keyed by name, not by draw order.

    Args:
        seed: the run seed
        namespace: purpose labels, e.g. `("cv", "HIT", "pooled")`

    Returns:
        Non-negative 63 bit integer
    """
    key = "/".join([str(int(seed)), *namespace]).encode("utf-8")
    digest = hashlib.sha256(key).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def format_season(season: str) -> str:
    """Human readable season label: `"20072008"` -> `"2007-08"`.

    Season ids that are not eight digits are returned unchanged.
    """
    if len(season) == 8 and season.isdigit():
        return f"{season[:4]}-{season[6:]}"
    return season
