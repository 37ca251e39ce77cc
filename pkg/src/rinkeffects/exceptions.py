### IMPORTS
### ============================================================================
## Future
from __future__ import annotations

## Standard Library

## Installed

## Application


### CLASSES
### ============================================================================
class RinkEffectsError(Exception):
    """Base class for all errors raised by this package.

    Attributes:
        exit_code: process exit code used by the CLI when this error ends a run.
    """

    exit_code: int = 1


class ConfigError(RinkEffectsError, ValueError):
    """Invalid flags or configuration values.

    Raised before any input file is read.
    """

    exit_code = 2


class InputFileError(RinkEffectsError, FileNotFoundError):
    """An input file is missing or unreadable"""

    exit_code = 3

    def __init__(self, path: str, reason: str = "file not found") -> None:
        """
        Args:
            path: the offending path
            reason: short description of the problem
        """
        self.path = path
        self.reason = reason
        super().__init__(f"{reason}: {path}")
        return


class SchemaError(RinkEffectsError, ValueError):
    """Input data does not match the expected schema"""

    exit_code = 4


class ParseError(SchemaError):
    """A single row could not be parsed"""

    def __init__(self, line: int, field: str, message: str) -> None:
        """
        Args:
            line: 1-based line number in the input file (header is line 1)
            field: name of the column that failed
            message: description of the problem
        """
        self.line = line
        self.field = field
        super().__init__(f"line {line}, field {field!r}: {message}")
        return


class DuplicateEventError(SchemaError):
    """Two rows describe the same event of the same game"""

    def __init__(self, game_id: str, line: int, first_line: int) -> None:
        self.game_id = game_id
        self.line = line
        self.first_line = first_line
        super().__init__(
            f"line {line}: duplicate event in game {game_id!r} (first seen on line {first_line})"
        )
        return


class GameRejectedError(SchemaError):
    """A game cannot be used and must be dropped"""

    def __init__(self, game_id: str, reason: str) -> None:
        self.game_id = game_id
        self.reason = reason
        super().__init__(f"game {game_id!r} rejected: {reason}")
        return


class IntervalError(SchemaError):
    """Event timestamps cannot be turned into a valid set of intervals"""


class DesignError(RinkEffectsError, ValueError):
    """Team-game observations cannot be encoded into a design matrix"""

    exit_code = 4


class SolverError(RinkEffectsError, ArithmeticError):
    """The elastic net solver could not produce a solution"""

    exit_code = 5


class ConvergenceError(SolverError):
    """Coordinate descent did not converge at some point of the lambda path"""

    def __init__(self, lambda_index: int, lambda_value: float, max_iter: int) -> None:
        self.lambda_index = lambda_index
        self.lambda_value = lambda_value
        self.max_iter = max_iter
        super().__init__(
            f"no convergence within {max_iter} sweeps at lambda[{lambda_index}]={lambda_value:.6g}"
        )
        return


class ModelFitError(SolverError):
    """A solver error raised while fitting the model of one event and scope"""

    def __init__(self, event: str, scope: str, error: Exception) -> None:
        """
        Args:
            event: event type being modeled
            scope: season id or `"pooled"`
            error: the original solver error
        """
        self.event = event
        self.scope = scope
        self.error = error
        super().__init__(f"{event}/{scope}: {error}")
        return


class AdjustmentError(RinkEffectsError, ValueError):
    """Adjustment weights were requested for something the reports do not cover"""

    exit_code = 6
