"""Elastic net penalized least squares.

Cyclic coordinate descent over a decreasing lambda path with warm starts, plus K-fold
cross-validation for picking lambda. The minimized objective is::

    (1/2n) * sum((y_i - b0 - x_i . b)^2)
        + lambda * sum_j p_j * (alpha*|b~_j| + (1-alpha)/2 * b~_j^2)

where `b~_j` is the coefficient of column `j` after standardizing it to mean 0 and
variance 1 and `p_j` is 1 for penalized columns. Unpenalized columns are profiled out
by projecting them (and the intercept) out of the response and the penalized columns.
"""

### IMPORTS
### ============================================================================
## Future
from __future__ import annotations

## Standard Library
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Union

## Installed
import numpy as np
from pillar.logging import LoggingMixin

## Application
from .design import DesignMatrix, ResponseVector
from .exceptions import ConfigError, ConvergenceError, SolverError
from .util import derive_seed, is_in_range

### CONSTANTS
### ============================================================================
MIN_ALPHA_FOR_LAMBDA_MAX = 1e-3
"""Lower bound on alpha when computing lambda_max"""

LAMBDA_MAX_FLOOR = 1e-12
"""lambda_max used when the response carries no signal for any penalized column"""

_CONSTANT_COLUMN_SD = 1e-12
_RANK_TOLERANCE = 1e-10

DesignInput = Union[DesignMatrix, np.ndarray]
ResponseInput = Union[ResponseVector, np.ndarray]


### FUNCTIONS
### ============================================================================
def soft_threshold(z: float, g: float) -> float:
    """Soft thresholding operator `sign(z) * max(|z| - g, 0)`.

    Raises:
        ValueError: `g` is negative
    """
    if g < 0:
        raise ValueError(f"g must be >= 0, got {g}")
    if z > g:
        return z - g
    if z < -g:
        return z + g
    return 0.0


def assign_folds(n_rows: int, folds: int, seed: int) -> np.ndarray:
    """Partition rows into folds by a seeded shuffle.

    Returns:
        Fold id of every row. Fold sizes differ by at most one.
    """
    if folds < 2:
        raise ConfigError(f"folds must be >= 2, got {folds}")
    order = np.random.default_rng(seed).permutation(n_rows)
    fold_ids = np.empty(n_rows, dtype=int)
    fold_ids[order] = np.arange(n_rows) % folds
    return fold_ids


def fit_path(
    design: DesignInput,
    response: ResponseInput,
    spec: ElasticNetSpec | None = None,
    *,
    penalized: Optional[Sequence[bool]] = None,
    warm_start: bool = True,
) -> FitResult:
    """Fit the elastic net over the lambda path.

    Shortcut for `ElasticNet(spec).fit_path(...)`.
    """
    return ElasticNet(spec).fit_path(design, response, penalized=penalized, warm_start=warm_start)


def cross_validate(
    design: DesignInput,
    response: ResponseInput,
    spec: ElasticNetSpec | None = None,
    *,
    penalized: Optional[Sequence[bool]] = None,
    jobs: int = 1,
) -> FitResult:
    """Fit the full path and choose lambda by K-fold cross-validation.

    Shortcut for `ElasticNet(spec).cross_validate(...)`.
    """
    return ElasticNet(spec).cross_validate(design, response, penalized=penalized, jobs=jobs)


def objective(
    design: DesignInput,
    response: ResponseInput,
    coefficients: np.ndarray,
    intercept: float,
    lam: float,
    alpha: float,
    penalized: Optional[Sequence[bool]] = None,
) -> float:
    """Value of the elastic net objective at an original scale solution"""
    x, y, mask = _unpack(design, response, penalized)
    n_rows = x.shape[0]
    residual = y - intercept - x @ coefficients
    scale = _column_sd(x)
    standardized = coefficients * scale
    penalty = np.sum(
        np.abs(standardized[mask]) * alpha + (1 - alpha) / 2 * standardized[mask] ** 2
    )
    return float(residual @ residual / (2 * n_rows) + lam * penalty)


def kkt_residuals(
    design: DesignInput,
    response: ResponseInput,
    coefficients: np.ndarray,
    intercept: float,
    lam: float,
    alpha: float,
    penalized: Optional[Sequence[bool]] = None,
) -> np.ndarray:
    """Violation of the optimality conditions for every column.

    For a penalized column with a nonzero coefficient this is
    `|g_j - lam*(1-alpha)*b~_j - lam*alpha*sign(b~_j)|`, for a zero coefficient
    `max(|g_j| - lam*alpha, 0)`, and for an unpenalized column `|g_j|`, where
    `g_j = <x~_j, r> / n` is the standardized column's correlation with the residual.
    Constant columns always report 0.

    Returns:
        Non-negative residual per column
    """
    x, y, mask = _unpack(design, response, penalized)
    n_rows = x.shape[0]
    residual = y - intercept - x @ coefficients
    scale = _column_sd(x)
    usable = scale > _CONSTANT_COLUMN_SD
    safe_scale = np.where(usable, scale, 1.0)
    standardized_x = (x - x.mean(axis=0)) / safe_scale
    gradient = standardized_x.T @ residual / n_rows
    standardized = coefficients * scale

    residuals = np.abs(gradient)
    active = mask & (standardized != 0)
    residuals[active] = np.abs(
        gradient[active]
        - lam * (1 - alpha) * standardized[active]
        - lam * alpha * np.sign(standardized[active])
    )
    inactive = mask & (standardized == 0)
    residuals[inactive] = np.maximum(np.abs(gradient[inactive]) - lam * alpha, 0.0)
    residuals[~usable] = 0.0
    return residuals


def _unpack(
    design: DesignInput, response: ResponseInput, penalized: Optional[Sequence[bool]]
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if isinstance(design, DesignMatrix):
        x = design.values
        default_mask = design.penalized
    else:
        x = np.asarray(design, dtype=float)
        default_mask = np.ones(x.shape[1] if x.ndim == 2 else 0, dtype=bool)
    y = response.values if isinstance(response, ResponseVector) else np.asarray(response)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)

    if x.ndim != 2:
        raise SolverError(f"design must be 2 dimensional, got shape {x.shape}")
    if y.shape != (x.shape[0],):
        raise SolverError(f"response shape {y.shape} does not match design shape {x.shape}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise SolverError("design and response must be finite")

    mask = np.asarray(default_mask if penalized is None else penalized, dtype=bool)
    if mask.shape != (x.shape[1],):
        raise SolverError(f"penalized mask has {mask.size} entries for {x.shape[1]} columns")
    return x, y, mask


def _column_sd(x: np.ndarray) -> np.ndarray:
    """Population standard deviation of every column"""
    if x.shape[0] == 0:
        return np.zeros(x.shape[1])
    return x.std(axis=0)


def _orthonormal_basis(z: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the column span of `z`"""
    u, singular, _ = np.linalg.svd(z, full_matrices=False)
    if singular.size == 0 or singular[0] == 0:
        return u[:, :0]
    return u[:, singular > _RANK_TOLERANCE * singular[0]]


### CLASSES
### ============================================================================
@dataclass(frozen=True)
class ElasticNetSpec:  # pylint: disable=too-many-instance-attributes
    """Elastic net settings.

    Attributes:
        alpha: L1 / L2 mixing weight, 1 is the lasso and 0 is ridge
        lambda_path: explicit decreasing path, generated from the data when `None`
        n_lambda: number of lambdas in a generated path
        path_ratio: `lambda_min / lambda_max` of a generated path
        tol: convergence threshold on the largest standardized coefficient change
            in a full sweep
        max_iter: sweep cap per lambda
        folds: number of cross-validation folds
        repeats: cross-validation runs over independent fold assignments, their error
            curves are averaged before picking lambda
        seed: fold assignment seed of the first run

    Raises:
        ConfigError: a setting is out of range
    """

    alpha: float = 0.5
    lambda_path: Optional[tuple[float, ...]] = None
    n_lambda: int = 100
    path_ratio: float = 1e-4
    tol: float = 1e-7
    max_iter: int = 100_000
    folds: int = 10
    repeats: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        try:
            is_in_range(self.alpha, 0, 1, throw_error=True, value_name="alpha")
            is_in_range(self.n_lambda, 1, throw_error=True, value_name="n_lambda")
            is_in_range(self.max_iter, 1, throw_error=True, value_name="max_iter")
            is_in_range(self.folds, 2, throw_error=True, value_name="folds")
            is_in_range(self.repeats, 1, throw_error=True, value_name="repeats")
        except ValueError as e:
            raise ConfigError(str(e)) from None
        if not 0 < self.path_ratio < 1:
            raise ConfigError(f"path_ratio must be in (0, 1), got {self.path_ratio}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be > 0, got {self.tol}")
        if self.lambda_path is not None:
            path = np.asarray(self.lambda_path, dtype=float)
            if path.size == 0 or np.any(path <= 0) or np.any(np.diff(path) >= 0):
                raise ConfigError("lambda_path must be non-empty, positive, strictly decreasing")
            object.__setattr__(self, "lambda_path", tuple(float(lam) for lam in path))
        return


@dataclass(frozen=True)
class FitResult:  # pylint: disable=too-many-instance-attributes
    """Solutions along a lambda path.

    Attributes:
        lambdas: the lambda path, decreasing
        coefficients: `(n_lambda, n_columns)` coefficients on the original column scale
        intercepts: free intercept per lambda
        lambda_max: smallest lambda at which every penalized coefficient is zero
        cv_mean: mean held-out squared error per lambda
        cv_se: standard error of `cv_mean`
        chosen_index: index of the lambda minimizing `cv_mean`
        lambda_1se: largest lambda within one standard error of the minimum
    """

    lambdas: np.ndarray
    coefficients: np.ndarray
    intercepts: np.ndarray
    lambda_max: float
    penalized: np.ndarray = field(repr=False)
    cv_mean: Optional[np.ndarray] = None
    cv_se: Optional[np.ndarray] = None
    chosen_index: Optional[int] = None
    lambda_1se: Optional[float] = None

    @property
    def nonzero(self) -> np.ndarray:
        """Number of nonzero penalized coefficients per lambda"""
        return np.count_nonzero(self.coefficients[:, self.penalized], axis=1)

    @property
    def is_cross_validated(self) -> bool:
        return self.chosen_index is not None

    def _require_cv(self) -> int:
        if self.chosen_index is None:
            raise SolverError("fit has not been cross-validated")
        return self.chosen_index

    @property
    def lambda_chosen(self) -> float:
        return float(self.lambdas[self._require_cv()])

    @property
    def chosen_coefficients(self) -> np.ndarray:
        return self.coefficients[self._require_cv()]

    @property
    def chosen_intercept(self) -> float:
        return float(self.intercepts[self._require_cv()])

    @property
    def effects(self) -> np.ndarray:
        """`exp(coefficient)` of every column at the chosen lambda"""
        return np.exp(self.chosen_coefficients)

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Predictions of every lambda, shape `(n_rows, n_lambda)`"""
        return self.intercepts[None, :] + x @ self.coefficients.T


@dataclass
class _Problem:
    """Standardized, projected problem shared by every lambda of a path"""

    gram: np.ndarray
    correlation: np.ndarray
    usable: np.ndarray
    scale: np.ndarray
    penalized_columns: np.ndarray
    unpenalized_columns: np.ndarray
    lambda_max: float


class ElasticNet(LoggingMixin):
    """Coordinate descent elastic net solver.

    Works in covariance mode: the Gram matrix of the standardized penalized columns is
    computed once per path so each coordinate update costs `O(n_columns)`.
    """

    def __init__(self, spec: ElasticNetSpec | None = None) -> None:
        self.spec = spec if spec is not None else ElasticNetSpec()
        self.logger = self.get_logger()
        return

    ## Path
    ## -------------------------------------------------------------------------
    def fit_path(
        self,
        design: DesignInput,
        response: ResponseInput,
        *,
        penalized: Optional[Sequence[bool]] = None,
        warm_start: bool = True,
    ) -> FitResult:
        """Fit every lambda of the path.

        Args:
            design: design matrix, raw (unstandardized) columns
            response: response vector
            penalized: override of the design's penalty mask
            warm_start: start each lambda from the previous solution

        Raises:
            SolverError: non-finite input or fewer than 2 rows
            ConvergenceError: a lambda did not converge within `max_iter` sweeps
        """
        # pylint: disable=too-many-locals
        x, y, mask = _unpack(design, response, penalized)
        n_rows, n_columns = x.shape
        if n_rows < 2:
            raise SolverError(f"need at least 2 rows, got {n_rows}")

        problem = self._prepare(x, y, mask)
        lambdas = self._lambda_path(problem.lambda_max)
        self.vdebug(
            f"Fitting {lambdas.size} lambdas over {n_rows}x{n_columns} "
            f"(lambda_max={problem.lambda_max:.6g})"
        )

        coefficients = np.zeros((lambdas.size, n_columns))
        intercepts = np.zeros(lambdas.size)
        beta = np.zeros(problem.penalized_columns.size)
        for index, lam in enumerate(lambdas):
            if not warm_start:
                beta = np.zeros_like(beta)
            if lam >= problem.lambda_max:
                beta = np.zeros_like(beta)
            else:
                beta = self._descend(problem, beta, float(lam), index)
            coefficients[index], intercepts[index] = self._original_scale(x, y, problem, beta)

        return FitResult(
            lambdas=lambdas,
            coefficients=coefficients,
            intercepts=intercepts,
            lambda_max=problem.lambda_max,
            penalized=mask,
        )

    def _prepare(self, x: np.ndarray, y: np.ndarray, mask: np.ndarray) -> _Problem:
        """Standardize the penalized columns and profile out the unpenalized ones.

        `lambda_max` comes from the response after projecting out the intercept and every
        unpenalized column, so it equals `max|<x~_j, y - y_bar>| / (n*alpha)` only when
        the intercept is the sole unpenalized term.
        """
        n_rows = x.shape[0]
        scale = _column_sd(x)
        penalized_columns = np.flatnonzero(mask & (scale > _CONSTANT_COLUMN_SD))
        unpenalized_columns = np.flatnonzero(~mask)

        standardized = (x[:, penalized_columns] - x[:, penalized_columns].mean(axis=0)) / scale[
            penalized_columns
        ]
        basis = _orthonormal_basis(np.column_stack([np.ones(n_rows), x[:, unpenalized_columns]]))
        projected_x = standardized - basis @ (basis.T @ standardized)
        projected_y = y - basis @ (basis.T @ y)

        gram = projected_x.T @ projected_x / n_rows
        correlation = projected_x.T @ projected_y / n_rows
        usable = np.diag(gram) > _RANK_TOLERANCE

        alpha = max(self.spec.alpha, MIN_ALPHA_FOR_LAMBDA_MAX)
        strongest = float(np.max(np.abs(correlation[usable]))) if np.any(usable) else 0.0
        lambda_max = max(strongest / alpha, LAMBDA_MAX_FLOOR)
        return _Problem(
            gram=gram,
            correlation=correlation,
            usable=usable,
            scale=scale,
            penalized_columns=penalized_columns,
            unpenalized_columns=unpenalized_columns,
            lambda_max=lambda_max,
        )

    def _lambda_path(self, lambda_max: float) -> np.ndarray:
        if self.spec.lambda_path is not None:
            return np.asarray(self.spec.lambda_path, dtype=float)
        if self.spec.n_lambda == 1:
            return np.array([lambda_max])
        return np.geomspace(lambda_max, lambda_max * self.spec.path_ratio, self.spec.n_lambda)

    def _descend(self, problem: _Problem, beta: np.ndarray, lam: float, index: int) -> np.ndarray:
        """Coordinate descent at one lambda.

        Alternates full sweeps with sweeps restricted to the nonzero coefficients until a
        full sweep changes no coefficient by more than `tol`.
        """
        # pylint: disable=too-many-locals
        beta = beta.copy()
        gram = problem.gram
        diagonal = np.diag(gram)
        gradient = problem.correlation - gram @ beta
        l1 = lam * self.spec.alpha
        l2 = lam * (1 - self.spec.alpha)
        all_columns = np.flatnonzero(problem.usable)

        def sweep(columns: np.ndarray) -> float:
            largest = 0.0
            for j in columns:
                old = beta[j]
                new = soft_threshold(gradient[j] + diagonal[j] * old, l1) / (diagonal[j] + l2)
                if new != old:
                    delta = new - old
                    gradient[:] -= gram[:, j] * delta
                    beta[j] = new
                    largest = max(largest, abs(delta))
            return largest

        sweeps = 0
        while sweeps < self.spec.max_iter:
            sweeps += 1
            if sweep(all_columns) < self.spec.tol:
                self.vdebug(f"lambda[{index}]={lam:.6g} converged after {sweeps} sweeps")
                return beta
            active = all_columns[beta[all_columns] != 0]
            while sweeps < self.spec.max_iter:
                sweeps += 1
                if sweep(active) < self.spec.tol:
                    break
        raise ConvergenceError(index, lam, self.spec.max_iter)

    @staticmethod
    def _original_scale(
        x: np.ndarray, y: np.ndarray, problem: _Problem, beta: np.ndarray
    ) -> tuple[np.ndarray, float]:
        """Map standardized coefficients back and solve for the unpenalized terms.

        When the unpenalized columns already span the constant (e.g. an intercept
        column), the free intercept is fixed at 0 and the columns carry it.
        """
        coefficients = np.zeros(x.shape[1])
        coefficients[problem.penalized_columns] = beta / problem.scale[problem.penalized_columns]
        partial = y - x @ coefficients

        unpenalized = x[:, problem.unpenalized_columns]
        with_constant = np.column_stack([np.ones(x.shape[0]), unpenalized])
        spans_constant = unpenalized.shape[1] > 0 and np.linalg.matrix_rank(
            unpenalized
        ) == np.linalg.matrix_rank(with_constant)
        if spans_constant:
            solution = np.linalg.lstsq(unpenalized, partial, rcond=None)[0]
            coefficients[problem.unpenalized_columns] = solution
            return coefficients, 0.0
        solution = np.linalg.lstsq(with_constant, partial, rcond=None)[0]
        coefficients[problem.unpenalized_columns] = solution[1:]
        return coefficients, float(solution[0])

    ## Cross-validation
    ## -------------------------------------------------------------------------
    def cross_validate(
        self,
        design: DesignInput,
        response: ResponseInput,
        *,
        penalized: Optional[Sequence[bool]] = None,
        jobs: int = 1,
    ) -> FitResult:
        """Fit the full path then estimate held-out error per lambda.

        Folds are assigned once up front so the result does not depend on `jobs`.
        With `spec.repeats` above one the held-out errors of every run are averaged.
        The chosen lambda minimizes the mean held-out error, ties going to the larger
        lambda.

        Args:
            design: design matrix
            response: response vector
            penalized: override of the design's penalty mask
            jobs: number of fold fits run concurrently

        Raises:
            SolverError: fewer rows than folds, or as `fit_path`
        """
        x, y, mask = _unpack(design, response, penalized)
        n_rows = x.shape[0]
        if n_rows < self.spec.folds:
            raise SolverError(f"need at least {self.spec.folds} rows for CV, got {n_rows}")

        full = self.fit_path(x, y, penalized=mask)
        fold_sets = [
            assign_folds(n_rows, self.spec.folds, self.repeat_seed(repeat))
            for repeat in range(self.spec.repeats)
        ]
        fold_solver = ElasticNet(replace(self.spec, lambda_path=tuple(full.lambdas)))

        def held_out_error(task: tuple[int, int]) -> np.ndarray:
            repeat, fold = task
            train = fold_sets[repeat] != fold
            test = ~train
            fit = fold_solver.fit_path(x[train], y[train], penalized=mask)
            errors = (y[test, None] - fit.predict(x[test])) ** 2
            self.vdebug(f"repeat {repeat} fold {fold} done ({int(test.sum())} held out)")
            return errors.mean(axis=0)

        tasks = [
            (repeat, fold) for repeat in range(self.spec.repeats) for fold in range(self.spec.folds)
        ]
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as executor:
                fold_errors: List[np.ndarray] = list(executor.map(held_out_error, tasks))
        else:
            fold_errors = [held_out_error(task) for task in tasks]

        errors = np.vstack(fold_errors).reshape(self.spec.repeats, self.spec.folds, -1)
        cv_mean = errors.mean(axis=(0, 1))
        cv_se = (errors.std(axis=1, ddof=1) / np.sqrt(self.spec.folds)).mean(axis=0)
        chosen_index = int(np.argmin(cv_mean))
        threshold = cv_mean[chosen_index] + cv_se[chosen_index]
        index_1se = int(np.flatnonzero(cv_mean <= threshold)[0])

        self.debug(
            f"CV chose lambda[{chosen_index}]={full.lambdas[chosen_index]:.6g} "
            f"(1se lambda[{index_1se}]={full.lambdas[index_1se]:.6g})"
        )
        return replace(
            full,
            cv_mean=cv_mean,
            cv_se=cv_se,
            chosen_index=chosen_index,
            lambda_1se=float(full.lambdas[index_1se]),
        )

    def repeat_seed(self, repeat: int) -> int:
        """Fold assignment seed of a cross-validation run, the first run uses `spec.seed`"""
        if repeat == 0:
            return self.spec.seed
        return derive_seed(self.spec.seed, "repeat", str(repeat))
