"""Partial-sum functional moment processes.

The basic object is the step process S(i/T) = (1/T) sum_{t<=i} Z_t u_{0,t}
with null residual u_{0,t} = y_t - <X_t, theta0>, evaluated on the natural
partition r_i = i/T.  Variants handle sample centering (intercept model),
scalar-covariate residualization, and multiple functional regressors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hilbert import (
    Curve,
    FunctionalSeries,
    Grid,
    GridMismatchError,
    ScalarSeries,
)

__all__ = [
    "MomentProcess",
    "Residualization",
    "SingularCovariatesError",
    "moment_process",
    "centered_moment_process",
    "residualize_scalar",
    "residualized_moment_process",
    "multi_moment_process",
]

#: Condition-number guard for the covariate Gram matrix.
GRAM_COND_LIMIT = 1e12


class SingularCovariatesError(ValueError):
    """Covariate series are (numerically) collinear."""


@dataclass(frozen=True)
class MomentProcess:
    """Values S(i/T), i = 0..T, of a partial-sum process, as a
    (T+1) x n matrix of curve values."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[1] != len(self.grid):
            raise ValueError("process values must be (T+1) x len(grid)")
        if not np.allclose(vals[0], 0.0):
            raise ValueError("process must start at the zero curve")
        object.__setattr__(self, "values", vals)

    @property
    def T(self) -> int:
        return self.values.shape[0] - 1

    def curve(self, i: int) -> Curve:
        return Curve(self.grid, self.values[i])

    def endpoint(self) -> Curve:
        return Curve(self.grid, self.values[-1])


def _check_lengths(Z: FunctionalSeries, y: ScalarSeries, *series) -> int:
    T = len(Z)
    if len(y) != T or any(len(s) != T for s in series):
        raise ValueError("series lengths do not match")
    return T


def _null_residuals(y: ScalarSeries, X: FunctionalSeries, theta0: Curve) -> np.ndarray:
    if X.grid != theta0.grid:
        raise GridMismatchError("theta0 grid differs from regressor grid")
    w = X.grid.quad_weights
    return y.values - X.data @ (w * theta0.values)


def _partial_sums(products: np.ndarray) -> np.ndarray:
    T = products.shape[0]
    out = np.zeros((T + 1, products.shape[1]))
    np.cumsum(products, axis=0, out=out[1:])
    out /= T
    return out


def moment_process(
    Z: FunctionalSeries, y: ScalarSeries, X: FunctionalSeries, theta0: Curve
) -> MomentProcess:
    """Partial sums (1/T) sum_{t<=i} Z_t (y_t - <X_t, theta0>)."""
    _check_lengths(Z, y, X)
    if Z.grid != X.grid:
        raise GridMismatchError("Z and X grids differ")
    u0 = _null_residuals(y, X, theta0)
    return MomentProcess(Z.grid, _partial_sums(Z.data * u0[:, None]))


def centered_moment_process(
    Z: FunctionalSeries, y: ScalarSeries, X: FunctionalSeries, theta0: Curve
) -> MomentProcess:
    """Fully sample-centered partial sums
    (1/T) sum_{t<=i} (Z_t - Zbar){(y_t - ybar) - <X_t - Xbar, theta0>}."""
    _check_lengths(Z, y, X)
    if Z.grid != X.grid:
        raise GridMismatchError("Z and X grids differ")
    Zc = FunctionalSeries(Z.grid, Z.data - Z.data.mean(axis=0))
    Xc = FunctionalSeries(X.grid, X.data - X.data.mean(axis=0))
    yc = ScalarSeries(y.values - y.values.mean())
    return moment_process(Zc, yc, Xc, theta0)


@dataclass(frozen=True)
class Residualization:
    """Least-squares projection of a target series on scalar covariates."""

    fitted: np.ndarray
    residuals: np.ndarray
    coefficients: np.ndarray = field(repr=False)

    def residual_series(self, grid: Grid | None = None):
        if self.residuals.ndim == 1:
            return ScalarSeries(self.residuals)
        return FunctionalSeries(grid, self.residuals)


def _covariate_matrix(covariates, T: int) -> np.ndarray:
    W = np.column_stack([np.asarray(c.values, dtype=float) for c in covariates])
    if W.shape[0] != T:
        raise ValueError("covariate length does not match target length")
    return W


def residualize_scalar(target, covariates) -> Residualization:
    """Project a scalar or functional series on scalar covariates.

    Uses the full sample Gram matrix; residuals are invariant to
    nonsingular linear transformations of the covariates.
    """
    if isinstance(target, ScalarSeries):
        data = target.values[:, None]
        scalar = True
    else:
        data = target.data
        scalar = False
    T = data.shape[0]
    if not covariates:
        beta = np.zeros((0, data.shape[1]))
        fitted = np.zeros_like(data)
    else:
        W = _covariate_matrix(covariates, T)
        G = W.T @ W / T
        if np.linalg.cond(G) > GRAM_COND_LIMIT:
            raise SingularCovariatesError(
                "covariate Gram matrix is ill-conditioned (condition number "
                f"> {GRAM_COND_LIMIT:g})"
            )
        beta = np.linalg.solve(G, W.T @ data / T)
        fitted = W @ beta
    resid = data - fitted
    if scalar:
        return Residualization(fitted[:, 0], resid[:, 0], beta)
    return Residualization(fitted, resid, beta)


def residualized_moment_process(
    Z: FunctionalSeries,
    y: ScalarSeries,
    X: FunctionalSeries,
    theta0: Curve,
    covariates,
) -> MomentProcess:
    """Moment process built from covariate-residualized y, X and Z."""
    _check_lengths(Z, y, X)
    Zr = residualize_scalar(Z, covariates).residual_series(Z.grid)
    Xr = residualize_scalar(X, covariates).residual_series(X.grid)
    yr = residualize_scalar(y, covariates).residual_series()
    return moment_process(Zr, yr, Xr, theta0)


def multi_moment_process(
    Z: FunctionalSeries, y: ScalarSeries, Xs, theta0s
) -> MomentProcess:
    """Partial sums with a K-term inner-product sum subtracted:
    (1/T) sum_{t<=i} Z_t {y_t - sum_j <X_{j,t}, theta_{0,j}>}."""
    if len(Xs) != len(theta0s):
        raise ValueError("number of regressors and slope curves differ")
    if not Xs:
        raise ValueError("need at least one functional regressor")
    _check_lengths(Z, y, *Xs)
    u0 = y.values.copy()
    for X, theta0 in zip(Xs, theta0s):
        if X.grid != Z.grid:
            raise GridMismatchError("regressor grid differs from Z grid")
        u0 -= X.data @ (X.grid.quad_weights * theta0.values)
    return MomentProcess(Z.grid, _partial_sums(Z.data * u0[:, None]))
