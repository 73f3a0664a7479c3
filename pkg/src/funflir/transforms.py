"""Distributional transforms of density samples into functional regressors.

A ``DensitySample`` holds estimated probability densities on a common
support [a, b].  The transforms (CLR, LHR, LRHR, LCDF, PDF, QF) turn
each density into a curve on [0, 1] suitable as a functional regressor;
``standardized_moments`` extracts mean, standard deviation, skewness
and kurtosis for use as scalar covariates.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .hilbert import FunctionalSeries, Grid, uniform_grid

__all__ = [
    "DensitySample",
    "TRANSFORM_KINDS",
    "transform",
    "standardized_moments",
    "build_lagged_auxiliary",
    "trim_series",
]

#: Floor applied to densities before taking logs.
LOG_FLOOR = 1e-10

#: Default quantile evaluation levels: 101 points uniform in (0.005, 0.995).
QF_S_GRID = np.linspace(0.005, 0.995, 101)

TRANSFORM_KINDS = ("clr", "lhr", "lrhr", "lcdf", "pdf", "qf")


@dataclass(frozen=True)
class DensitySample:
    """Time series of densities on a common support [a, b]."""

    support: tuple[float, float]
    points: np.ndarray   # evaluation points in [a, b], increasing
    densities: np.ndarray  # T x m nonnegative values, each row integrates to ~1

    def __post_init__(self):
        a, b = self.support
        pts = np.asarray(self.points, dtype=float)
        dens = np.atleast_2d(np.asarray(self.densities, dtype=float))
        if a >= b:
            raise ValueError("support must satisfy a < b")
        if np.any(np.diff(pts) <= 0) or pts[0] < a - 1e-9 or pts[-1] > b + 1e-9:
            raise ValueError("points must increase within the support")
        if dens.shape[1] != pts.size:
            raise ValueError("density rows must match the evaluation points")
        if np.any(dens < 0):
            raise ValueError("densities must be nonnegative")
        totals = np.trapezoid(dens, pts, axis=1)
        if np.any(totals <= 0):
            raise ValueError("each density must have positive total mass")
        if np.any(np.abs(totals - 1.0) > 0.01):
            warnings.warn("densities do not integrate to 1; renormalizing",
                          stacklevel=2)
        dens = dens / totals[:, None]
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "densities", dens)

    @property
    def T(self) -> int:
        return self.densities.shape[0]


def _unit_grid_for(points: np.ndarray, support) -> Grid:
    a, b = support
    mapped = (points - a) / (b - a)
    mapped[0], mapped[-1] = 0.0, 1.0
    return Grid(mapped)


def _cdf(density: DensitySample) -> np.ndarray:
    pts = density.points
    p = density.densities
    seg = np.diff(pts)[None, :] * (p[:, :-1] + p[:, 1:]) / 2.0
    P = np.concatenate([np.zeros((density.T, 1)), np.cumsum(seg, axis=1)], axis=1)
    return np.clip(P, 0.0, 1.0)


def transform(density: DensitySample, kind: str) -> FunctionalSeries:
    """Map each density to a curve on [0, 1].

    All transforms except QF are evaluated on the native support and
    affinely remapped to [0, 1]; QF returns the quantile value as a
    function of the level s.  Logs use a small floor so the transforms
    are total on estimated densities.
    """
    kind = kind.lower()
    if kind not in TRANSFORM_KINDS:
        raise ValueError(f"unknown transform {kind!r}")
    pts = density.points
    p = density.densities
    if kind == "qf":
        P = _cdf(density)
        grid = Grid(np.linspace(0.0, 1.0, QF_S_GRID.size))
        out = np.empty((density.T, QF_S_GRID.size))
        for t in range(density.T):
            Pt = np.maximum.accumulate(P[t])
            # Make the CDF strictly increasing so inversion is stable.
            Pt = Pt + np.arange(Pt.size) * 1e-12
            out[t] = np.interp(QF_S_GRID, Pt / Pt[-1], pts)
        return FunctionalSeries(grid, out)
    grid = _unit_grid_for(pts.copy(), density.support)
    logp = np.log(np.maximum(p, LOG_FLOOR))
    if kind == "pdf":
        vals = p
    elif kind == "clr":
        # Center at the average log-density so each row integrates to 0.
        avg = np.trapezoid(logp, pts, axis=1) / (pts[-1] - pts[0])
        vals = logp - avg[:, None]
    elif kind in ("lhr", "lrhr", "lcdf"):
        P = np.clip(_cdf(density), LOG_FLOOR, 1.0 - LOG_FLOOR)
        if kind == "lhr":
            vals = logp - np.log(1.0 - P)
        elif kind == "lrhr":
            vals = logp - np.log(P)
        else:
            vals = np.log(P) - np.log(1.0 - P)
    return FunctionalSeries(grid, vals)


def standardized_moments(density: DensitySample, K: int = 4) -> np.ndarray:
    """First K standardized moments of each density (K <= 4).

    Columns are mean, standard deviation, skewness and kurtosis,
    computed by trapezoid quadrature on the native support.
    """
    if not 1 <= K <= 4:
        raise ValueError("K must be between 1 and 4")
    pts = density.points
    p = density.densities
    out = np.empty((density.T, K))
    mean = np.trapezoid(pts[None, :] * p, pts, axis=1)
    out[:, 0] = mean
    if K >= 2:
        centered = pts[None, :] - mean[:, None]
        var = np.trapezoid(centered**2 * p, pts, axis=1)
        if np.any(var <= 0):
            raise ValueError("density has zero variance")
        sd = np.sqrt(var)
        out[:, 1] = sd
        for j in range(3, K + 1):
            out[:, j - 1] = np.trapezoid(centered**j * p, pts, axis=1) / sd**j
    return out


def build_lagged_auxiliary(X: FunctionalSeries, ell: int,
                           decay: float = 0.5) -> FunctionalSeries:
    """Geometric lag combination Z_t = sum_{j=1..ell} decay^{j-1} X_{t-j}.

    The output has length T - ell and is aligned with the trimmed
    sample (y_t, X_t) for t = ell..T-1 (0-based); see ``trim_series``.
    """
    T = len(X)
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if ell >= T:
        raise ValueError("ell must be smaller than the series length")
    out = np.zeros((T - ell, len(X.grid)))
    for j in range(1, ell + 1):
        out += decay ** (j - 1) * X.data[ell - j: T - j]
    return FunctionalSeries(X.grid, out)


def trim_series(series, ell: int):
    """Drop the first ell periods, aligning with build_lagged_auxiliary."""
    if isinstance(series, FunctionalSeries):
        return FunctionalSeries(series.grid, series.data[ell:])
    from .hilbert import ScalarSeries

    return ScalarSeries(series.values[ell:])
