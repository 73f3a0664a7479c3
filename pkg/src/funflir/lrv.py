"""Kernel long-run covariance estimation and bandwidth selection.

Estimates the long-run covariance operator of the product series
v_t = Z_t u_{0,t} by a kernel-weighted sum of sample-mean-centered lag
covariances, selects the bandwidth by the Andrews (1991) plug-in rule
applied to leading FPCA scores, and extracts a truncated nonnegative
spectrum used to calibrate the weighted-chi-square null distribution.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .hilbert import Curve, FunctionalSeries, HilbertOperator, sym_eig

__all__ = [
    "KernelSpec",
    "LrvEstimate",
    "BARTLETT",
    "PARZEN",
    "TUKEY_HANNING",
    "kernel_value",
    "sample_lrv",
    "fpca_scores",
    "andrews_bandwidth",
    "truncated_eigs",
    "default_dT",
]


@dataclass(frozen=True)
class KernelSpec:
    """Lag-window kernel with compact support ``c`` and smoothness
    order ``order`` (1 for Bartlett, 2 for Parzen / Tukey-Hanning)."""

    family: str
    support: float
    order: int

    def __repr__(self):
        return f"KernelSpec({self.family})"


BARTLETT = KernelSpec("bartlett", support=1.0, order=1)
PARZEN = KernelSpec("parzen", support=1.0, order=2)
TUKEY_HANNING = KernelSpec("tukey-hanning", support=1.0, order=2)

KERNELS = {k.family: k for k in (BARTLETT, PARZEN, TUKEY_HANNING)}

# Andrews (1991) plug-in bandwidth constants by kernel family.
_ANDREWS_RULES = {
    "bartlett": (1.1447, 1, 1.0 / 3.0),
    "parzen": (2.6614, 2, 1.0 / 5.0),
    "tukey-hanning": (1.7462, 2, 1.0 / 5.0),
}


def kernel_value(spec: KernelSpec, x: float) -> float:
    """Evaluate the lag-window kernel at x."""
    a = abs(float(x))
    if spec.family == "bartlett":
        return max(0.0, 1.0 - a)
    if spec.family == "parzen":
        if a <= 0.5:
            return 1.0 - 6.0 * a * a + 6.0 * a**3
        if a <= 1.0:
            return 2.0 * (1.0 - a) ** 3
        return 0.0
    if spec.family == "tukey-hanning":
        if a <= 1.0:
            return (1.0 + math.cos(math.pi * a)) / 2.0
        return 0.0
    raise ValueError(f"unknown kernel family {spec.family!r}")


def sample_lrv(v: FunctionalSeries, h: float, spec: KernelSpec) -> HilbertOperator:
    """Kernel long-run covariance operator of the product series v.

    Computes (1/T) sum_{|s| <= c h} k(s/h) Gamma_s with lag covariances
    Gamma_s = sum_t (v_{t-s} - vbar) (x) (v_t - vbar) centered at the
    full-sample mean.  The output kernel matrix is symmetric.
    """
    if h <= 0:
        raise ValueError("bandwidth must be positive")
    T = len(v)
    if T < 4:
        raise ValueError("need at least 4 observations")
    V = v.data - v.data.mean(axis=0)
    lag_max = min(T - 1, int(math.floor(spec.support * h + 1e-12)))
    M = V.T @ V  # Gamma_0 as a kernel matrix: sum_t v_t(s) v_t(s')
    for s in range(1, lag_max + 1):
        k = kernel_value(spec, s / h)
        if k == 0.0:
            continue
        G = V[s:].T @ V[: T - s]  # kernel of Gamma_s: sum_t v_t(s) v_{t-s}(s')
        M += k * (G + G.T)
    M /= T
    M = 0.5 * (M + M.T)
    return HilbertOperator(v.grid, M)


def fpca_scores(series: FunctionalSeries, n: int) -> np.ndarray:
    """Scores of the demeaned series on its top-n sample FPCA directions.

    If the sample covariance has fewer than n numerically nonzero
    eigenvalues, the remaining columns are zero (with a warning).
    """
    T = len(series)
    if n < 0 or n > T:
        raise ValueError("number of scores must be between 0 and T")
    if n == 0:
        return np.zeros((T, 0))
    Vc = series.data - series.data.mean(axis=0)
    C = HilbertOperator(series.grid, Vc.T @ Vc / T)
    evals, eigvecs = sym_eig(C)
    w = series.grid.quad_weights
    scores = np.zeros((T, n))
    tol = max(evals[0], 0.0) * 1e-12
    n_eff = min(n, len(evals))
    for j in range(n_eff):
        if evals[j] <= tol:
            n_eff = j
            break
    if n_eff < n:
        warnings.warn(
            f"series covariance has rank {n_eff} < {n}; padding zero scores",
            stacklevel=2,
        )
    for j in range(n_eff):
        scores[:, j] = Vc @ (w * eigvecs[j].values)
    return scores


def _ar1_fit(x: np.ndarray):
    """AR(1) autoregression coefficient and innovation variance."""
    denom = float(np.dot(x[:-1], x[:-1]))
    if denom <= 1e-14 * x.size:
        return 0.0, 0.0
    rho = float(np.dot(x[1:], x[:-1])) / denom
    rho = min(max(rho, -0.97), 0.97)  # keep the plug-in formula finite
    resid = x[1:] - rho * x[:-1]
    sigma2 = float(np.mean(resid**2))
    return rho, sigma2


def andrews_bandwidth(scores: np.ndarray, spec: KernelSpec) -> float:
    """Andrews (1991) plug-in bandwidth from AR(1) fits to each score
    series, aggregated with unit weights; floored at 1."""
    scores = np.atleast_2d(np.asarray(scores, dtype=float))
    if scores.ndim != 2 or scores.shape[1] < 1:
        raise ValueError("need at least one score series")
    T = scores.shape[0]
    const, q, expo = _ANDREWS_RULES[spec.family]
    num = 0.0
    den = 0.0
    for j in range(scores.shape[1]):
        x = scores[:, j] - scores[:, j].mean()
        rho, s2 = _ar1_fit(x)
        if s2 <= 0.0:
            continue
        if q == 1:
            num += 4.0 * rho**2 * s2**2 / ((1 - rho) ** 6 * (1 + rho) ** 2)
        else:
            num += 4.0 * rho**2 * s2**2 / (1 - rho) ** 8
        den += s2**2 / (1 - rho) ** 4
    alpha = num / den if den > 0 else 0.0
    h = const * (alpha * T) ** expo if alpha > 0 else 0.0
    return max(h, 1.0)


def truncated_eigs(A: HilbertOperator, d_T: int):
    """Top-d_T eigenpairs of A with negative eigenvalues clipped at 0.

    Requests beyond the grid dimension are padded with zero eigenvalues.
    """
    if d_T < 1:
        raise ValueError("truncation level must be >= 1")
    evals, eigvecs = sym_eig(A)
    n = len(evals)
    if d_T > n:
        warnings.warn(
            f"truncation level {d_T} exceeds grid dimension {n}; padding zeros",
            stacklevel=2,
        )
    m = min(d_T, n)
    lam = np.clip(evals[:m], 0.0, None)
    vecs = list(eigvecs[:m])
    if d_T > n:
        lam = np.concatenate([lam, np.zeros(d_T - n)])
    return lam, vecs


def default_dT(T: int) -> int:
    """Default spectral truncation 5 + ceil(T^0.333)."""
    if T < 2:
        raise ValueError("sample size must be >= 2")
    return 5 + math.ceil(T**0.333)


@dataclass(frozen=True)
class LrvEstimate:
    """Bundled long-run covariance estimate used by the test pipeline."""

    operator: HilbertOperator
    bandwidth: float
    eigenvalues: np.ndarray
    eigenvectors: list[Curve]
    d_T: int

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float)
        if np.any(lam < 0) or np.any(np.diff(lam) > 1e-12):
            raise ValueError("eigenvalues must be nonnegative and nonincreasing")
        if lam.size < self.d_T:
            raise ValueError("eigenvalue vector shorter than truncation level")
        object.__setattr__(self, "eigenvalues", lam)
