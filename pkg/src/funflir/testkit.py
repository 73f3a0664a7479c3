"""End-to-end test orchestration.

``run_test`` assembles the full pipeline: null residuals, the moment
process variant, the product series feeding the long-run covariance
estimate, bandwidth and spectral truncation, the weighted statistic,
and the Monte Carlo critical value / p-value.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import critical, lrv, moments, weights
from .hilbert import Curve, FunctionalSeries, ScalarSeries, zero_curve
from .lrv import BARTLETT, KernelSpec, LrvEstimate
from .weights import WeightSpec, endpoint_weight

__all__ = [
    "TestConfig",
    "TestResult",
    "PLAIN",
    "INTERCEPT",
    "SCALAR_COVARIATES",
    "MULTI_FUNCTIONAL",
    "EXOGENEITY_BENCHMARK",
    "VARIANTS",
    "prepare_case",
    "calibrate_lrv",
    "run_test",
    "correlation_test",
]

PLAIN = "plain"
INTERCEPT = "intercept"
SCALAR_COVARIATES = "scalar_covariates"
MULTI_FUNCTIONAL = "multi"
EXOGENEITY_BENCHMARK = "benchmark"
VARIANTS = (PLAIN, INTERCEPT, SCALAR_COVARIATES, MULTI_FUNCTIONAL,
            EXOGENEITY_BENCHMARK)


@dataclass(frozen=True)
class TestConfig:
    """Configuration of one hypothesis test run."""

    variant: str = PLAIN
    weight: WeightSpec = field(default_factory=endpoint_weight)
    kernel: KernelSpec = BARTLETT
    alpha: float = 0.05
    d_T: int | None = None          # None: 5 + ceil(T^0.333)
    bandwidth: float | None = None  # None: Andrews plug-in on FPCA scores
    n_scores: int = 5
    mc_draws: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        if self.mc_draws < 100:
            raise ValueError("mc_draws must be >= 100")


@dataclass(frozen=True)
class TestResult:
    """Outcome of a single test: statistic, calibration and decision."""

    statistic: float
    critical_value: float
    p_value: float
    reject: bool
    eigenvalues: np.ndarray
    bandwidth: float
    d_T: int
    diagnostics: dict

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "critical_value": self.critical_value,
            "p_value": self.p_value,
            "reject": self.reject,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "bandwidth": self.bandwidth,
            "d_T": self.d_T,
            "diagnostics": self.diagnostics,
        }


def _inner_with(X: FunctionalSeries, theta0: Curve) -> np.ndarray:
    return X.data @ (X.grid.quad_weights * theta0.values)


def prepare_case(variant, Z, y, X, theta0, covariates=None):
    """Variant-specific preprocessing.

    Returns ``(process, v)`` where ``process`` is the moment process to
    be weighted and ``v`` is the product series feeding the long-run
    covariance estimate (centered / residualized per variant).
    """
    if variant == MULTI_FUNCTIONAL:
        Xs, theta0s = X, theta0
        process = moments.multi_moment_process(Z, y, Xs, theta0s)
        u0 = y.values - sum(_inner_with(Xj, tj) for Xj, tj in zip(Xs, theta0s))
        v = FunctionalSeries(Z.grid, Z.data * u0[:, None])
        return process, v
    if variant == EXOGENEITY_BENCHMARK:
        Z = X
        variant = PLAIN
    if variant == PLAIN:
        process = moments.moment_process(Z, y, X, theta0)
        u0 = y.values - _inner_with(X, theta0)
        v = FunctionalSeries(Z.grid, Z.data * u0[:, None])
        return process, v
    if variant == INTERCEPT:
        process = moments.centered_moment_process(Z, y, X, theta0)
        u0 = y.values - _inner_with(X, theta0)
        u0c = u0 - u0.mean()
        Zc = Z.data - Z.data.mean(axis=0)
        v = FunctionalSeries(Z.grid, Zc * u0c[:, None])
        return process, v
    if variant == SCALAR_COVARIATES:
        covariates = covariates or []
        process = moments.residualized_moment_process(Z, y, X, theta0, covariates)
        Zr = moments.residualize_scalar(Z, covariates).residuals
        Xr = moments.residualize_scalar(X, covariates).residuals
        yr = moments.residualize_scalar(y, covariates).residuals
        u0r = yr - Xr @ (X.grid.quad_weights * theta0.values)
        v = FunctionalSeries(Z.grid, Zr * u0r[:, None])
        return process, v
    raise ValueError(f"unknown variant {variant!r}")


def calibrate_lrv(v: FunctionalSeries, kernel: KernelSpec,
                  bandwidth: float | None = None, d_T: int | None = None,
                  n_scores: int = 5) -> LrvEstimate:
    """Bandwidth, long-run covariance operator and truncated spectrum."""
    T = len(v)
    if bandwidth is None:
        scores = lrv.fpca_scores(v, min(n_scores, T))
        bandwidth = lrv.andrews_bandwidth(scores, kernel)
    if d_T is None:
        d_T = lrv.default_dT(T)
    op = lrv.sample_lrv(v, bandwidth, kernel)
    lam, vecs = lrv.truncated_eigs(op, d_T)
    return LrvEstimate(op, bandwidth, lam, vecs, d_T)


def run_test(config: TestConfig, Z, y: ScalarSeries, X, theta0,
             covariates=None) -> TestResult:
    """Run the identification-robust slope test.

    For the multi-regressor variant ``X`` is a list of series and
    ``theta0`` a list of curves; the benchmark variant ignores ``Z`` and
    instruments with ``X`` itself.
    """
    process, v = prepare_case(config.variant, Z, y, X, theta0, covariates)
    est = calibrate_lrv(v, config.kernel, config.bandwidth, config.d_T,
                        config.n_scores)
    stat = weights.statistic(config.weight, process)
    q = critical.mc_quantile(est.eigenvalues, config.alpha, config.mc_draws,
                             config.seed)
    p = critical.mc_pvalue(est.eigenvalues, stat, config.mc_draws, config.seed)
    return TestResult(
        statistic=stat,
        critical_value=q,
        p_value=p,
        reject=bool(stat > q),
        eigenvalues=est.eigenvalues,
        bandwidth=est.bandwidth,
        d_T=est.d_T,
        diagnostics={
            "variant": config.variant,
            "kernel": config.kernel.family,
            "weight": config.weight.label,
            "drift_factor": weights.drift_factor(config.weight),
            "alpha": config.alpha,
            "mc_draws": config.mc_draws,
            "seed": config.seed,
        },
    )


def correlation_test(config: TestConfig, y: ScalarSeries,
                     X_observed: FunctionalSeries,
                     Z: FunctionalSeries) -> TestResult:
    """Test of zero correlation between y and the functional regressor.

    Runs the intercept-variant test of theta0 = 0; valid under
    measurement error in the observed regressor because the null slope
    is zero exactly when the cross-covariance of y and X vanishes.
    """
    cfg = replace(config, variant=INTERCEPT)
    return run_test(cfg, Z, y, X_observed, zero_curve(X_observed.grid))
