"""Identification-robust tests for the slope function in functional
linear regression with a potentially endogenous functional regressor."""

from .critical import (
    DegenerateSpectrumError,
    local_limit_draws,
    local_power,
    mc_pvalue,
    mc_quantile,
)
from .hilbert import (
    Curve,
    FunctionalSeries,
    Grid,
    HilbertOperator,
    ScalarSeries,
    fourier_basis,
    inner_product,
    norm,
    outer,
    sym_eig,
    uniform_grid,
    zero_curve,
)
from .lrv import (
    BARTLETT,
    PARZEN,
    TUKEY_HANNING,
    KernelSpec,
    andrews_bandwidth,
    default_dT,
    sample_lrv,
)
from .moments import (
    centered_moment_process,
    moment_process,
    multi_moment_process,
    residualized_moment_process,
)
from .testkit import TestConfig, TestResult, correlation_test, run_test
from .weights import (
    WeightSpec,
    apply_g,
    drift_factor,
    endpoint_weight,
    normalizer,
    power_weight,
    statistic,
)

__version__ = "0.1.0"

__all__ = [
    "BARTLETT",
    "PARZEN",
    "TUKEY_HANNING",
    "Curve",
    "DegenerateSpectrumError",
    "FunctionalSeries",
    "Grid",
    "HilbertOperator",
    "KernelSpec",
    "ScalarSeries",
    "TestConfig",
    "TestResult",
    "WeightSpec",
    "andrews_bandwidth",
    "apply_g",
    "centered_moment_process",
    "correlation_test",
    "default_dT",
    "drift_factor",
    "endpoint_weight",
    "fourier_basis",
    "inner_product",
    "local_limit_draws",
    "local_power",
    "mc_pvalue",
    "mc_quantile",
    "moment_process",
    "multi_moment_process",
    "norm",
    "normalizer",
    "outer",
    "power_weight",
    "residualized_moment_process",
    "run_test",
    "sample_lrv",
    "statistic",
    "sym_eig",
    "uniform_grid",
    "zero_curve",
]
