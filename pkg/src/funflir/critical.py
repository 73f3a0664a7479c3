"""Monte Carlo critical values for weighted-chi-square limits.

The null distribution of the test statistic is sum_j lambda_j nu_j^2
with nu_j i.i.d. standard normal; quantiles and p-values are simulated
from seeded draws.  Under local alternatives the limit acquires a mean
shift in each eigendirection, which local_limit_draws / local_power
simulate from the same spectral data.
"""

from __future__ import annotations

import math

import numpy as np

from .hilbert import Curve, inner_product

__all__ = [
    "DegenerateSpectrumError",
    "mc_quantile",
    "mc_pvalue",
    "local_limit_draws",
    "local_power",
    "derive_seeds",
]

#: Eigenvalues at or below this threshold count as numerically zero.
SPECTRUM_FLOOR = 1e-14


class DegenerateSpectrumError(ValueError):
    """All eigenvalues are numerically zero; the test cannot be calibrated."""


def derive_seeds(base_seed: int, n: int, key: int = 0) -> np.ndarray:
    """Deterministic child seeds for parallel replication streams."""
    ss = np.random.SeedSequence(entropy=[int(base_seed), int(key)])
    return ss.generate_state(n, dtype=np.uint64)


def _checked_lambdas(lambdas) -> np.ndarray:
    lam = np.asarray(lambdas, dtype=float)
    if lam.ndim != 1 or lam.size == 0:
        raise ValueError("need a one-dimensional eigenvalue vector")
    if np.any(lam < -SPECTRUM_FLOOR):
        raise ValueError("eigenvalues must be nonnegative")
    if np.all(lam <= SPECTRUM_FLOOR):
        raise DegenerateSpectrumError("all eigenvalues are numerically zero")
    return np.clip(lam, 0.0, None)


def _chisq_draws(lam: np.ndarray, draws: int, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    nu = rng.standard_normal((draws, lam.size))
    return (nu * nu) @ lam


def mc_quantile(lambdas, alpha: float, draws: int = 1000, seed=0) -> float:
    """Empirical (1-alpha)-quantile of sum_j lambda_j nu_j^2.

    Uses the order statistic at ceil((1-alpha) * draws), so results are
    bit-reproducible for a given seed.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if draws < 1:
        raise ValueError("need at least one draw")
    lam = _checked_lambdas(lambdas)
    sample = np.sort(_chisq_draws(lam, draws, seed))
    idx = min(max(math.ceil((1.0 - alpha) * draws), 1), draws)
    return float(sample[idx - 1])


def mc_pvalue(lambdas, stat: float, draws: int = 1000, seed=0) -> float:
    """Monte Carlo p-value with the (r+1)/(n+1) correction."""
    if draws < 1:
        raise ValueError("need at least one draw")
    lam = _checked_lambdas(lambdas)
    r = int(np.count_nonzero(_chisq_draws(lam, draws, seed) > stat))
    return (r + 1) / (draws + 1)


def _shift_deltas(lambdas, eigvecs, shift: Curve) -> np.ndarray:
    lam = np.asarray(lambdas, dtype=float)
    deltas = np.zeros(lam.size)
    for j, v in enumerate(eigvecs[: lam.size]):
        deltas[j] = inner_product(shift, v)
    return deltas


def local_limit_draws(lambdas, eigvecs, shift: Curve, draws: int, seed=0) -> np.ndarray:
    """Draws of sum_j (sqrt(lambda_j) nu_j + <shift, v_j>)^2."""
    lam = np.clip(np.asarray(lambdas, dtype=float), 0.0, None)
    deltas = _shift_deltas(lam, eigvecs, shift)
    rng = np.random.default_rng(seed)
    nu = rng.standard_normal((draws, lam.size))
    return ((nu * np.sqrt(lam) + deltas) ** 2).sum(axis=1)


def local_power(lambdas, eigvecs, shift: Curve, alpha: float,
                draws: int = 1000, seed=0) -> float:
    """P(local limit > null (1-alpha)-quantile), both simulated.

    Independent sub-streams are derived from the seed for the quantile
    and the alternative draws.
    """
    s_q, s_d = derive_seeds(seed, 2, key=0xA17)
    q = mc_quantile(lambdas, alpha, draws, seed=s_q)
    x = local_limit_draws(lambdas, eigvecs, shift, draws, seed=s_d)
    return float(np.mean(x > q))
