"""Weight functionals g_w for the moment process.

A weight specification pairs a nonnegative weight function w on [0, 1]
with a measure mu (Lebesgue, a discrete partition, or a point mass at 1).
The normalizer C_w = (int (int_s^1 w dmu)^2 dmu(s))^{-1/2} makes the
functional g_w(f) = C_w int f(r) w(r) dmu(r) of a Brownian motion have
unit variance; the drift factor D_w = C_w int r w(r) dmu(r) lies in
(0, 1] and summarizes local power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .hilbert import Curve
from .moments import MomentProcess

__all__ = [
    "WeightSpec",
    "DegenerateWeightError",
    "power_weight",
    "endpoint_weight",
    "normalizer",
    "drift_factor",
    "apply_g",
    "statistic",
]

LEBESGUE = "lebesgue"
PARTITION = "partition"
DIRAC_AT_ONE = "dirac_at_one"

#: Number of quadrature points for continuous C_w / D_w integrals.
_FINE_QUAD_POINTS = 2001


class DegenerateWeightError(ValueError):
    """Weight/measure combination with vanishing normalization integral."""


@dataclass(frozen=True)
class WeightSpec:
    """Weight function plus integration measure for g_w."""

    measure: str
    weight: Callable[[np.ndarray], np.ndarray]
    partition: np.ndarray | None = None
    label: str = "custom"

    def __post_init__(self):
        if self.measure not in (LEBESGUE, PARTITION, DIRAC_AT_ONE):
            raise ValueError(f"unknown measure {self.measure!r}")
        if self.measure == PARTITION:
            pts = np.asarray(self.partition, dtype=float)
            if pts.ndim != 1 or pts.size < 1:
                raise ValueError("partition must be a nonempty 1-d array")
            if np.any(np.diff(pts) <= 0) or pts[0] <= 0 or abs(pts[-1] - 1) > 1e-12:
                raise ValueError("partition must be increasing in (0, 1] ending at 1")
            object.__setattr__(self, "partition", pts)
        probe = np.linspace(0.0, 1.0, 101)
        wv = np.asarray(self.weight(probe), dtype=float)
        if np.any(wv < 0):
            raise ValueError("weight function must be nonnegative")

    def __repr__(self):
        return f"WeightSpec({self.label})"


def power_weight(p: float) -> WeightSpec:
    """Lebesgue-measure weight w(r) = r^p, p >= 0."""
    if p < 0:
        raise ValueError("power must be nonnegative")
    return WeightSpec(LEBESGUE, lambda r, p=p: np.asarray(r, dtype=float) ** p,
                      label=f"p={p:g}")


def endpoint_weight() -> WeightSpec:
    """Point mass at r = 1 with unit weight: g_w(f) = f(1)."""
    return WeightSpec(DIRAC_AT_ONE, lambda r: np.ones_like(np.asarray(r, dtype=float)),
                      label="endpoint")


def _atoms_and_masses(spec: WeightSpec):
    """Atoms r_j and masses (r_j - r_{j-1}) of a discrete measure."""
    if spec.measure == DIRAC_AT_ONE:
        return np.array([1.0]), np.array([1.0])
    pts = spec.partition
    masses = np.diff(np.concatenate(([0.0], pts)))
    return pts, masses


def _normalizer_terms(spec: WeightSpec):
    """Return (C-denominator integral, int r w dmu)."""
    if spec.measure == LEBESGUE:
        r = np.linspace(0.0, 1.0, _FINE_QUAD_POINTS)
        w = np.asarray(spec.weight(r), dtype=float)
        # F(s) = int_s^1 w(r) dr via reversed cumulative trapezoid.
        dr = np.diff(r)
        seg = dr * (w[:-1] + w[1:]) / 2.0
        F = np.concatenate((np.cumsum(seg[::-1])[::-1], [0.0]))
        denom = np.trapezoid(F**2, r)
        B = np.trapezoid(r * w, r)
        return denom, B
    atoms, masses = _atoms_and_masses(spec)
    w = np.asarray(spec.weight(atoms), dtype=float)
    wm = w * masses
    # F(r_i) = sum_{j>=i} w(r_j) m_j (the atom at r_i is included).
    F = np.cumsum(wm[::-1])[::-1]
    denom = float(np.sum(F**2 * masses))
    B = float(np.sum(atoms * wm))
    return denom, B


def normalizer(spec: WeightSpec) -> float:
    """C_w = (int (int_s^1 w dmu)^2 dmu(s))^{-1/2}."""
    denom, _ = _normalizer_terms(spec)
    if denom <= 0:
        raise DegenerateWeightError("normalization integral is not positive")
    return 1.0 / math.sqrt(denom)


def drift_factor(spec: WeightSpec) -> float:
    """D_w = C_w * int r w(r) dmu(r); lies in (0, 1]."""
    denom, B = _normalizer_terms(spec)
    if denom <= 0 or B <= 0:
        raise DegenerateWeightError("weight spec has vanishing drift integral")
    return B / math.sqrt(denom)


def apply_g(spec: WeightSpec, process: MomentProcess) -> Curve:
    """C_w-normalized weighted integral of the step process.

    Lebesgue measures are realized exactly on the natural partition
    {i/T}; discrete partitions must be subsets of it.
    """
    T = process.T
    C = normalizer(spec)
    if spec.measure == DIRAC_AT_ONE:
        wv = float(np.asarray(spec.weight(np.array([1.0])))[0])
        return Curve(process.grid, C * wv * process.values[-1])
    if spec.measure == LEBESGUE:
        r = np.arange(1, T + 1) / T
        masses = np.full(T, 1.0 / T)
        S = process.values[1:]
    else:
        r = spec.partition
        idx = np.rint(r * T).astype(int)
        if np.any(np.abs(idx / T - r) > 1e-9) or np.any(idx < 1) or np.any(idx > T):
            raise ValueError("partition points must lie on the process grid {i/T}")
        masses = np.diff(np.concatenate(([0.0], r)))
        S = process.values[idx]
    w = np.asarray(spec.weight(r), dtype=float)
    return Curve(process.grid, C * ((w * masses) @ S))


def statistic(spec: WeightSpec, process: MomentProcess) -> float:
    """Test statistic T * ||g_w(S)||^2."""
    g = apply_g(spec, process)
    qw = process.grid.quad_weights
    return process.T * float(np.dot(qw * g.values, g.values))
