"""Discretized Hilbert-space primitives on [0, 1].

Curves are represented by their values on a shared grid of points in
[0, 1]; inner products use trapezoid quadrature.  Linear operators are
dense kernel matrices interpreted against the quadrature weights, so
that ``apply(A, v)(s) = sum_j w_j A[s, j] v_j`` discretizes the integral
operator with kernel A(s, r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid",
    "Curve",
    "FunctionalSeries",
    "ScalarSeries",
    "HilbertOperator",
    "GridMismatchError",
    "uniform_grid",
    "inner_product",
    "norm",
    "outer",
    "apply",
    "fourier_basis",
    "sym_eig",
    "zero_curve",
    "trace",
]


class GridMismatchError(ValueError):
    """Raised when operands do not share the same grid."""


def _as_readonly(a) -> np.ndarray:
    out = np.asarray(a, dtype=float)
    out = out.copy() if out.flags.writeable else out
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Grid:
    """Quadrature grid on [0, 1] with trapezoid weights summing to one."""

    points: np.ndarray
    quad_weights: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        pts = _as_readonly(self.points)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("grid needs at least two points")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("grid points must be strictly increasing")
        if not math.isclose(pts[0], 0.0, abs_tol=1e-12) or not math.isclose(
            pts[-1], 1.0, abs_tol=1e-12
        ):
            raise ValueError("grid must start at 0 and end at 1")
        if self.quad_weights is None:
            w = np.zeros_like(pts)
            d = np.diff(pts)
            w[:-1] += d / 2.0
            w[1:] += d / 2.0
        else:
            w = np.asarray(self.quad_weights, dtype=float)
            if w.shape != pts.shape or np.any(w < 0):
                raise ValueError("quadrature weights invalid")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("quadrature weights must sum to 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "quad_weights", _as_readonly(w))

    def __len__(self) -> int:
        return self.points.size

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Grid):
            return NotImplemented
        return np.array_equal(self.points, other.points)

    def __hash__(self) -> int:
        return hash((self.points.size, float(self.points[1])))


def uniform_grid(n: int = 101) -> Grid:
    """Uniform grid of ``n`` points on [0, 1]."""
    return Grid(np.linspace(0.0, 1.0, n))


DEFAULT_GRID = uniform_grid(101)


def _check_same_grid(*objs) -> Grid:
    grid = objs[0].grid
    for o in objs[1:]:
        if o.grid != grid:
            raise GridMismatchError("operands are defined on different grids")
    return grid


@dataclass(frozen=True)
class Curve:
    """A functional datum: values of an element of L^2[0,1] on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = _as_readonly(self.values)
        if vals.shape != (len(self.grid),):
            raise ValueError("curve values must match grid length")
        if not np.all(np.isfinite(vals)):
            raise ValueError("curve values must be finite")
        object.__setattr__(self, "values", vals)

    def __add__(self, other: "Curve") -> "Curve":
        _check_same_grid(self, other)
        return Curve(self.grid, self.values + other.values)

    def __sub__(self, other: "Curve") -> "Curve":
        _check_same_grid(self, other)
        return Curve(self.grid, self.values - other.values)

    def __mul__(self, c: float) -> "Curve":
        return Curve(self.grid, self.values * float(c))

    __rmul__ = __mul__


def zero_curve(grid: Grid) -> Curve:
    return Curve(grid, np.zeros(len(grid)))


@dataclass(frozen=True)
class FunctionalSeries:
    """Time-indexed collection of curves sharing one grid (T x n matrix)."""

    grid: Grid
    data: np.ndarray

    def __post_init__(self):
        data = _as_readonly(self.data)
        if data.ndim != 2 or data.shape[1] != len(self.grid):
            raise ValueError("series data must be T x len(grid)")
        if data.shape[0] < 2:
            raise ValueError("series length must be at least 2")
        if not np.all(np.isfinite(data)):
            raise ValueError("series values must be finite")
        object.__setattr__(self, "data", data)

    @classmethod
    def from_curves(cls, curves) -> "FunctionalSeries":
        grid = _check_same_grid(*curves)
        return cls(grid, np.vstack([c.values for c in curves]))

    def __len__(self) -> int:
        return self.data.shape[0]

    def curve(self, t: int) -> Curve:
        return Curve(self.grid, self.data[t])

    def mean(self) -> Curve:
        return Curve(self.grid, self.data.mean(axis=0))


@dataclass(frozen=True)
class ScalarSeries:
    """Time-indexed real observations."""

    values: np.ndarray

    def __post_init__(self):
        vals = _as_readonly(self.values)
        if vals.ndim != 1:
            raise ValueError("scalar series must be one-dimensional")
        if not np.all(np.isfinite(vals)):
            raise ValueError("scalar series values must be finite")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class HilbertOperator:
    """Dense integral-operator kernel interpreted against quad weights."""

    grid: Grid
    matrix: np.ndarray

    def __post_init__(self):
        n = len(self.grid)
        mat = _as_readonly(self.matrix)
        if mat.shape != (n, n):
            raise ValueError("operator matrix must be n x n for the grid")
        if not np.all(np.isfinite(mat)):
            raise ValueError("operator entries must be finite")
        object.__setattr__(self, "matrix", mat)


def inner_product(f: Curve, g: Curve) -> float:
    """Trapezoid-quadrature L^2 inner product of two curves."""
    grid = _check_same_grid(f, g)
    return float(np.dot(grid.quad_weights * f.values, g.values))


def norm(f: Curve) -> float:
    """L^2 norm sqrt(<f, f>)."""
    return math.sqrt(max(inner_product(f, f), 0.0))


def outer(f: Curve, g: Curve) -> HilbertOperator:
    """Tensor product f (x) g, the map u |-> <f, u> g."""
    grid = _check_same_grid(f, g)
    return HilbertOperator(grid, np.outer(g.values, f.values))


def apply(A: HilbertOperator, v: Curve) -> Curve:
    """Quadrature-weighted action of the operator on a curve."""
    grid = _check_same_grid(A, v)
    return Curve(grid, A.matrix @ (grid.quad_weights * v.values))


def trace(A: HilbertOperator) -> float:
    """Quadrature-weighted trace sum_i w_i A[i, i]."""
    return float(np.dot(A.grid.quad_weights, np.diag(A.matrix)))


def fourier_basis(j: int, grid: Grid = DEFAULT_GRID) -> Curve:
    """Standard Fourier basis: f1 = 1, f_{2m} = sqrt2 sin(2 pi m x),
    f_{2m+1} = sqrt2 cos(2 pi m x)."""
    if j < 1:
        raise ValueError("basis index must be >= 1")
    x = grid.points
    if j == 1:
        vals = np.ones_like(x)
    elif j % 2 == 0:
        m = j // 2
        vals = math.sqrt(2.0) * np.sin(2.0 * math.pi * m * x)
    else:
        m = (j - 1) // 2
        vals = math.sqrt(2.0) * np.cos(2.0 * math.pi * m * x)
    return Curve(grid, vals)


def fourier_matrix(n_basis: int, grid: Grid) -> np.ndarray:
    """Rows j = 1..n_basis of the Fourier basis evaluated on the grid."""
    return np.vstack([fourier_basis(j, grid).values for j in range(1, n_basis + 1)])


def sym_eig(A: HilbertOperator):
    """Eigendecomposition of a (symmetrized) self-adjoint operator.

    Returns eigenvalues in descending order and quadrature-orthonormal
    eigenvector curves.  Works in the similarity transform
    B = W^{1/2} A W^{1/2} so a plain symmetric dense solver applies.
    """
    grid = A.grid
    M = 0.5 * (A.matrix + A.matrix.T)
    sw = np.sqrt(grid.quad_weights)
    B = (sw[:, None] * M) * sw[None, :]
    evals, U = np.linalg.eigh(B)
    order = np.argsort(evals)[::-1]
    evals = evals[order]
    # Quadrature weights vanish nowhere on a valid grid, so this is safe.
    V = U[:, order] / sw[:, None]
    eigvecs = [Curve(grid, V[:, k]) for k in range(V.shape[1])]
    return evals, eigvecs
