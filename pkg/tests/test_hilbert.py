import numpy as np
import pytest

from funflir.hilbert import (
    Curve,
    FunctionalSeries,
    Grid,
    GridMismatchError,
    HilbertOperator,
    apply,
    fourier_basis,
    inner_product,
    norm,
    outer,
    sym_eig,
    trace,
    uniform_grid,
    zero_curve,
)

GRID = uniform_grid(101)
FINE = uniform_grid(401)


def random_curve(rng, grid=GRID):
    return Curve(grid, rng.standard_normal(len(grid)))


class TestGrid:
    def test_uniform_weights_sum_to_one(self):
        assert np.isclose(GRID.quad_weights.sum(), 1.0, atol=1e-14)

    def test_rejects_non_increasing(self):
        with pytest.raises(ValueError):
            Grid(np.array([0.0, 0.5, 0.5, 1.0]))

    def test_rejects_wrong_endpoints(self):
        with pytest.raises(ValueError):
            Grid(np.array([0.1, 0.5, 1.0]))
        with pytest.raises(ValueError):
            Grid(np.array([0.0, 0.5, 0.9]))

    def test_equality_by_points(self):
        assert uniform_grid(101) == uniform_grid(101)
        assert uniform_grid(101) != uniform_grid(51)


class TestInnerProduct:
    def test_basis_norm_one(self):
        f = fourier_basis(2, FINE)
        assert inner_product(f, f) == pytest.approx(1.0, abs=1e-4)

    def test_basis_orthogonal(self):
        f = fourier_basis(2, FINE)
        g = fourier_basis(3, FINE)
        assert inner_product(f, g) == pytest.approx(0.0, abs=1e-4)

    def test_constants(self):
        f = Curve(GRID, np.full(101, 2.0))
        g = Curve(GRID, np.full(101, 3.0))
        assert inner_product(f, g) == pytest.approx(6.0, abs=1e-12)

    def test_grid_mismatch(self):
        with pytest.raises(GridMismatchError):
            inner_product(fourier_basis(1, GRID), fourier_basis(1, FINE))

    def test_bilinear_symmetric_cauchy_schwarz(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            f, g, h = (random_curve(rng) for _ in range(3))
            a, b = rng.standard_normal(2)
            lhs = inner_product(Curve(GRID, a * f.values + b * g.values), h)
            assert lhs == pytest.approx(
                a * inner_product(f, h) + b * inner_product(g, h), abs=1e-10
            )
            assert inner_product(f, g) == pytest.approx(inner_product(g, f))
            assert abs(inner_product(f, g)) <= norm(f) * norm(g) + 1e-12


class TestNorm:
    def test_zero(self):
        assert norm(zero_curve(GRID)) == 0.0

    def test_constant_one(self):
        assert norm(fourier_basis(1, GRID)) == pytest.approx(1.0, abs=1e-12)

    def test_identity_function(self):
        f = Curve(FINE, FINE.points)
        assert norm(f) == pytest.approx(1.0 / np.sqrt(3.0), abs=1e-3)


class TestOuterApply:
    def test_projection_fixes_unit_vector(self):
        e = fourier_basis(2, GRID)
        out = apply(outer(e, e), e)
        assert np.allclose(out.values, e.values, atol=1e-6)

    def test_orthogonal_maps_to_zero(self):
        rng = np.random.default_rng(1)
        f = fourier_basis(2, GRID)
        g = random_curve(rng)
        u = fourier_basis(3, GRID)  # orthogonal to f
        out = apply(outer(f, g), u)
        assert norm(out) <= 1e-6 * norm(g)

    def test_rank_one_trace(self):
        f = fourier_basis(1, GRID)
        assert trace(outer(f, f)) == pytest.approx(1.0, abs=1e-4)

    def test_outer_identity_random(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            f, g, u = (random_curve(rng) for _ in range(3))
            out = apply(outer(f, g), u)
            expect = inner_product(f, u) * g.values
            assert np.max(np.abs(out.values - expect)) <= 1e-10

    def test_apply_zero_and_scaled_eigenvector(self):
        z = HilbertOperator(GRID, np.zeros((101, 101)))
        v = fourier_basis(4, GRID)
        assert norm(apply(z, v)) == 0.0
        e = fourier_basis(2, GRID)
        A = HilbertOperator(GRID, 2.0 * outer(e, e).matrix)
        out = apply(A, e)
        assert np.allclose(out.values, 2.0 * e.values, atol=1e-6)


class TestFourierBasis:
    def test_first_is_constant(self):
        assert np.allclose(fourier_basis(1, GRID).values, 1.0)

    def test_sine_value(self):
        f = fourier_basis(2, GRID)
        i = np.searchsorted(GRID.points, 0.25)
        assert f.values[i] == pytest.approx(np.sqrt(2.0), abs=1e-12)

    def test_cosine_value_at_zero(self):
        f = fourier_basis(3, GRID)
        assert f.values[0] == pytest.approx(np.sqrt(2.0), abs=1e-12)

    def test_gram_identity(self):
        B = np.vstack([fourier_basis(j, FINE).values for j in range(1, 16)])
        G = (B * FINE.quad_weights) @ B.T
        assert np.max(np.abs(G - np.eye(15))) <= 1e-4

    def test_rejects_nonpositive_index(self):
        with pytest.raises(ValueError):
            fourier_basis(0, GRID)


class TestSymEig:
    def test_two_projectors(self):
        e1 = fourier_basis(2, GRID)
        e2 = fourier_basis(3, GRID)
        A = HilbertOperator(GRID, 2 * outer(e1, e1).matrix + outer(e2, e2).matrix)
        evals, _ = sym_eig(A)
        assert evals[0] == pytest.approx(2.0, abs=1e-6)
        assert evals[1] == pytest.approx(1.0, abs=1e-6)
        assert np.max(np.abs(evals[2:])) <= 1e-8

    def test_zero_operator(self):
        evals, _ = sym_eig(HilbertOperator(GRID, np.zeros((101, 101))))
        assert np.max(np.abs(evals)) == 0.0

    def test_rank_one_norm_squared(self):
        f = Curve(GRID, 2.0 * fourier_basis(2, GRID).values)
        evals, _ = sym_eig(outer(f, f))
        assert evals[0] == pytest.approx(norm(f) ** 2, abs=1e-6)

    def test_orthonormal_eigenvectors_and_reconstruction(self):
        rng = np.random.default_rng(3)
        B = rng.standard_normal((101, 101))
        A = HilbertOperator(GRID, B + B.T)
        evals, vecs = sym_eig(A)
        for i in range(4):
            for j in range(4):
                assert inner_product(vecs[i], vecs[j]) == pytest.approx(
                    float(i == j), abs=1e-8
                )
        recon = sum(lam * np.outer(v.values, v.values)
                    for lam, v in zip(evals, vecs))
        sym = 0.5 * (A.matrix + A.matrix.T)
        assert np.max(np.abs(recon - sym)) <= 1e-8 * np.max(np.abs(sym))

    def test_trace_identity(self):
        rng = np.random.default_rng(4)
        B = rng.standard_normal((101, 101))
        A = HilbertOperator(GRID, B + B.T)
        evals, _ = sym_eig(A)
        assert evals.sum() == pytest.approx(trace(A), rel=1e-8)


class TestSeriesTypes:
    def test_series_from_curves_and_access(self):
        rng = np.random.default_rng(5)
        curves = [random_curve(rng) for _ in range(4)]
        s = FunctionalSeries.from_curves(curves)
        assert len(s) == 4
        assert np.array_equal(s.curve(2).values, curves[2].values)

    def test_series_rejects_nonfinite(self):
        data = np.zeros((3, 101))
        data[1, 5] = np.nan
        with pytest.raises(ValueError):
            FunctionalSeries(GRID, data)

    def test_curve_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            Curve(GRID, np.zeros(50))
