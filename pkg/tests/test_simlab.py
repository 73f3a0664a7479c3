import numpy as np
import pytest

from funflir.hilbert import fourier_basis, inner_product, norm, uniform_grid
from funflir.lrv import PARZEN
from funflir.simlab import (
    DgpSpec,
    brownian_bridges,
    draw_baseline_params,
    gen_baseline,
    gen_baseline_intercept,
    gen_seong,
    run_experiment,
)
from funflir.testkit import INTERCEPT, PLAIN, TestConfig as Config
from funflir.weights import endpoint_weight, power_weight

GRID = uniform_grid(101)


class TestDgpSpec:
    def test_label(self):
        spec = DgpSpec("baseline", T=200, beta_u=0.1, design="weak", kappa=5.0)
        assert spec.label() == "baseline/T=200/beta_u=0.1/weak/kappa=5"

    def test_validation(self):
        with pytest.raises(ValueError):
            DgpSpec(family="nope")
        with pytest.raises(ValueError):
            DgpSpec(design="nope")
        with pytest.raises(ValueError):
            DgpSpec(T=5)
        with pytest.raises(ValueError):
            DgpSpec(kappa=-1.0)


class TestBrownianBridges:
    def test_pinned_endpoints(self):
        rng = np.random.default_rng(0)
        b = brownian_bridges(rng, GRID, size=50)
        assert np.max(np.abs(b[:, 0])) == 0.0
        assert np.max(np.abs(b[:, -1])) <= 1e-12

    def test_midpoint_variance(self):
        # Var B(t) = t(1-t); at t = 1/2 this is 1/4.
        rng = np.random.default_rng(1)
        b = brownian_bridges(rng, GRID, size=20000)
        mid = b[:, 50]
        assert np.mean(mid) == pytest.approx(0.0, abs=0.02)
        assert np.var(mid) == pytest.approx(0.25, abs=0.02)

    def test_covariance_structure(self):
        # Cov(B(s), B(t)) = s(1-t) for s <= t.
        rng = np.random.default_rng(2)
        b = brownian_bridges(rng, GRID, size=20000)
        s, t = 25, 75  # grid points 0.25 and 0.75
        cov = np.mean(b[:, s] * b[:, t])
        assert cov == pytest.approx(0.25 * (1 - 0.75), abs=0.02)


class TestDrawBaselineParams:
    def test_shapes_and_ranges(self):
        rng = np.random.default_rng(3)
        p = draw_baseline_params(rng, "informative", GRID)
        assert p.ar_coef.shape == (50,)
        assert np.all(p.ar_coef >= -0.2) and np.all(p.ar_coef <= 0.8)
        assert np.all(p.aux_coef >= 0.8) and np.all(p.aux_coef <= 1.2)

    def test_psi_bar_unit_norm_in_low_span(self):
        rng = np.random.default_rng(4)
        p = draw_baseline_params(rng, "informative", GRID)
        w = GRID.quad_weights
        assert float(np.dot(w * p.psi_bar, p.psi_bar)) == pytest.approx(1.0,
                                                                        abs=1e-10)
        # psi_bar lies in the span of the first three basis curves.
        B = np.vstack([fourier_basis(j, GRID).values for j in range(1, 4)])
        proj = (B * w) @ p.psi_bar
        recon = proj @ B
        assert np.max(np.abs(recon - p.psi_bar)) <= 1e-6

    def test_weak_design_masks_coefficients(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            p = draw_baseline_params(rng, "weak", GRID)
            active = np.flatnonzero(p.aux_coef)
            assert 1 <= active.size <= 4
            assert np.max(active) <= 4  # only the first five can be active


class TestGenBaseline:
    def test_shapes_and_reproducibility(self):
        spec = DgpSpec(T=50, seed=7)
        Z, y, X = gen_baseline(spec)
        assert len(Z) == len(X) == len(y.values) == 50
        Z2, y2, X2 = gen_baseline(spec)
        assert np.array_equal(Z.data, Z2.data)
        assert np.array_equal(y.values, y2.values)
        assert np.array_equal(X.data, X2.data)
        Z3, _, _ = gen_baseline(DgpSpec(T=50, seed=8))
        assert not np.array_equal(Z.data, Z3.data)

    def test_null_response_is_error(self):
        # kappa = 0 means y_t = u_t ~ N(0,1) i.i.d.
        spec = DgpSpec(T=2000, kappa=0.0, seed=9)
        _, y, _ = gen_baseline(spec)
        assert np.mean(y.values) == pytest.approx(0.0, abs=0.1)
        assert np.var(y.values) == pytest.approx(1.0, abs=0.1)

    def test_local_drift_scaling(self):
        # Same seed and params: y(kappa) - y(0) = kappa/sqrt(T) <X, psi_bar>.
        rng = np.random.default_rng(10)
        params = draw_baseline_params(rng, "informative", GRID)
        base = DgpSpec(T=100, kappa=0.0, seed=11)
        alt = DgpSpec(T=100, kappa=10.0, seed=11)
        _, y0, X0 = gen_baseline(base, params=params)
        _, y1, X1 = gen_baseline(alt, params=params)
        assert np.array_equal(X0.data, X1.data)
        shift = X0.data @ (GRID.quad_weights * params.psi_bar)
        assert np.allclose(y1.values - y0.values, shift, atol=1e-10)

    def test_endogeneity_correlation(self):
        # corr(<X_t, 1>, u_t) grows with beta_u.
        w = GRID.quad_weights
        spec0 = DgpSpec(T=4000, beta_u=0.0, kappa=0.0, seed=12)
        spec1 = DgpSpec(T=4000, beta_u=0.25, kappa=0.0, seed=12)
        _, y0, X0 = gen_baseline(spec0)
        _, y1, X1 = gen_baseline(spec1)
        c0 = np.corrcoef(X0.data @ w, y0.values)[0, 1]
        c1 = np.corrcoef(X1.data @ w, y1.values)[0, 1]
        assert abs(c0) < 0.05
        assert c1 > 0.3

    def test_instrument_relevance(self):
        # Z filters the regressor's persistent part; sample cross-
        # covariance with X must be substantial in the informative design.
        spec = DgpSpec(T=2000, beta_u=0.1, kappa=0.0, seed=13)
        Z, _, X = gen_baseline(spec)
        w = GRID.quad_weights
        zx = np.corrcoef(Z.data @ w, X.data @ w)[0, 1]
        assert zx > 0.5


class TestGenBaselineIntercept:
    def test_nonzero_means(self):
        spec = DgpSpec(family="baseline_intercept", T=2000, kappa=0.0, seed=14)
        Z, y, X = gen_baseline_intercept(spec)
        assert abs(np.mean(y.values)) > 0.1
        assert norm_of_mean(X) > 0.1
        assert norm_of_mean(Z) > 0.1

    def test_demeaning_recovers_baseline_shape(self):
        # The added means are constant over t: centering the intercept
        # sample gives the same data as centering a baseline sample
        # generated from the same continued stream.
        spec = DgpSpec(family="baseline_intercept", T=100, kappa=0.0, seed=15)
        Z, y, X = gen_baseline_intercept(spec)
        Zc = Z.data - Z.data.mean(axis=0)
        rng = np.random.default_rng(15)
        rng.standard_normal()      # mu_y
        rng.standard_normal(3)     # mu_X coefficients
        rng.standard_normal(3)     # mu_Z coefficients
        Zb, yb, Xb = gen_baseline(DgpSpec(T=100, kappa=0.0, seed=15), rng=rng)
        assert np.allclose(Zc, Zb.data - Zb.data.mean(axis=0), atol=1e-10)
        assert np.allclose(y.values - y.values.mean(),
                           yb.values - yb.values.mean(), atol=1e-10)


def norm_of_mean(series):
    from funflir.hilbert import Curve

    return norm(Curve(series.grid, series.data.mean(axis=0)))


class TestGenSeong:
    def test_shapes_and_null_identity(self):
        spec = DgpSpec(family="seong", T=80, kappa=0.0, seed=16)
        Z, y, X, theta0 = gen_seong(spec)
        assert len(Z) == len(X) == len(y.values) == 80
        # With kappa = 0 the regression identity holds at theta0 with
        # error u = <U, phi>; verify y - <X, theta0> is uncorrelated
        # with the bridge-free part of Z under exogeneity... instead
        # check the arithmetic identity on a reconstruction:
        spec_k = DgpSpec(family="seong", T=80, kappa=2.0, seed=16)
        Zk, yk, Xk, theta0k = gen_seong(spec_k)
        assert np.array_equal(theta0.values, theta0k.values)
        assert np.array_equal(Xk.data, X.data)
        # y(kappa) - y(0) = kappa <X, psi_bar> with ||psi_bar|| = 1.
        diff = yk.values - y.values
        u0 = y.values - X.data @ (GRID.quad_weights * theta0.values)
        uk = yk.values - Xk.data @ (GRID.quad_weights * theta0.values)
        # The drift in the residual has norm kappa per unit <X, psi_bar>;
        # check it is a linear functional of X.
        coef = np.linalg.lstsq(X.data, diff, rcond=None)
        assert np.max(np.abs(X.data @ coef[0] - diff)) <= 1e-8
        assert np.var(uk - u0) == pytest.approx(np.var(diff), rel=1e-10)

    def test_regressor_link(self):
        spec = DgpSpec(family="seong", T=400, kappa=0.0, seed=17)
        Z, _, X, _ = gen_seong(spec)
        w = GRID.quad_weights
        r = np.corrcoef(Z.data @ w, X.data @ w)[0, 1]
        assert r > 0.5

    def test_weak_design_kills_higher_projections(self):
        spec = DgpSpec(family="seong", T=300, design="weak", kappa=0.0, seed=18)
        Z, _, _, _ = gen_seong(spec, weak_noise_scale=1.0)
        # Beyond f_2 the weak auxiliary curve is pure bridge noise, so
        # its projection variance on f_4 matches a bridge's.
        f4 = fourier_basis(4, GRID)
        proj = Z.data @ (GRID.quad_weights * f4.values)
        # For a bridge B = sum_k xi_k sqrt(2) sin(k pi x) / (k pi), the
        # projection on sqrt(2) sin(4 pi x) is xi_4 / (4 pi).
        assert np.var(proj) == pytest.approx(1.0 / (4 * np.pi) ** 2, rel=0.4)

    def test_weak_noise_scale_scales_higher_projections(self):
        spec = DgpSpec(family="seong", T=300, design="weak", kappa=0.0, seed=18)
        f4 = fourier_basis(4, GRID)
        base = gen_seong(spec, weak_noise_scale=1.0)[0]
        wide = gen_seong(spec, weak_noise_scale=2.0)[0]
        v1 = np.var(base.data @ (GRID.quad_weights * f4.values))
        v2 = np.var(wide.data @ (GRID.quad_weights * f4.values))
        assert v2 == pytest.approx(4.0 * v1, rel=1e-9)

    def test_theta0_reproducible(self):
        a = gen_seong(DgpSpec(family="seong", T=50, seed=19))[3]
        b = gen_seong(DgpSpec(family="seong", T=50, seed=19))[3]
        assert np.array_equal(a.values, b.values)


class TestRunExperiment:
    def test_report_structure_and_rates(self):
        dgps = [DgpSpec(T=60, beta_u=0.1, kappa=0.0, seed=0)]
        configs = [
            Config(variant=PLAIN, weight=endpoint_weight(), kernel=PARZEN),
            Config(variant=PLAIN, weight=power_weight(7), kernel=PARZEN),
        ]
        report = run_experiment(dgps, configs, replications=100, base_seed=1)
        assert report.replications == 100
        assert len(report.rates) == 2
        for key, rate in report.rates.items():
            assert 0.0 <= rate <= 100.0
            assert report.std_errors[key] >= 0.0
        text = report.to_text()
        assert "replications" in text
        import json

        payload = json.loads(report.to_json())
        assert len(payload["cells"]) == 2

    def test_duplicate_configs_collapse_to_one_cell(self):
        # Configs with the same label index the same report cell; the
        # duplicate run must not disturb the shared pipeline stages.
        dgps = [DgpSpec(T=60, kappa=0.0, seed=0)]
        dup = [
            Config(variant=INTERCEPT, weight=endpoint_weight(), kernel=PARZEN),
            Config(variant=INTERCEPT, weight=endpoint_weight(), kernel=PARZEN),
        ]
        report = run_experiment(dgps, dup, replications=100, base_seed=2)
        single = run_experiment(dgps, dup[:1], replications=100, base_seed=2)
        assert list(report.rates.values()) == list(single.rates.values())

    def test_rejects_too_few_replications(self):
        with pytest.raises(ValueError):
            run_experiment([DgpSpec()], [Config()], replications=10)

    def test_base_seed_changes_rates(self):
        dgps = [DgpSpec(T=60, kappa=0.0, seed=0)]
        configs = [Config(weight=endpoint_weight(), kernel=PARZEN)]
        a = run_experiment(dgps, configs, replications=100, base_seed=3)
        b = run_experiment(dgps, configs, replications=100, base_seed=3)
        c = run_experiment(dgps, configs, replications=100, base_seed=4)
        assert list(a.rates.values()) == list(b.rates.values())
        assert list(a.rates.values()) != list(c.rates.values())
