"""Data generation and closed-form ridge fits against independent solves."""

import numpy as np
import pytest

from powerlaw_ridge.errors import DomainError
from powerlaw_ridge.regression import (
    DataModel,
    analytic_test_mse,
    empirical_test_mse,
    fit_ridge,
    generate,
    sweep_rho,
)


def small_instance(n=5, p=8, alpha=1.75, sigma_sq=1.0, seed=3):
    return generate(DataModel(n=n, p=p, alpha=alpha, sigma_sq=sigma_sq, seed=seed))


class TestGenerate:
    def test_noiseless_labels_are_exact(self):
        data = small_instance(sigma_sq=0.0)
        assert np.array_equal(data.y, data.X.T @ data.beta_star)

    def test_power_law_eigenvalues(self):
        data = generate(DataModel(n=3, p=5, alpha=2.0, sigma_sq=1.0, seed=0))
        expected = np.array([1.0, 1 / 4, 1 / 9, 1 / 16, 1 / 25])
        assert np.allclose(data.eigenvalues, expected, rtol=1e-15)

    def test_deterministic_in_seed(self):
        model = DataModel(n=4, p=6, alpha=1.5, sigma_sq=0.3, seed=11)
        a, b = generate(model), generate(model)
        assert np.array_equal(a.X, b.X)
        assert np.array_equal(a.y, b.y)
        assert np.array_equal(a.beta_star, b.beta_star)

    def test_seeds_decouple(self):
        a = generate(DataModel(n=4, p=6, alpha=1.5, sigma_sq=0.3, seed=11))
        b = generate(DataModel(n=4, p=6, alpha=1.5, sigma_sq=0.3, seed=12))
        assert not np.array_equal(a.X, b.X)

    def test_default_coefficient_variance_is_ten_over_p(self):
        model = DataModel(n=10, p=250, alpha=1.5, sigma_sq=1.0, seed=0)
        assert model.beta_variance == pytest.approx(10.0 / 250)
        override = DataModel(
            n=10, p=250, alpha=1.5, sigma_sq=1.0, beta_star_scale=0.0, seed=0
        )
        assert np.array_equal(generate(override).beta_star, np.zeros(250))

    def test_column_scaling_matches_spectrum(self):
        # each row i of X has variance lambda_i; check the first row's scale
        data = generate(DataModel(n=4000, p=3, alpha=2.0, sigma_sq=0.0, seed=5))
        row_vars = np.var(data.X, axis=1)
        assert row_vars == pytest.approx(data.eigenvalues, rel=0.15)

    def test_validation(self):
        with pytest.raises(DomainError):
            DataModel(n=0, p=3, alpha=2.0, sigma_sq=1.0)
        with pytest.raises(DomainError):
            DataModel(n=3, p=3, alpha=1.0, sigma_sq=1.0)
        with pytest.raises(DomainError):
            DataModel(n=3, p=3, alpha=2.0, sigma_sq=-1.0)


class TestFitRidge:
    def test_dominant_ridge_shrinks_to_zero(self):
        data = small_instance()
        top = float(np.max(np.linalg.eigvalsh(data.X @ data.X.T / data.X.shape[1])))
        fit = fit_ridge(data, 1e9 * top)
        assert np.linalg.norm(fit.beta_hat) < 1e-6 * np.linalg.norm(data.beta_star)

    def test_interpolating_limit_noiseless(self):
        data = small_instance(n=5, p=12, sigma_sq=0.0)
        fit = fit_ridge(data, 1e-12)
        assert fit.train_mse < 1e-8

    @pytest.mark.parametrize("seed", range(20))
    def test_primal_dual_agreement(self, seed):
        data = small_instance(n=5, p=8, seed=seed)
        n = 5
        fit = fit_ridge(data, 0.3)
        primal = np.linalg.solve(
            data.X @ data.X.T / n + 0.3 * np.eye(8), data.X @ data.y / n
        )
        assert np.linalg.norm(fit.beta_hat - primal) <= 1e-10 * np.linalg.norm(primal)

    def test_primal_branch_matches_normal_equations(self):
        data = small_instance(n=9, p=4, seed=1)
        fit = fit_ridge(data, 0.2)
        direct = np.linalg.solve(
            data.X @ data.X.T / 9 + 0.2 * np.eye(4), data.X @ data.y / 9
        )
        assert np.allclose(fit.beta_hat, direct, rtol=1e-12, atol=1e-14)

    def test_metrics_recompute(self):
        data = small_instance(seed=8)
        fit = fit_ridge(data, 0.05)
        train = float(np.mean((data.X.T @ fit.beta_hat - data.y) ** 2))
        assert fit.train_mse == pytest.approx(train, abs=1e-10)
        assert fit.sq_norm == pytest.approx(float(fit.beta_hat @ fit.beta_hat))
        assert fit.test_mse_analytic >= data.sigma_sq

    def test_ridge_optimality_against_perturbations(self):
        data = small_instance(n=6, p=10, seed=13)
        rho = 0.1
        fit = fit_ridge(data, rho)

        def objective(beta):
            return float(
                np.mean((data.X.T @ beta - data.y) ** 2) + rho * beta @ beta
            )

        base = objective(fit.beta_hat)
        rng = np.random.default_rng(99)
        for _ in range(100):
            delta = rng.standard_normal(10) * 10.0 ** rng.uniform(-6, 0)
            assert objective(fit.beta_hat + delta) >= base

    def test_rejects_nonpositive_rho(self):
        data = small_instance()
        with pytest.raises(DomainError):
            fit_ridge(data, 0.0)
        with pytest.raises(DomainError):
            fit_ridge(data, -0.1)


class TestAnalyticTestMse:
    def test_truth_recovers_noise_floor(self):
        data = small_instance(sigma_sq=0.7)
        assert analytic_test_mse(data.beta_star, data, 0.7) == pytest.approx(0.7)

    def test_zero_estimate_on_unit_signal(self):
        data = generate(
            DataModel(n=3, p=4, alpha=2.0, sigma_sq=1.0, beta_star_scale=0.0, seed=0)
        )
        beta_star = np.zeros(4)
        beta_star[0] = 1.0
        data = type(data)(
            X=data.X,
            y=data.y,
            beta_star=beta_star,
            eigenvalues=data.eigenvalues,
            sigma_sq=1.0,
        )
        assert analytic_test_mse(np.zeros(4), data, 1.0) == pytest.approx(2.0)

    def test_matches_monte_carlo_oracle(self):
        data = small_instance(n=30, p=60, sigma_sq=0.5, seed=21)
        fit = fit_ridge(data, 0.02)
        analytic = analytic_test_mse(fit.beta_hat, data, 0.5)
        # large held-out draw; compare within three standard errors
        n_test = 100_000
        rng = np.random.default_rng(1234)
        X_test = np.sqrt(data.eigenvalues)[:, None] * rng.standard_normal((60, n_test))
        y_test = X_test.T @ data.beta_star + rng.standard_normal(n_test) * np.sqrt(0.5)
        sq_errors = (X_test.T @ fit.beta_hat - y_test) ** 2
        se = float(np.std(sq_errors) / np.sqrt(n_test))
        assert abs(float(np.mean(sq_errors)) - analytic) <= 3.0 * se

    def test_dimension_mismatch(self):
        data = small_instance()
        with pytest.raises(DomainError):
            analytic_test_mse(np.zeros(3), data, 1.0)


class TestEmpiricalTestMse:
    def test_tracks_analytic_value(self):
        data = small_instance(n=40, p=80, sigma_sq=1.0, seed=2)
        fit = fit_ridge(data, 0.05)
        emp = empirical_test_mse(fit.beta_hat, data, n_test=50_000, seed=7)
        assert emp == pytest.approx(fit.test_mse_analytic, rel=0.05)

    def test_deterministic_in_seed(self):
        data = small_instance()
        fit = fit_ridge(data, 0.1)
        assert empirical_test_mse(fit.beta_hat, data, 100, seed=5) == empirical_test_mse(
            fit.beta_hat, data, 100, seed=5
        )


class TestSweepRho:
    def test_single_rho_matches_fit_ridge(self):
        data = small_instance(seed=17)
        sweep = sweep_rho(data, [0.3])[0]
        fit = fit_ridge(data, 0.3)
        assert np.linalg.norm(sweep.beta_hat - fit.beta_hat) <= 1e-8 * np.linalg.norm(
            fit.beta_hat
        )

    def test_norm_monotone_decreasing_in_rho(self):
        data = small_instance(n=6, p=12, seed=23)
        fits = sweep_rho(data, list(np.geomspace(1e-6, 10.0, 12)))
        norms = [fit.sq_norm for fit in fits]
        assert all(a >= b for a, b in zip(norms, norms[1:]))

    def test_train_mse_nondecreasing_in_rho(self):
        data = small_instance(n=6, p=12, seed=29)
        fits = sweep_rho(data, list(np.geomspace(1e-6, 10.0, 12)))
        train = [fit.train_mse for fit in fits]
        assert all(b >= a for a, b in zip(train, train[1:]))

    def test_grid_matches_independent_fits(self):
        data = small_instance(n=7, p=11, seed=31)
        rhos = list(np.geomspace(1e-4, 100.0, 16))
        sweep = sweep_rho(data, rhos)
        for rho, via_sweep in zip(rhos, sweep):
            direct = fit_ridge(data, rho)
            scale = np.linalg.norm(direct.beta_hat)
            assert np.linalg.norm(via_sweep.beta_hat - direct.beta_hat) <= 1e-8 * scale

    def test_validation(self):
        data = small_instance()
        with pytest.raises(DomainError):
            sweep_rho(data, [])
        with pytest.raises(DomainError):
            sweep_rho(data, [0.1, 0.0])


class TestNormLowerBound:
    def test_expectation_identity_under_zero_signal(self):
        # with beta_star = 0 the norm lower bound holds with equality in
        # expectation: E||beta||^2 = sigma^2/n * tr((Cov + rho I)^-2 Cov);
        # compare the paired Monte-Carlo means within three standard errors
        n, p, trials = 40, 80, 200
        sigma_sq = 1.0
        rho = float(n) ** -1.75
        diffs = []
        for seed in range(trials):
            data = generate(
                DataModel(
                    n=n, p=p, alpha=1.75, sigma_sq=sigma_sq,
                    beta_star_scale=0.0, seed=seed,
                )
            )
            fit = fit_ridge(data, rho)
            s = np.linalg.svd(data.X, compute_uv=False)
            cov_eigs = s**2 / n
            trace_term = float(np.sum(cov_eigs / (cov_eigs + rho) ** 2))
            diffs.append(fit.sq_norm - sigma_sq / n * trace_term)
        diffs = np.array(diffs)
        se = float(np.std(diffs, ddof=1) / np.sqrt(trials))
        assert abs(float(np.mean(diffs))) <= 3.0 * se
