"""GP regression against a direct linear-algebra oracle."""

import numpy as np
import pytest

from molvae.gp import (
    GpParams,
    SingularKernel,
    _factor,
    expected_improvement,
    gp_build,
    gp_fit,
    gp_predict,
    kernel,
)


def _oracle_predict(x, y, x_new, params):
    """Textbook GP equations via dense solves, no Cholesky reuse."""
    y = np.asarray(y, dtype=np.float64)
    y_mean, y_std = y.mean(), y.std() if y.std() > 0 else 1.0
    y_s = (y - y_mean) / y_std
    k_xx = kernel(x, x, params) + params.noise_var * np.eye(len(x))
    k_xs = kernel(x, x_new, params)
    k_ss = kernel(x_new, x_new, params)
    k_inv = np.linalg.inv(k_xx)
    mean_s = k_xs.T @ k_inv @ y_s
    cov_s = k_ss - k_xs.T @ k_inv @ k_xs
    return y_mean + y_std * mean_s, np.maximum(np.diag(cov_s), 0.0) * y_std ** 2


class TestGpPredict:
    def test_matches_linear_algebra_oracle(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(12, 3))
        y = np.sin(x[:, 0]) + 0.2 * x[:, 1]
        x_new = rng.normal(size=(7, 3))
        params = GpParams(lengthscale=0.9, signal_var=1.4, noise_var=1e-3)
        model = gp_build(x, y, params)
        mean, var = gp_predict(model, x_new)
        mean_o, var_o = _oracle_predict(x, y, x_new, params)
        assert np.max(np.abs(mean - mean_o)) <= 1e-8
        assert np.max(np.abs(var - var_o)) <= 1e-8

    def test_interpolates_with_small_noise(self):
        rng = np.random.default_rng(1)
        x = rng.uniform(-2, 2, size=(10, 1))
        y = np.cos(x[:, 0])
        model = gp_build(x, y, GpParams(1.0, 1.0, 1e-6))
        mean, var = gp_predict(model, x)
        assert np.allclose(mean, y, atol=1e-3)
        assert np.all(var < 1e-3)

    def test_reverts_to_prior_far_from_data(self):
        x = np.zeros((4, 2))
        x[:, 0] = [0.0, 0.1, 0.2, 0.3]
        y = np.array([3.0, 3.1, 2.9, 3.0])
        model = gp_build(x, y, GpParams(0.5, 2.0, 1e-4))
        far = np.full((1, 2), 100.0)
        mean, var = gp_predict(model, far)
        assert mean[0] == pytest.approx(np.mean(y), abs=1e-6)
        assert var[0] == pytest.approx(2.0 * np.var(y), rel=1e-3)

    def test_constant_targets_do_not_crash(self):
        x = np.arange(6, dtype=float).reshape(-1, 1)
        model = gp_build(x, np.full(6, 2.5), GpParams(1.0, 1.0, 1e-2))
        mean, _ = gp_predict(model, x)
        assert np.allclose(mean, 2.5, atol=1e-6)


class TestGpFit:
    def test_learns_smooth_function(self):
        rng = np.random.default_rng(2)
        x = rng.uniform(-3, 3, size=(40, 1))
        y = np.sin(x[:, 0]) + 0.01 * rng.normal(size=40)
        model = gp_fit(x, y, rng)
        x_test = np.linspace(-2.5, 2.5, 50)[:, None]
        mean, _ = gp_predict(model, x_test)
        rmse = float(np.sqrt(np.mean((mean - np.sin(x_test[:, 0])) ** 2)))
        assert rmse < 0.1

    def test_fit_is_deterministic_given_rng_seed(self):
        x = np.linspace(0, 1, 9)[:, None]
        y = x[:, 0] ** 2
        m1 = gp_fit(x, y, np.random.default_rng(3))
        m2 = gp_fit(x, y, np.random.default_rng(3))
        assert m1.params == m2.params


class TestFactor:
    def test_jitter_rescues_borderline_matrix(self):
        # PSD rank-deficient matrix: bare Cholesky fails, jitter fixes it
        a = np.ones((3, 3))
        chol, jitter = _factor(a)
        assert jitter > 0.0
        assert np.allclose(chol @ chol.T, a + jitter * np.eye(3), atol=1e-12)

    def test_truly_indefinite_matrix_raises(self):
        bad = np.array([[1.0, 2.0], [2.0, 1.0]])  # eigenvalue -1
        with pytest.raises(SingularKernel):
            _factor(bad)


class TestExpectedImprovement:
    def test_zero_variance_reduces_to_plain_gain(self):
        ei = expected_improvement(np.array([3.0, 1.0]), np.array([0.0, 0.0]),
                                  best=2.0)
        assert ei.tolist() == [1.0, 0.0]

    def test_at_the_incumbent_with_unit_noise(self):
        # mean == best, sigma = 1: EI = pdf(0) = 1/sqrt(2 pi)
        ei = expected_improvement(np.array([2.0]), np.array([1.0]), best=2.0)
        assert ei[0] == pytest.approx(1.0 / np.sqrt(2 * np.pi), rel=1e-12)

    def test_monotone_in_mean(self):
        means = np.linspace(-1, 3, 20)
        ei = expected_improvement(means, np.ones(20), best=1.0)
        assert np.all(np.diff(ei) > 0)

    def test_nonnegative(self):
        rng = np.random.default_rng(4)
        ei = expected_improvement(rng.normal(size=50),
                                  rng.uniform(0, 2, size=50), best=1.5)
        assert np.all(ei >= 0.0)
