"""Exact Gaussian-process regression with a squared-exponential kernel.

Targets are standardized internally; predictions come back in the
original units. Hyperparameters (shared lengthscale, signal variance,
noise variance) are fitted by multi-start L-BFGS-B on the negative log
marginal likelihood.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg, optimize
from scipy.stats import norm

_LOG_2PI = float(np.log(2.0 * np.pi))

JITTERS = (0.0, 1e-6, 1e-4, 1e-2)


class SingularKernel(RuntimeError):
    """Kernel matrix stayed non-positive-definite at every jitter level."""


@dataclass(frozen=True)
class GpParams:
    lengthscale: float
    signal_var: float
    noise_var: float


@dataclass
class GpModel:
    x: np.ndarray
    y: np.ndarray               # training targets, original units
    params: GpParams
    y_mean: float
    y_std: float
    chol: np.ndarray            # lower Cholesky factor of K + noise I
    alpha: np.ndarray           # (K + noise I)^-1 y_standardized
    jitter: float
    nll: float


def kernel(xa: np.ndarray, xb: np.ndarray, params: GpParams) -> np.ndarray:
    sq = ((xa ** 2).sum(axis=1)[:, None] + (xb ** 2).sum(axis=1)[None, :]
          - 2.0 * xa @ xb.T)
    np.maximum(sq, 0.0, out=sq)
    return params.signal_var * np.exp(-0.5 * sq / params.lengthscale ** 2)


def _factor(k_noisy: np.ndarray) -> tuple[np.ndarray, float]:
    n = k_noisy.shape[0]
    for jitter in JITTERS:
        try:
            chol = linalg.cholesky(k_noisy + jitter * np.eye(n), lower=True)
            return chol, jitter
        except linalg.LinAlgError:
            continue
    raise SingularKernel(
        f"kernel matrix of size {n} is not positive definite "
        f"even with jitter {JITTERS[-1]}")


def gp_build(x: np.ndarray, y: np.ndarray, params: GpParams) -> GpModel:
    """Condition a GP with fixed hyperparameters on (x, y)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.shape[0]
    y_mean = float(y.mean())
    y_std = float(y.std())
    if y_std == 0.0:
        y_std = 1.0
    y_s = (y - y_mean) / y_std
    k_noisy = kernel(x, x, params) + params.noise_var * np.eye(n)
    chol, jitter = _factor(k_noisy)
    alpha = linalg.cho_solve((chol, True), y_s)
    nll = (0.5 * float(y_s @ alpha)
           + float(np.log(np.diag(chol)).sum())
           + 0.5 * n * _LOG_2PI)
    return GpModel(x=x, y=y, params=params, y_mean=y_mean, y_std=y_std,
                   chol=chol, alpha=alpha, jitter=jitter, nll=nll)


def gp_fit(x: np.ndarray, y: np.ndarray, rng: np.random.Generator,
           n_restarts: int = 4) -> GpModel:
    """Fit hyperparameters by maximum marginal likelihood and condition."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)

    # optimize in log space; bounds keep the kernel numerically sane
    bounds = [(np.log(1e-2), np.log(1e2)),      # lengthscale
              (np.log(1e-2), np.log(1e2)),      # signal variance
              (np.log(1e-6), np.log(1e1))]      # noise variance

    def nll_of(log_theta: np.ndarray) -> float:
        params = GpParams(*np.exp(log_theta))
        try:
            return gp_build(x, y, params).nll
        except SingularKernel:
            return 1e12

    scale = float(np.median(np.linalg.norm(x - x.mean(axis=0), axis=1)))
    if scale == 0.0:
        scale = 1.0
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    starts = [np.clip(np.log([scale, 1.0, 1e-2]), lo, hi)]
    for _ in range(n_restarts - 1):
        starts.append(np.array([
            rng.uniform(*bounds[0]),
            rng.uniform(*bounds[1]),
            rng.uniform(*bounds[2]),
        ]))

    best = None
    for start in starts:
        res = optimize.minimize(nll_of, start, method="L-BFGS-B",
                                bounds=bounds)
        if best is None or res.fun < best.fun:
            best = res
    return gp_build(x, y, GpParams(*np.exp(best.x)))


def gp_predict(model: GpModel, x_new: np.ndarray
               ) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and variance of the latent function, original units."""
    x_new = np.asarray(x_new, dtype=np.float64)
    k_star = kernel(model.x, x_new, model.params)
    mean_s = k_star.T @ model.alpha
    v = linalg.solve_triangular(model.chol, k_star, lower=True)
    var_s = model.params.signal_var - (v ** 2).sum(axis=0)
    np.maximum(var_s, 0.0, out=var_s)
    mean = model.y_mean + model.y_std * mean_s
    var = model.y_std ** 2 * var_s
    return mean, var


def expected_improvement(mean: np.ndarray, var: np.ndarray,
                         best: float) -> np.ndarray:
    """EI for maximization; deterministic points fall back to plain gain."""
    mean = np.asarray(mean, dtype=np.float64)
    std = np.sqrt(np.asarray(var, dtype=np.float64))
    improvement = mean - best
    out = np.maximum(improvement, 0.0)
    positive = std > 0.0
    if np.any(positive):
        z = improvement[positive] / std[positive]
        out = out.copy()
        out[positive] = (improvement[positive] * norm.cdf(z)
                         + std[positive] * norm.pdf(z))
    return out
