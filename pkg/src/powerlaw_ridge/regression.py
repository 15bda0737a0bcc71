"""Random-design data generation and closed-form ridge regression.

The data model is the high-dimensional random design X = Sigma^(1/2) Z with
diagonal power-law covariance (lambda_i = i^-alpha), labels
y = X^T beta_star + eps, and Gaussian noise of variance sigma_sq.  Since
Sigma is diagonal, Sigma^(1/2) Z is a row scaling of an i.i.d. Gaussian
matrix; no matrix square root is ever formed.

Ridge fits use whichever closed form is cheaper: the primal normal
equations when p <= n, the Woodbury dual form
beta = X (X^T X + n rho I)^-1 y when p > n.  Both are solved with a
symmetric positive-definite factorization; sweep_rho amortizes one SVD
across a whole penalty path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DomainError

# Definition of the estimator requires rho > 0; values this small only guard
# against accidental underflow to zero.
_RHO_FLOOR = 1e-300


@dataclass(frozen=True)
class DataModel:
    """Specification of one synthetic regression instance."""

    n: int
    p: int
    alpha: float
    sigma_sq: float
    beta_star_scale: float | None = None  # per-coordinate variance; None -> 10/p
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1 or self.p < 1:
            raise DomainError(f"n and p must be >= 1, got n={self.n}, p={self.p}")
        if not self.alpha > 1.0:
            raise DomainError(f"alpha must exceed 1, got {self.alpha}")
        if self.sigma_sq < 0.0:
            raise DomainError(f"sigma_sq must be >= 0, got {self.sigma_sq}")
        if self.beta_star_scale is not None and self.beta_star_scale < 0.0:
            raise DomainError("beta_star_scale must be >= 0")

    @property
    def beta_variance(self) -> float:
        return self.beta_star_scale if self.beta_star_scale is not None else 10.0 / self.p


@dataclass(frozen=True, eq=False)
class Dataset:
    """One realized instance; columns of X are samples."""

    X: np.ndarray = field(repr=False)  # (p, n)
    y: np.ndarray = field(repr=False)  # (n,)
    beta_star: np.ndarray = field(repr=False)  # (p,)
    eigenvalues: np.ndarray = field(repr=False)  # (p,), lambda_i = i^-alpha
    sigma_sq: float = 0.0


@dataclass(frozen=True, eq=False)
class RidgeFit:
    """Fitted coefficients with their closed-form metrics."""

    beta_hat: np.ndarray = field(repr=False)
    rho: float = 0.0
    train_mse: float = 0.0
    test_mse_analytic: float = 0.0
    sq_norm: float = 0.0


def generate(model: DataModel) -> Dataset:
    """Draw one dataset, bit-reproducibly in the model seed.

    Separate generator streams are derived for the coefficients, the noise,
    and each sample column, so columns could be produced in any order (or in
    parallel) without changing the result.
    """
    n, p = model.n, model.p
    lam = np.arange(1, p + 1, dtype=float) ** -model.alpha
    sqrt_lam = np.sqrt(lam)

    beta_rng = np.random.default_rng([model.seed, 1])
    beta_star = beta_rng.standard_normal(p) * np.sqrt(model.beta_variance)

    noise_rng = np.random.default_rng([model.seed, 2])
    eps = noise_rng.standard_normal(n) * np.sqrt(model.sigma_sq)

    column_root = np.random.SeedSequence([model.seed, 3])
    X = np.empty((p, n))
    for j, child in enumerate(column_root.spawn(n)):
        X[:, j] = sqrt_lam * np.random.default_rng(child).standard_normal(p)

    y = X.T @ beta_star + eps
    return Dataset(X=X, y=y, beta_star=beta_star, eigenvalues=lam, sigma_sq=model.sigma_sq)


def analytic_test_mse(beta_hat: np.ndarray, data: Dataset, sigma_sq: float) -> float:
    """Exact test MSE under the Gaussian design:
    sigma_sq + sum_i lambda_i (beta_hat_i - beta_star_i)^2."""
    beta_hat = np.asarray(beta_hat, dtype=float)
    if beta_hat.shape != data.beta_star.shape:
        raise DomainError(
            f"coefficient length {beta_hat.shape} does not match the model "
            f"dimension {data.beta_star.shape}"
        )
    diff = beta_hat - data.beta_star
    return float(sigma_sq + np.sum(data.eigenvalues * diff**2))


def empirical_test_mse(
    beta_hat: np.ndarray, data: Dataset, n_test: int, seed: int
) -> float:
    """Held-out test MSE on n_test fresh samples from the same population.

    Stream tags 4 and 5 keep the held-out draw disjoint from the training
    streams used by :func:`generate`.
    """
    if n_test < 1:
        raise DomainError(f"n_test must be >= 1, got {n_test}")
    p = data.beta_star.size
    sqrt_lam = np.sqrt(data.eigenvalues)
    x_rng = np.random.default_rng([seed, 4])
    noise_rng = np.random.default_rng([seed, 5])
    X_test = sqrt_lam[:, None] * x_rng.standard_normal((p, n_test))
    y_test = X_test.T @ data.beta_star + noise_rng.standard_normal(n_test) * np.sqrt(
        data.sigma_sq
    )
    residual = X_test.T @ np.asarray(beta_hat, dtype=float) - y_test
    return float(np.mean(residual**2))


def fit_ridge(data: Dataset, rho: float) -> RidgeFit:
    """Closed-form ridge fit; dual (Woodbury) form when p > n, primal else."""
    if not rho > 0.0:
        raise DomainError(f"rho must be positive, got {rho}")
    rho = max(rho, _RHO_FLOOR)
    X, y = data.X, data.y
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise DomainError("data contains non-finite entries")
    p, n = X.shape

    if p > n:
        gram = X.T @ X
        gram[np.diag_indices_from(gram)] += n * rho
        beta_hat = X @ cho_solve(cho_factor(gram, lower=False), y)
    else:
        cov = X @ X.T / n
        cov[np.diag_indices_from(cov)] += rho
        beta_hat = cho_solve(cho_factor(cov, lower=False), X @ y / n)

    return _fit_from_beta(data, rho, beta_hat)


def sweep_rho(data: Dataset, rho_list: list[float]) -> list[RidgeFit]:
    """Fit a whole penalty path from a single SVD of X.

    For X = U diag(s) V^T both the primal and dual closed forms collapse to
    beta(rho) = U diag(s / (s^2 + n rho)) V^T y.
    """
    if not rho_list:
        raise DomainError("rho_list must be non-empty")
    if any(not rho > 0.0 for rho in rho_list):
        raise DomainError("all rho values must be positive")
    X, y = data.X, data.y
    n = X.shape[1]
    U, s, Vh = np.linalg.svd(X, full_matrices=False)
    c = Vh @ y
    fits = []
    for rho in rho_list:
        rho = max(rho, _RHO_FLOOR)
        beta_hat = U @ (s / (s**2 + n * rho) * c)
        fits.append(_fit_from_beta(data, rho, beta_hat))
    return fits


def _fit_from_beta(data: Dataset, rho: float, beta_hat: np.ndarray) -> RidgeFit:
    residual = data.X.T @ beta_hat - data.y
    return RidgeFit(
        beta_hat=beta_hat,
        rho=rho,
        train_mse=float(np.mean(residual**2)),
        test_mse_analytic=analytic_test_mse(beta_hat, data, data.sigma_sq),
        sq_norm=float(beta_hat @ beta_hat),
    )
