"""Asymptotic trade-off curve between training and testing error.

Everything here is driven by two integrals of the regularization profile
against the power-law spectral density,

    I(k) = integral_0^(1/g) dx / (1 + k x^alpha),
    J(k) = integral_0^(1/g) dx / (1 + k x^alpha)^2,

with g the asymptotic sample-to-feature ratio.  Both reduce to the Gauss
hypergeometric family implemented in :mod:`powerlaw_ridge.specfun`:

    I(k) = F(1, 1/alpha; 1 + 1/alpha; -k g^-alpha) / g,
    J(k) = F(2, 1/alpha; 1 + 1/alpha; -k g^-alpha) / g,

and for g = 0 the improper integrals have the closed forms
I(k) = k^(-1/alpha) * pi / (alpha sin(pi/alpha)) and J(k) = (1 - 1/alpha) I(k).

The curve is parametrized by the effective-regularizer factor k.  The
regularizer factor is r = R(k) = k (1 - I(k)), the asymptotic test error is
sigma^2 / (1 - J(k)), and the asymptotic train error is
sigma^2 (1 - I(k))^2 / (1 - J(k)).  R is increasing and positive exactly on
(k_crit, infinity), where k_crit is the largest root of R; inverting R
and the train-error map is what lets a caller dial in a target train error
and read off the finite-n ridge penalty rho_n = r * n^(-alpha).

The finite-n counterpart solves the effective-regularizer equation

    n = delta/kappa + sum_i lambda_i / (lambda_i + kappa),    delta = n*rho,

for kappa and propagates it through the overfitting coefficient
n * dkappa/ddelta to finite-n train/test error predictions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConvergenceError, DomainError
from .specfun import HypergeometricArgs, hyp2f1

_RESIDUAL_TOL = 1e-13
_MAX_BISECTIONS = 200


@dataclass(frozen=True)
class AsymptoticRegime:
    """Problem regime: spectral exponent, aspect ratio, noise level."""

    alpha: float
    gamma_star: float
    sigma_sq: float = 1.0

    def __post_init__(self) -> None:
        if not self.alpha > 1.0:
            raise DomainError(f"alpha must exceed 1, got {self.alpha}")
        if self.gamma_star < 0.0:
            raise DomainError(f"gamma_star must be >= 0, got {self.gamma_star}")
        if not self.sigma_sq > 0.0:
            raise DomainError(f"sigma_sq must be positive, got {self.sigma_sq}")

    @cached_property
    def k_crit(self) -> float:
        return _solve_k_crit(self)


@dataclass(frozen=True)
class EigenlearningPoint:
    """One solved point on the asymptotic trade-off curve."""

    k: float
    r: float
    e_train: float
    e_test: float
    i_of_k: float
    j_of_k: float


@dataclass(frozen=True)
class FiniteNPrediction:
    """Finite-n effective-regularizer solution and error predictions."""

    kappa: float
    delta: float
    e_coef: float
    e_test_n: float
    e_train_n: float
    signal_term_c: float


def _limit_constant(alpha: float) -> float:
    # integral_0^inf dy / (1 + y^alpha) = (pi/alpha) / sin(pi/alpha)
    return (math.pi / alpha) / math.sin(math.pi / alpha)


def integral_i(regime: AsymptoticRegime, k: float) -> float:
    """I(k), the resolvent-trace integral of first order."""
    if k < 0.0:
        raise DomainError(f"k must be >= 0, got {k}")
    g = regime.gamma_star
    if g == 0.0:
        if k == 0.0:
            return math.inf
        return k ** (-1.0 / regime.alpha) * _limit_constant(regime.alpha)
    b = 1.0 / regime.alpha
    z = -k * g**-regime.alpha
    return hyp2f1(HypergeometricArgs(1.0, b, 1.0 + b, z)) / g


def integral_j(regime: AsymptoticRegime, k: float) -> float:
    """J(k), the squared-resolvent integral."""
    if k < 0.0:
        raise DomainError(f"k must be >= 0, got {k}")
    g = regime.gamma_star
    if g == 0.0:
        if k == 0.0:
            return math.inf
        alpha = regime.alpha
        return (1.0 - 1.0 / alpha) * k ** (-1.0 / alpha) * _limit_constant(alpha)
    b = 1.0 / regime.alpha
    z = -k * g**-regime.alpha
    return hyp2f1(HypergeometricArgs(2.0, b, 1.0 + b, z)) / g


def r_of_k(regime: AsymptoticRegime, k: float) -> float:
    """The regularizer factor R(k) = k (1 - I(k)); negative below k_crit."""
    if k < 0.0:
        raise DomainError(f"k must be >= 0, got {k}")
    if k == 0.0:
        return 0.0
    return k * (1.0 - integral_i(regime, k))


def _di_dk(regime: AsymptoticRegime, k: float) -> float:
    # dI/dk = (J(k) - I(k)) / k, by differentiating under the integral
    return (integral_j(regime, k) - integral_i(regime, k)) / k


def k_crit(regime: AsymptoticRegime) -> float:
    """Largest k with R(k) = 0; the trade-off curve lives on (k_crit, inf)."""
    return regime.k_crit


def _solve_k_crit(regime: AsymptoticRegime) -> float:
    g = regime.gamma_star
    if g >= 1.0:
        # I(0) = 1/g <= 1 and I is strictly decreasing, so I < 1 for k > 0
        return 0.0
    if g == 0.0:
        # I(k) = 1 exactly at k = c_alpha^alpha
        return _limit_constant(regime.alpha) ** regime.alpha
    lo, hi = _bracket_decreasing(lambda k: integral_i(regime, k) - 1.0, 1.0)
    return _bisect_newton(
        lambda k: integral_i(regime, k) - 1.0,
        lambda k: _di_dk(regime, k),
        lo,
        hi,
        f_tol=1e-14,
    )


def k_of_r(regime: AsymptoticRegime, r: float) -> float:
    """Invert R on (k_crit, inf): the unique k with R(k) = r, r > 0."""
    if not r > 0.0:
        raise DomainError(f"r must be positive, got {r}")
    kc = regime.k_crit
    lo = kc + 1e-12 * max(kc, 1.0)
    for _ in range(64):  # r below R(lo) needs a tighter left edge
        if r_of_k(regime, lo) < r:
            break
        lo = kc + (lo - kc) / 1024.0
    hi = max(10.0 * r, 2.0 * lo, 1.0)
    for _ in range(200):
        if r_of_k(regime, hi) >= r:
            break
        hi *= 4.0
    else:
        raise ConvergenceError(f"could not bracket R(k) = {r}")
    k = _bisect_newton(
        lambda k: r_of_k(regime, k) - r,
        lambda k: 1.0 - integral_j(regime, k),  # dR/dk = 1 - J(k)
        lo,
        hi,
        f_tol=_RESIDUAL_TOL * max(1.0, r),
    )
    return k


def asymptotic_errors(regime: AsymptoticRegime, k: float) -> EigenlearningPoint:
    """Full trade-off point at eff-reg-factor k; requires k > k_crit."""
    kc = regime.k_crit
    if not k > kc:
        raise DomainError(f"k must exceed k_crit = {kc:.6g}, got {k}")
    i = integral_i(regime, k)
    j = integral_j(regime, k)
    if not j < 1.0:
        raise DomainError(f"J(k) = {j} >= 1; k is below the valid branch")
    denom = 1.0 - j
    sig = regime.sigma_sq
    return EigenlearningPoint(
        k=k,
        r=k * (1.0 - i),
        e_train=sig * (1.0 - i) ** 2 / denom,
        e_test=sig / denom,
        i_of_k=i,
        j_of_k=j,
    )


def train_error_of_k(regime: AsymptoticRegime, k: float) -> float:
    """Asymptotic train error at k, for k > k_crit."""
    return asymptotic_errors(regime, k).e_train


def select_regularizer(
    regime: AsymptoticRegime, tau: float, n: int
) -> tuple[float, float, float]:
    """Pick the ridge penalty hitting asymptotic train error tau.

    Solves E_train(k) = tau on (k_crit, inf), sets r = R(k) and
    rho_n = r * n^(-alpha).  Returns (k, r, rho_n).
    """
    sig = regime.sigma_sq
    if not 0.0 < tau < sig:
        raise DomainError(f"tau must lie in (0, sigma_sq) = (0, {sig}), got {tau}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")

    kc = regime.k_crit
    lo = kc + 1e-12 * max(kc, 1.0) if kc > 0.0 else 1e-12
    hi = max(2.0 * lo, 1.0)
    for _ in range(200):
        if train_error_of_k(regime, hi) >= tau:
            break
        hi *= 4.0
    else:
        raise ConvergenceError(f"could not bracket E_train(k) = {tau}")
    if train_error_of_k(regime, lo) > tau:
        raise DomainError(
            f"tau = {tau} is below the smallest train error reachable in this "
            f"regime (E_train({lo:.3g}) = {train_error_of_k(regime, lo):.6g})"
        )

    f_lo = train_error_of_k(regime, lo) - tau
    k = lo
    f_mid = f_lo
    for _ in range(_MAX_BISECTIONS):
        k = 0.5 * (lo + hi)
        f_mid = train_error_of_k(regime, k) - tau
        if abs(f_mid) < 1e-11 * sig:
            break
        if hi - lo <= 4.0 * np.finfo(float).eps * hi:
            break
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = k, f_mid
        else:
            hi = k
    if abs(f_mid) > 1e-10 * sig:
        raise ConvergenceError(
            f"train-error solve stalled at tau = {tau} (residual {f_mid:.3e})"
        )

    r = r_of_k(regime, k)
    rho_n = r * float(n) ** -regime.alpha
    return k, r, rho_n


def check_train_error_monotone(
    regime: AsymptoticRegime, num: int = 64, k_span: float = 1e6
) -> None:
    """Grid sign-check that E_train is increasing in k on (k_crit, k_crit + span).

    The regularizer-selection bisection assumes this; a violation aborts the
    sweep with a diagnostic rather than silently returning a wrong root.
    """
    kc = regime.k_crit
    ks = np.geomspace(max(kc, 1e-9) * (1.0 + 1e-6) + 1e-9, kc + k_span, num)
    values = [train_error_of_k(regime, float(k)) for k in ks]
    diffs = np.diff(values)
    if np.any(diffs < -1e-12 * regime.sigma_sq):
        worst = int(np.argmin(diffs))
        raise ConvergenceError(
            "train error is not monotone in k: "
            f"E_train({ks[worst]:.6g}) = {values[worst]:.6g} > "
            f"E_train({ks[worst + 1]:.6g}) = {values[worst + 1]:.6g}"
        )


def finite_n_prediction(
    eigenvalues: np.ndarray,
    rho: float,
    sigma_sq: float,
    beta_star: np.ndarray,
    n: int,
) -> FiniteNPrediction:
    """Finite-n effective-regularizer prediction for a fixed spectrum.

    Solves n = delta/kappa + sum_i lambda_i/(lambda_i + kappa) with
    delta = n*rho, then
        e_coef  = n * dkappa/ddelta  (implicit differentiation),
        C       = sum_i (1 - lambda_i/(lambda_i + kappa)) * beta_i^2,
        E_test  = e_coef * (sigma_sq + C),
        E_train = (delta^2 / (n^2 kappa^2)) * E_test.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    beta = np.asarray(beta_star, dtype=float)
    if lam.size == 0:
        raise DomainError("eigenvalues must be non-empty")
    if lam.shape != beta.shape:
        raise DomainError(
            f"eigenvalues and beta_star disagree: {lam.shape} vs {beta.shape}"
        )
    if np.any(lam < 0.0):
        raise DomainError("eigenvalues must be nonnegative")
    if not rho > 0.0:
        raise DomainError(f"rho must be positive, got {rho}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")

    delta = n * rho
    kappa = _solve_kappa(lam, delta, n)

    s2 = float(np.sum(lam / (lam + kappa) ** 2))
    dkappa_ddelta = kappa / (delta + kappa**2 * s2)
    e_coef = n * dkappa_ddelta

    learnability = lam / (lam + kappa)
    signal_term_c = float(np.sum((1.0 - learnability) * beta**2))
    e_test_n = e_coef * (sigma_sq + signal_term_c)
    e_train_n = (delta**2 / (n**2 * kappa**2)) * e_test_n
    return FiniteNPrediction(
        kappa=kappa,
        delta=delta,
        e_coef=e_coef,
        e_test_n=e_test_n,
        e_train_n=e_train_n,
        signal_term_c=signal_term_c,
    )


def _solve_kappa(lam: np.ndarray, delta: float, n: int) -> float:
    # the left side n - delta/kappa - sum lambda/(lambda+kappa) is increasing
    # in kappa, with the root pinned inside [delta/n, (delta + sum lambda)/n]
    lam_sum = float(np.sum(lam))
    lo = delta / n
    hi = (delta + lam_sum) / n
    if lam_sum == 0.0:
        return lo

    def g(kappa: float) -> float:
        return n - delta / kappa - float(np.sum(lam / (lam + kappa)))

    def g_prime(kappa: float) -> float:
        return delta / kappa**2 + float(np.sum(lam / (lam + kappa) ** 2))

    return _bisect_newton(g, g_prime, lo, hi, f_tol=1e-12 * n)


def _bracket_decreasing(f, start: float) -> tuple[float, float]:
    # bracket the root of a decreasing function that is positive at 0+
    lo = 0.0
    hi = start
    for _ in range(200):
        if f(hi) <= 0.0:
            return lo, hi
        lo = hi
        hi *= 4.0
    raise ConvergenceError("failed to bracket a sign change")


def _bisect_newton(f, f_prime, lo: float, hi: float, f_tol: float) -> float:
    """Safeguarded root finder: Newton steps clipped to a shrinking bracket.

    Assumes f(lo) <= 0 <= f(hi) or the reverse; keeps bisecting whenever the
    Newton step leaves the bracket.  Once the residual meets f_tol a few
    pure Newton steps polish the root in x, which matters where f' is small
    and a residual criterion alone would under-resolve the root.
    """
    f_lo = f(lo)
    f_hi = f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise ConvergenceError(
            f"root not bracketed on [{lo}, {hi}]: f = ({f_lo}, {f_hi})"
        )
    increasing = f_hi > 0.0

    x = 0.5 * (lo + hi)
    for _ in range(_MAX_BISECTIONS):
        fx = f(x)
        if abs(fx) <= f_tol:
            return _newton_polish(f, f_prime, x, lo, hi)
        if (fx > 0.0) == increasing:
            hi = x
        else:
            lo = x
        d = f_prime(x)
        if d != 0.0 and math.isfinite(d):
            step = x - fx / d
            x = step if lo < step < hi else 0.5 * (lo + hi)
        else:
            x = 0.5 * (lo + hi)
        if hi - lo <= 4.0 * np.finfo(float).eps * max(abs(lo), abs(hi)):
            return _newton_polish(f, f_prime, x, lo, hi)
    raise ConvergenceError("root finder exhausted its iteration budget")


def _newton_polish(f, f_prime, x: float, lo: float, hi: float) -> float:
    eps = float(np.finfo(float).eps)
    for _ in range(8):
        d = f_prime(x)
        if d == 0.0 or not math.isfinite(d):
            return x
        step = f(x) / d
        x_new = min(max(x - step, lo), hi)
        if abs(x_new - x) <= 4.0 * eps * max(abs(x), 1e-300):
            return x_new
        x = x_new
    return x
