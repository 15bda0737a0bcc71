"""Experiment orchestration: sweeps, diagnostics, aggregation, export.

Two sweep kinds mirror the two synthetic experiments:

* ``tau_grid`` sweeps the target train error at fixed n, validating the
  asymptotic trade-off curve against Monte-Carlo ridge fits;
* ``n_grid`` sweeps the sample count at fixed target train error,
  exposing the power-law growth of the squared coefficient norm, whose
  exponent is estimated by least squares in log-log space.

Trials are seeded as base_seed + point_index * 10^6 + trial_index, so a
row's data never depends on how many trials run beside it, and output is
byte-identical across re-runs and worker counts (rows are collected and
sorted before aggregation).  A failed trial aborts the sweep; silent NaN
rows would poison the quantile ribbons.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, NamedTuple

import numpy as np

from .eigenlearning import (
    AsymptoticRegime,
    asymptotic_errors,
    check_train_error_monotone,
    k_of_r,
    select_regularizer,
)
from .errors import ConfigError, SweepError
from .regression import DataModel, empirical_test_mse, fit_ridge, generate
from .rmt import (
    LimitCdf,
    SpectralMeasure,
    esd_cdf,
    limit_cdf,
    positivity_check,
    self_consistent_residual,
)

_POINT_SEED_STRIDE = 10**6
_METRICS = ("train_mse", "test_mse", "sq_norm")
CSV_HEADER = "sweep_value,trial,seed,k,r,rho_n,train_mse,test_mse,sq_norm"
AGG_HEADER = "sweep_value,metric,mean,q20,q50,q80,theory"


class TrialRow(NamedTuple):
    sweep_value: float
    trial: int
    seed: int
    k: float
    r: float
    rho_n: float
    train_mse: float
    test_mse: float
    sq_norm: float


class AggregateRow(NamedTuple):
    sweep_value: float
    metric: str
    mean: float
    q20: float
    q50: float
    q80: float
    theory: float  # nan when the metric has no closed-form prediction


@dataclass(frozen=True)
class SweepConfig:
    """Declarative description of one sweep."""

    regime: AsymptoticRegime
    sweep_kind: Literal["tau_grid", "n_grid"]
    grid: tuple[float, ...]
    trials_per_point: int = 10
    base_seed: int = 0
    n_fixed: int | None = None  # sample count for tau_grid sweeps
    tau_fixed: float | None = None  # target train error for n_grid sweeps
    output_path: str | None = None
    workers: int = 1
    n_test: int | None = None  # held-out empirical test MSE instead of analytic

    def __post_init__(self) -> None:
        if self.sweep_kind not in ("tau_grid", "n_grid"):
            raise ConfigError(f"unknown sweep kind {self.sweep_kind!r}")
        if not self.grid:
            raise ConfigError("sweep grid must be non-empty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ConfigError("sweep grid must be strictly increasing")
        if self.trials_per_point < 1:
            raise ConfigError("trials_per_point must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not self.regime.gamma_star > 0.0:
            raise ConfigError("sweeps need gamma_star > 0 to size the feature space")
        if self.n_test is not None and self.n_test < 1:
            raise ConfigError("n_test must be >= 1")
        sig = self.regime.sigma_sq
        if self.sweep_kind == "tau_grid":
            if self.n_fixed is None or self.n_fixed < 1:
                raise ConfigError("tau_grid sweeps need n_fixed >= 1")
            if any(not 0.0 < tau < sig for tau in self.grid):
                raise ConfigError(
                    f"tau grid values must lie in (0, sigma_sq) = (0, {sig})"
                )
        else:
            if self.tau_fixed is None or not 0.0 < self.tau_fixed < sig:
                raise ConfigError(
                    f"n_grid sweeps need tau_fixed in (0, sigma_sq) = (0, {sig})"
                )
            if any(v < 1 or v != int(v) for v in self.grid):
                raise ConfigError("n grid values must be positive integers")


@dataclass(frozen=True)
class SweepResult:
    rows: list[TrialRow]
    aggregates: list[AggregateRow]


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares slope of log(y) against log(x)."""

    slope: float
    intercept: float
    r_squared: float


@dataclass(frozen=True)
class DiagnosticsReport:
    positivity: list[tuple[float, float]]
    positivity_pass: bool
    cdf_sup_deviation: float
    cdf_bound: float
    cdf_pass: bool
    residual_coarse_n: int
    residual_coarse: float
    residual_fine_n: int
    residual_fine: float
    residual_pass: bool


def feature_count(regime: AsymptoticRegime, n: int) -> int:
    """Feature dimension p for a sample count n at the regime's aspect ratio."""
    return int(round(n / regime.gamma_star))


def fit_log_log(x: np.ndarray, y: np.ndarray) -> ExponentFit:
    """Ordinary least squares of log y on log x, with the fit's R^2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        raise ConfigError(f"exponent fits need >= 3 points, got {x.size}")
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise ConfigError("log-log fits need strictly positive data")
    lx, ly = np.log(x), np.log(y)
    design = np.column_stack([np.ones_like(lx), lx])
    coef, *_ = np.linalg.lstsq(design, ly, rcond=None)
    residuals = ly - design @ coef
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return ExponentFit(slope=float(coef[1]), intercept=float(coef[0]), r_squared=r_squared)


def trial_seed(base_seed: int, point_index: int, trial_index: int) -> int:
    return base_seed + point_index * _POINT_SEED_STRIDE + trial_index


def _run_trial(
    config: SweepConfig,
    sweep_value: float,
    n: int,
    k: float,
    r: float,
    rho_n: float,
    trial: int,
    seed: int,
) -> TrialRow:
    regime = config.regime
    model = DataModel(
        n=n,
        p=feature_count(regime, n),
        alpha=regime.alpha,
        sigma_sq=regime.sigma_sq,
        seed=seed,
    )
    data = generate(model)
    fit = fit_ridge(data, rho_n)
    if config.n_test is None:
        test_mse = fit.test_mse_analytic
    else:
        test_mse = empirical_test_mse(fit.beta_hat, data, config.n_test, seed)
    return TrialRow(
        sweep_value=sweep_value,
        trial=trial,
        seed=seed,
        k=k,
        r=r,
        rho_n=rho_n,
        train_mse=fit.train_mse,
        test_mse=test_mse,
        sq_norm=fit.sq_norm,
    )


def _run_point(
    config: SweepConfig,
    point_index: int,
    sweep_value: float,
    n: int,
    k: float,
    r: float,
    rho_n: float,
) -> list[TrialRow]:
    trials = range(config.trials_per_point)

    def one(trial: int) -> TrialRow:
        seed = trial_seed(config.base_seed, point_index, trial)
        try:
            return _run_trial(config, sweep_value, n, k, r, rho_n, trial, seed)
        except Exception as exc:  # noqa: BLE001 - re-raised with trial context
            raise SweepError(sweep_value, trial, str(exc)) from exc

    if config.workers == 1:
        rows = [one(t) for t in trials]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(one, trials))
    return sorted(rows, key=lambda row: row.trial)


def _aggregate(
    rows: list[TrialRow], theory: dict[float, tuple[float, float]]
) -> list[AggregateRow]:
    aggregates: list[AggregateRow] = []
    for sweep_value in sorted({row.sweep_value for row in rows}):
        point_rows = [row for row in rows if row.sweep_value == sweep_value]
        theory_train, theory_test = theory[sweep_value]
        for metric in _METRICS:
            values = np.array([getattr(row, metric) for row in point_rows])
            q20, q50, q80 = np.quantile(values, [0.2, 0.5, 0.8])
            theory_value = {
                "train_mse": theory_train,
                "test_mse": theory_test,
                "sq_norm": math.nan,
            }[metric]
            aggregates.append(
                AggregateRow(
                    sweep_value=sweep_value,
                    metric=metric,
                    mean=float(np.mean(values)),
                    q20=float(q20),
                    q50=float(q50),
                    q80=float(q80),
                    theory=theory_value,
                )
            )
    return aggregates


def run_tradeoff_sweep(config: SweepConfig) -> SweepResult:
    """Sweep target train errors, fitting ridge trials at each one."""
    if config.sweep_kind != "tau_grid":
        raise ConfigError("run_tradeoff_sweep needs a tau_grid config")
    regime = config.regime
    check_train_error_monotone(regime)

    rows: list[TrialRow] = []
    theory: dict[float, tuple[float, float]] = {}
    for point_index, tau in enumerate(config.grid):
        k, r, rho_n = select_regularizer(regime, tau, config.n_fixed)
        point = asymptotic_errors(regime, k)
        theory[tau] = (point.e_train, point.e_test)
        rows.extend(
            _run_point(config, point_index, tau, config.n_fixed, k, r, rho_n)
        )
    return SweepResult(rows=rows, aggregates=_aggregate(rows, theory))


def run_norm_growth_sweep(config: SweepConfig) -> tuple[SweepResult, ExponentFit]:
    """Sweep n at fixed target train error; fit the norm-growth exponent.

    The regularizer factor r is n-free, so it is solved once and only
    rho_n = r * n^(-alpha) varies along the grid.
    """
    if config.sweep_kind != "n_grid":
        raise ConfigError("run_norm_growth_sweep needs an n_grid config")
    regime = config.regime
    check_train_error_monotone(regime)

    k, r, _ = select_regularizer(regime, config.tau_fixed, n=1)
    point = asymptotic_errors(regime, k)

    rows: list[TrialRow] = []
    theory: dict[float, tuple[float, float]] = {}
    for point_index, value in enumerate(config.grid):
        n = int(value)
        rho_n = r * float(n) ** -regime.alpha
        theory[float(n)] = (point.e_train, point.e_test)
        rows.extend(_run_point(config, point_index, float(n), n, k, r, rho_n))

    result = SweepResult(rows=rows, aggregates=_aggregate(rows, theory))
    ns = np.array(sorted({row.sweep_value for row in rows}))
    mean_norms = np.array(
        [
            np.mean([row.sq_norm for row in rows if row.sweep_value == n])
            for n in ns
        ]
    )
    return result, fit_log_log(ns, mean_norms)


def run_diagnostics(
    regime: AsymptoticRegime,
    n: int,
    seed: int,
    r_grid: tuple[float, ...] = (0.1, 1.0, 10.0),
    trials: int = 10,
    cdf_grid_size: int = 10_000,
) -> DiagnosticsReport:
    """Three numeric checks of the random-matrix assumptions at finite n."""
    if n < 32:
        raise ConfigError(f"diagnostics need n >= 32, got {n}")
    alpha, gamma = regime.alpha, regime.gamma_star
    if not gamma > 0.0:
        raise ConfigError("diagnostics need gamma_star > 0")
    p = feature_count(regime, n)

    positivity = positivity_check(alpha, gamma, n, list(r_grid), trials, seed)
    positivity_pass = all(mean > 0.0 for _, mean in positivity)

    # staircase vs. limit CDF of the n^alpha-scaled covariance spectrum; the
    # first step of the staircase sits in [g^alpha, g^alpha + 1/n], which the
    # sup-norm bound excludes
    atoms = (n / np.arange(1, p + 1, dtype=float)) ** alpha
    measure = SpectralMeasure(np.sort(atoms))
    limit = LimitCdf(alpha, gamma)
    t_grid = np.geomspace(gamma**alpha + 1.0 / n, float(n) ** alpha, cdf_grid_size)
    deviation = max(
        abs(esd_cdf(measure, float(t)) - limit_cdf(limit, float(t))) for t in t_grid
    )
    cdf_bound = 2.0 / p + gamma / n
    cdf_pass = deviation <= cdf_bound

    # Riemann-sum defect of the self-consistent equation at r = 1
    k = k_of_r(regime, 1.0)
    coarse_n = max(n // 4, 8)
    residuals = {}
    for m in (coarse_n, n):
        lam = np.arange(1, feature_count(regime, m) + 1, dtype=float) ** -alpha
        residuals[m] = self_consistent_residual(lam, m, 1.0, k, alpha)
    residual_pass = residuals[n] < residuals[coarse_n]

    return DiagnosticsReport(
        positivity=positivity,
        positivity_pass=positivity_pass,
        cdf_sup_deviation=deviation,
        cdf_bound=cdf_bound,
        cdf_pass=cdf_pass,
        residual_coarse_n=coarse_n,
        residual_coarse=residuals[coarse_n],
        residual_fine_n=n,
        residual_fine=residuals[n],
        residual_pass=residual_pass,
    )


def format_diagnostics(report: DiagnosticsReport) -> str:
    lines = ["positivity of d/dr[r S(-r)] over random-design draws:"]
    for r, mean in report.positivity:
        lines.append(f"  r={r:<8g} mean={mean:.6e}")
    lines.append(f"  verdict: {'pass' if report.positivity_pass else 'FAIL'}")
    lines.append(
        f"spectral CDF sup-deviation: {report.cdf_sup_deviation:.6e} "
        f"(bound {report.cdf_bound:.6e}) "
        f"verdict: {'pass' if report.cdf_pass else 'FAIL'}"
    )
    lines.append(
        "self-consistent residual: "
        f"n={report.residual_coarse_n}: {report.residual_coarse:.6e}  "
        f"n={report.residual_fine_n}: {report.residual_fine:.6e}  "
        f"verdict: {'pass' if report.residual_pass else 'FAIL'}"
    )
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------
def _fmt(value: float) -> str:
    return f"{value:.17g}"


def result_payload(result: SweepResult) -> dict:
    """JSON-ready mirror of the CSV schema (nan theory becomes null)."""
    return {
        "rows": [
            {
                "sweep_value": row.sweep_value,
                "trial": row.trial,
                "seed": row.seed,
                "k": row.k,
                "r": row.r,
                "rho_n": row.rho_n,
                "train_mse": row.train_mse,
                "test_mse": row.test_mse,
                "sq_norm": row.sq_norm,
            }
            for row in result.rows
        ],
        "aggregates": [
            {
                "sweep_value": agg.sweep_value,
                "metric": agg.metric,
                "mean": agg.mean,
                "q20": agg.q20,
                "q50": agg.q50,
                "q80": agg.q80,
                "theory": None if math.isnan(agg.theory) else agg.theory,
            }
            for agg in result.aggregates
        ],
    }


def aggregate_path(path: str | Path) -> Path:
    path = Path(path)
    if path.suffix:
        return path.with_suffix(f".agg{path.suffix}")
    return path.with_name(path.name + ".agg")


def export(result: SweepResult, fmt: Literal["csv", "json"], path: str | Path) -> None:
    """Write a sweep result (and, for CSV, its aggregate sibling file)."""
    path = Path(path)
    try:
        if fmt == "csv":
            _write_csv(result, path)
        elif fmt == "json":
            payload = json.dumps(result_payload(result), indent=2, allow_nan=False)
            path.write_text(payload + "\n", encoding="utf-8")
        else:
            raise ConfigError(f"unknown export format {fmt!r}")
    except OSError as exc:
        raise type(exc)(f"export to {path} failed: {exc}") from exc


def _write_csv(result: SweepResult, path: Path) -> None:
    lines = [CSV_HEADER]
    for row in result.rows:
        lines.append(
            ",".join(
                [
                    _fmt(row.sweep_value),
                    str(row.trial),
                    str(row.seed),
                    _fmt(row.k),
                    _fmt(row.r),
                    _fmt(row.rho_n),
                    _fmt(row.train_mse),
                    _fmt(row.test_mse),
                    _fmt(row.sq_norm),
                ]
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    agg_lines = [AGG_HEADER]
    for agg in result.aggregates:
        agg_lines.append(
            ",".join(
                [
                    _fmt(agg.sweep_value),
                    agg.metric,
                    _fmt(agg.mean),
                    _fmt(agg.q20),
                    _fmt(agg.q50),
                    _fmt(agg.q80),
                    "" if math.isnan(agg.theory) else _fmt(agg.theory),
                ]
            )
        )
    aggregate_path(path).write_text("\n".join(agg_lines) + "\n", encoding="utf-8")
