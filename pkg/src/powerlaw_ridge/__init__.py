"""Exact interpolation/generalization trade-offs for ridge regression under
power-law covariance spectra, with a Monte-Carlo validation harness."""

from .eigenlearning import (
    AsymptoticRegime,
    EigenlearningPoint,
    FiniteNPrediction,
    asymptotic_errors,
    finite_n_prediction,
    integral_i,
    integral_j,
    k_crit,
    k_of_r,
    r_of_k,
    select_regularizer,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    PowerlawRidgeError,
    SweepError,
)
from .harness import (
    DiagnosticsReport,
    ExponentFit,
    SweepConfig,
    SweepResult,
    export,
    fit_log_log,
    run_diagnostics,
    run_norm_growth_sweep,
    run_tradeoff_sweep,
)
from .regression import (
    DataModel,
    Dataset,
    RidgeFit,
    analytic_test_mse,
    empirical_test_mse,
    fit_ridge,
    generate,
    sweep_rho,
)
from .rmt import (
    LimitCdf,
    SpectralMeasure,
    d_rS_dr,
    esd_cdf,
    gram_to_covariance_check,
    limit_cdf,
    positivity_check,
    self_consistent_residual,
    stieltjes,
)
from .specfun import HypergeometricArgs, QuadratureSpec, hyp2f1, hyp2f1_oracle

__all__ = [
    "AsymptoticRegime",
    "ConfigError",
    "ConvergenceError",
    "DataModel",
    "Dataset",
    "DiagnosticsReport",
    "DomainError",
    "EigenlearningPoint",
    "ExponentFit",
    "FiniteNPrediction",
    "HypergeometricArgs",
    "LimitCdf",
    "PowerlawRidgeError",
    "QuadratureSpec",
    "RidgeFit",
    "SpectralMeasure",
    "SweepConfig",
    "SweepError",
    "SweepResult",
    "analytic_test_mse",
    "asymptotic_errors",
    "d_rS_dr",
    "empirical_test_mse",
    "esd_cdf",
    "export",
    "finite_n_prediction",
    "fit_log_log",
    "fit_ridge",
    "generate",
    "gram_to_covariance_check",
    "hyp2f1",
    "hyp2f1_oracle",
    "integral_i",
    "integral_j",
    "k_crit",
    "k_of_r",
    "limit_cdf",
    "positivity_check",
    "r_of_k",
    "run_diagnostics",
    "run_norm_growth_sweep",
    "run_tradeoff_sweep",
    "select_regularizer",
    "self_consistent_residual",
    "stieltjes",
    "sweep_rho",
]
