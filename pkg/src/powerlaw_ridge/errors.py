"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: configuration problems exit
with 1, numerical failures with 2, I/O failures with 3.
"""

from __future__ import annotations


class PowerlawRidgeError(Exception):
    """Base class for all package errors."""


class DomainError(PowerlawRidgeError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConvergenceError(PowerlawRidgeError, RuntimeError):
    """An iterative scheme (series, quadrature, root finder) hit its budget
    before reaching the requested tolerance."""


class ConfigError(PowerlawRidgeError, ValueError):
    """A sweep or CLI configuration violates its contract."""


class SweepError(PowerlawRidgeError, RuntimeError):
    """A Monte-Carlo trial failed; carries the offending point and trial."""

    def __init__(self, sweep_value: float, trial: int, message: str):
        super().__init__(
            f"trial failed at sweep value {sweep_value!r}, trial {trial}: {message}"
        )
        self.sweep_value = sweep_value
        self.trial = trial
