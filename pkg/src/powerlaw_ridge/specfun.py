"""Gauss hypergeometric function on the family F(a, b; b+1; z) with z <= 0.

This is the only parameter family the trade-off formulas need: a is 1 or 2,
b = 1/alpha lies in (0, 1), and c = b + 1.  Three evaluation regimes cover
all argument magnitudes:

* direct power series for -0.5 < z <= 0 (geometric in |z|),
* Pfaff transformation F(a,b;c;z) = (1-z)^(-a) F(a, c-b; c; z/(z-1)) for
  -2 < z <= -0.5, which maps the argument into [1/3, 2/3),
* a large-argument expansion for z <= -2, obtained by splitting the Euler
  integral at t = 1; it converges geometrically with ratio 1/|z|.  (The
  Pfaff series alone degrades as z/(z-1) -> 1, so huge |z| needs this.)

Because c = b + 1, the gamma prefactor of the integral representation
collapses to b, and the large-argument connection constants reduce to
pi/sin(pi*b) factors; no general gamma function is required.

An adaptive Gauss-Legendre quadrature of the Euler integral serves as the
independent oracle for the closed-form path.  The endpoint singularity
t^(b-1) is removed by the substitution t = u^(1/b), after which the
integrand is smooth:

    F(a, b; b+1; z) = integral_0^1 (1 - z*u^(1/b))^(-a) du.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

_SERIES_REL_TOL = 1e-16
_MAX_TERMS = 10_000
# branch boundaries in z; both neighbours converge geometrically at the cut
_SERIES_CUT = -0.5
_PFAFF_CUT = -2.0

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)


@dataclass(frozen=True)
class HypergeometricArgs:
    """Arguments of F(a, b; c; z) restricted to the in-scope family."""

    a: float
    b: float
    c: float
    z: float

    def __post_init__(self) -> None:
        if self.a not in (1.0, 2.0):
            raise DomainError(f"first parameter must be 1 or 2, got {self.a}")
        if not 0.0 < self.b < 1.0:
            raise DomainError(f"second parameter must lie in (0, 1), got {self.b}")
        if abs(self.c - (self.b + 1.0)) > 1e-12:
            raise DomainError(f"third parameter must equal b + 1, got {self.c}")
        if self.z > 0.0:
            raise DomainError(f"argument must be <= 0, got {self.z}")
        if not math.isfinite(self.z):
            raise DomainError("argument must be finite")


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance and subdivision budget for the adaptive quadrature oracle."""

    abs_tol: float = 1e-14
    rel_tol: float = 1e-13
    max_subdivisions: int = 4000

    def __post_init__(self) -> None:
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


def hyp2f1(args: HypergeometricArgs) -> float:
    """Evaluate F(a, b; b+1; z) for z <= 0 to near machine precision."""
    if args.z == 0.0:
        return 1.0
    if args.z > _SERIES_CUT:
        return _gauss_series(args.a, args.b, args.b + 1.0, args.z)
    if args.z > _PFAFF_CUT:
        w = args.z / (args.z - 1.0)
        return (1.0 - args.z) ** (-args.a) * _gauss_series(
            args.a, 1.0, args.b + 1.0, w
        )
    return _large_argument(args.a, args.b, -args.z)


def hyp2f1_oracle(args: HypergeometricArgs, quad: QuadratureSpec | None = None) -> float:
    """Quadrature of the Euler integral; the independent check on hyp2f1."""
    if quad is None:
        quad = QuadratureSpec()
    if args.z == 0.0:
        return 1.0
    inv_b = 1.0 / args.b
    neg_z = -args.z
    a = args.a

    def integrand(u: np.ndarray) -> np.ndarray:
        return (1.0 + neg_z * u**inv_b) ** (-a)

    return adaptive_gauss_legendre(integrand, 0.0, 1.0, quad)


def _gauss_series(a: float, b: float, c: float, z: float) -> float:
    term = 1.0
    total = 1.0
    for m in range(_MAX_TERMS):
        term *= (a + m) * (b + m) / ((c + m) * (m + 1.0)) * z
        total += term
        if abs(term) <= _SERIES_REL_TOL * abs(total):
            return total
    raise ConvergenceError(
        f"hypergeometric series did not converge within {_MAX_TERMS} terms "
        f"(a={a}, b={b}, c={c}, z={z})"
    )


def _large_argument(a: float, b: float, big_z: float) -> float:
    # F(a, b; b+1; -Z) = b * (C_a * Z^(-b) - tail(Z)), Z = |z| > 1, where the
    # head comes from extending the Euler integral to [0, inf) and the tail
    # re-expands the remainder over [1, inf) in powers of 1/Z.
    head_const = math.pi / math.sin(math.pi * b)
    if a == 2.0:
        head_const *= 1.0 - b
    head = head_const * big_z ** (-b)

    tail = 0.0
    start = 1 if a == 1.0 else 2
    sign = 1.0
    power = big_z ** (-start)
    for m in range(start, _MAX_TERMS):
        coeff = 1.0 if a == 1.0 else float(m - 1)
        term = sign * coeff * power / (m - b)
        tail += term
        value = b * (head - tail)
        if abs(term) <= _SERIES_REL_TOL * max(abs(value), 1e-300):
            return value
        sign = -sign
        power /= big_z
    raise ConvergenceError(
        f"large-argument expansion did not converge (a={a}, b={b}, z={-big_z})"
    )


def _gl_panel(f, lo: float, hi: float) -> float:
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return half * float(np.dot(_GL_WEIGHTS, f(mid + half * _GL_NODES)))


def adaptive_gauss_legendre(f, lo: float, hi: float, quad: QuadratureSpec) -> float:
    """Globally adaptive 15-point Gauss-Legendre quadrature of f over [lo, hi].

    f must accept and return numpy arrays.  Panels are bisected worst-error
    first; the error estimate of a panel is the defect between its one-panel
    value and the sum over its two halves.
    """
    if not hi > lo:
        raise DomainError(f"empty integration interval [{lo}, {hi}]")

    coarse = _gl_panel(f, lo, hi)
    mid = 0.5 * (lo + hi)
    left = _gl_panel(f, lo, mid)
    right = _gl_panel(f, mid, hi)
    total = left + right
    err = abs(total - coarse)
    # heap of (-panel_error, lo, hi, panel_value); floor collects the error of
    # panels whose midpoint degenerates to an endpoint (machine resolution)
    heap = [(-err, lo, hi, total)]
    err_floor = 0.0
    n_subdivisions = 1

    while heap:
        if err + err_floor <= max(quad.abs_tol, quad.rel_tol * abs(total)):
            return total
        if n_subdivisions >= quad.max_subdivisions:
            raise ConvergenceError(
                f"quadrature used {n_subdivisions} subdivisions without "
                f"reaching tolerance (remaining error {err + err_floor:.3e})"
            )
        neg_e, a, b, value = heapq.heappop(heap)
        err += neg_e
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            err_floor -= neg_e
            continue
        refined = 0.0
        for sub_lo, sub_hi in ((a, m), (m, b)):
            c = _gl_panel(f, sub_lo, sub_hi)
            s = 0.5 * (sub_lo + sub_hi)
            if s <= sub_lo or s >= sub_hi:
                refined += c
                continue
            fine = _gl_panel(f, sub_lo, s) + _gl_panel(f, s, sub_hi)
            e = abs(fine - c)
            refined += fine
            heapq.heappush(heap, (-e, sub_lo, sub_hi, fine))
            err += e
        total += refined - value
        n_subdivisions += 2

    if err_floor <= max(quad.abs_tol, quad.rel_tol * abs(total)):
        return total
    raise ConvergenceError(
        f"quadrature hit machine panel resolution with error {err_floor:.3e} "
        "above tolerance"
    )
