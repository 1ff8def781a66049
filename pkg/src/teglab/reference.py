"""Independent ground-truth solvers and asymptotic cross-check identities.

The grid reference deliberately shares no machinery with the lattice
solver: it discretizes space once (dense spectral second-derivative
matrix on a uniform periodic grid) and advances time with dense matrix
exponentials, freezing time-dependent potentials at substep midpoints
(second order in the substep). Errors of the two methods are therefore
uncorrelated.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import expm

from .laurent import LaurentPoly, quadrature_coeff
from .propagators import EquationKind, Kind

_DOUBLE_FACTORIAL_MAX = 170  # 171! overflows IEEE-754 double


class GridUnderresolvedWarning(UserWarning):
    """Solution amplitude reached the grid boundary above 1e-8."""


class TruncationInsufficientError(ArithmeticError):
    """Series-vs-closed-form factorial check missed its tolerance."""


@dataclass
class GridOperator:
    """Spatial grid plus the dense generator matrix on it."""

    x: np.ndarray
    matrix: np.ndarray
    step: float

    @property
    def size(self) -> int:
        return len(self.x)


def _spectral_second_derivative(n: int, step: float) -> np.ndarray:
    """Dense second-derivative matrix of the periodic Fourier interpolant.

    Real, symmetric, and exact for every resolvable wavenumber, so the
    spatial error is negligible next to the time-slicing error under test.
    """
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=step)
    d2 = np.fft.ifft(-(k**2)[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0).real
    return 0.5 * (d2 + d2.T)


def build_grid_operator(
    kind: EquationKind,
    potential_values: np.ndarray,
    half_width: float = 12.0,
    step: float = 0.05,
) -> GridOperator:
    """Generator matrix: -1/2 D2 + U (Schroedinger) or 1/4 D2 + V (diffusion)."""
    if kind.dim != 1:
        raise ValueError("the grid reference is one-dimensional")
    x = _grid(half_width, step)
    n = len(x)
    if len(potential_values) != n:
        raise ValueError("potential sample count does not match the grid")
    d2 = _spectral_second_derivative(n, step)
    if kind.kind is Kind.DIFFUSION:
        matrix = 0.25 * d2 + np.diag(potential_values)
    else:
        matrix = -0.5 * d2 + np.diag(potential_values)
    return GridOperator(x=x, matrix=matrix, step=step)


def _grid(half_width: float, step: float) -> np.ndarray:
    n = int(round(2.0 * half_width / step))
    return -half_width + step * np.arange(n)


@dataclass
class GridSolution:
    """Grid samples of the reference solution, evaluable at arbitrary points."""

    x: np.ndarray
    values: np.ndarray
    step: float

    def __call__(self, point: float) -> complex:
        idx = (point - self.x[0]) / self.step
        nearest = int(round(idx))
        if 0 <= nearest < len(self.x) and abs(idx - nearest) < 1e-9:
            return complex(self.values[nearest])
        spline_re = CubicSpline(self.x, self.values.real)
        spline_im = CubicSpline(self.x, self.values.imag)
        return complex(spline_re(point) + 1j * spline_im(point))


def matrix_exponential_solve(
    kind: EquationKind,
    potential: Callable[[Sequence[float], float], float],
    initial: Callable[[Sequence[float]], complex],
    total_time: float,
    substeps: int = 256,
    half_width: float = 12.0,
    step: float = 0.05,
) -> GridSolution:
    """High-accuracy reference by per-substep dense matrix exponentials.

    The potential is frozen at each substep midpoint; identical frozen
    potentials reuse one exponential, so time-independent problems cost a
    single expm. Warns when the final amplitude at the grid edge exceeds
    1e-8 of the peak.
    """
    if kind.dim != 1:
        raise ValueError("the grid reference is one-dimensional")
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    x = _grid(half_width, step)
    psi = np.array([complex(initial((float(v),))) for v in x])
    if total_time == 0:
        return GridSolution(x=x, values=psi, step=step)
    dt = total_time / substeps
    factor = dt if kind.kind is Kind.DIFFUSION else -1j * dt
    prev_potential: np.ndarray | None = None
    propagator: np.ndarray | None = None
    for j in range(substeps):
        t_mid = (j + 0.5) * dt
        u = np.array([potential((float(v),), t_mid) for v in x])
        if not np.all(np.isfinite(u)):
            raise ArithmeticError("non-finite potential sample on the reference grid")
        if prev_potential is None or not np.array_equal(u, prev_potential):
            operator = build_grid_operator(kind, u, half_width, step)
            propagator = expm(factor * operator.matrix)
            prev_potential = u
        psi = propagator @ psi
    peak = np.max(np.abs(psi))
    edge = max(abs(psi[0]), abs(psi[-1]))
    if peak > 0 and edge > 1e-8 * peak:
        warnings.warn(
            f"boundary amplitude {edge:.3e} exceeds 1e-8 of peak {peak:.3e}; widen the grid",
            GridUnderresolvedWarning,
        )
    return GridSolution(x=x, values=psi, step=step)


def exact_factorial(n: int) -> int:
    """n! as the exact integer product 1*2*...*n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    result = 1
    for i in range(2, n + 1):
        result *= i
    return result


def stirling_approx(n: int, log: bool = False) -> float:
    """sqrt(2*pi*n) * n^n * e^-n; with log=True returns its natural log.

    The plain value overflows IEEE-754 doubles past n = 170, so larger n
    must be requested in log space.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    log_value = 0.5 * math.log(2.0 * math.pi * n) + n * math.log(n) - n
    if log:
        return log_value
    if n > _DOUBLE_FACTORIAL_MAX:
        raise OverflowError(f"n={n} overflows double precision; pass log=True")
    return math.exp(log_value)


def stirling_ratio(n: int) -> float:
    """n! divided by its Stirling approximation, computed in log space."""
    return math.exp(math.lgamma(n + 1) - stirling_approx(n, log=True))


def factorial_integral_check(n: int, b: float, tolerance: float = 1e-8) -> float:
    """Cross-check B^N/N! against periodic quadrature of exp(B*e^{i*phi}).

    The exponential is truncated to degree 4N (a band-limited surrogate,
    which leaves the degree-N coefficient untouched) and integrated on a
    uniform grid dense enough for the truncated bandwidth. Disagreement
    beyond the tolerance raises TruncationInsufficientError.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > 30 or b > 30:
        raise ValueError("guarded to n <= 30 and b <= 30")
    degree = 4 * n
    terms: dict[tuple[int, ...], complex] = {}
    c = 1.0
    for j in range(degree + 1):
        terms[(j,)] = c
        c *= b / (j + 1)
    series = LaurentPoly(terms, 1)
    samples = max(2 * degree + 3, 3)
    quad = quadrature_coeff(series, (n,), samples)
    closed = b**n / exact_factorial(n)
    if abs(quad - closed) > tolerance * (1.0 + abs(closed)):
        raise TruncationInsufficientError(
            f"quadrature {quad} vs closed form {closed} beyond {tolerance} relative"
        )
    return quad.real
