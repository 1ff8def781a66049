"""Discrete path-sum solutions, closed forms, and convergence studies."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .propagators import EquationKind, Kind, enumerate_paths, evolve
from .teg import TegSpec

_HERMITE_NODES = 64


class Method(Enum):
    COMPACT_ENUMERATE = "compact_enumerate"
    LATTICE_DP = "lattice_dp"
    BINOMIAL_CLOSED_FORM = "binomial_closed_form"


class Reference(Enum):
    FREE_CONTINUOUS = "free_continuous"
    MATRIX_EXPONENTIAL = "matrix_exponential"


@dataclass
class SolveConfig:
    """One solving task: equation, slicing, potential, initial profile, points."""

    kind: EquationKind
    total_time: float
    slices: int
    potential: Callable[[Sequence[float], float], float]
    initial: Callable[[Sequence[float]], complex]
    points: Sequence[Sequence[float]]
    method: Method = Method.LATTICE_DP
    potential_is_zero: bool = False

    def spec(self) -> TegSpec:
        return self.kind.default_spec(self.total_time, self.slices)


def default_points(dim: int = 1, lo: float = -2.0, hi: float = 2.0, count: int = 11) -> list[tuple[float, ...]]:
    """Uniform 1-D grid embedded on the first axis (others zero)."""
    return [(float(v),) + (0.0,) * (dim - 1) for v in np.linspace(lo, hi, count)]


def binomial_free_value(initial: Callable[[Sequence[float]], complex], x: Sequence[float],
                        total_time: float, slices: int) -> complex:
    """2^-N * sum_k C(N,k) * initial(x + (N-2k)*tau): the potential-free
    two-move path sum collapsed by the binomial theorem (1-D)."""
    n = slices
    tau = math.sqrt(total_time / (2.0 * n)) if total_time > 0 else 0.0
    scale = 0.5**n
    total = 0j
    for k in range(n + 1):
        shift = (n - 2 * k) * tau
        total += math.comb(n, k) * initial((x[0] + shift,))
    return scale * total


def solve(config: SolveConfig) -> list[complex]:
    """Discrete N-slice solution at every evaluation point."""
    spec = config.spec()
    if config.method is Method.BINOMIAL_CLOSED_FORM:
        if config.kind.kind is not Kind.DIFFUSION or not config.potential_is_zero:
            raise ValueError("binomial closed form needs the diffusion equation with zero potential")
        return [binomial_free_value(config.initial, x, config.total_time, config.slices)
                for x in config.points]
    if config.method is Method.COMPACT_ENUMERATE:
        return [enumerate_paths(config.initial, x, spec, config.potential, config.kind)
                for x in config.points]
    return [evolve(config.initial, x, spec, config.potential, config.kind)
            for x in config.points]


def free_solution_continuous(initial: Callable[[Sequence[float]], complex], x: float, total_time: float) -> complex:
    """Potential-free continuum solution (1/sqrt(pi)) int e^{-y^2} f(x + y*sqrt(T)) dy.

    Fixed 64-node Gauss-Hermite quadrature; exact for polynomial data up
    to degree 127 and ample for sub-Gaussian-growth profiles.
    """
    if total_time < 0:
        raise ValueError("total time must be >= 0")
    if total_time == 0:
        return complex(initial((x,)))
    nodes, weights = np.polynomial.hermite.hermgauss(_HERMITE_NODES)
    root_t = math.sqrt(total_time)
    total = 0j
    for y, w in zip(nodes, weights):
        total += w * initial((x + y * root_t,))
    return total / math.sqrt(math.pi)


def demoivre_weight(slices: int, k: int) -> float:
    """Gaussian approximation 2^N / sqrt(pi*N/2) * exp[-(2/N)(k - N/2)^2]
    of the binomial coefficient C(N, k)."""
    n = slices
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside 0..{n}")
    return 2.0**n / math.sqrt(math.pi * n / 2.0) * math.exp(-(2.0 / n) * (k - n / 2.0) ** 2)


@dataclass
class ConvergenceRow:
    slices: int
    error: float
    runtime_s: float

    def __post_init__(self):
        if self.error < 0:
            raise ValueError("error must be >= 0")


def convergence_study(
    config: SolveConfig,
    slice_list: Sequence[int],
    reference: Reference,
    reference_values: Sequence[complex] | None = None,
) -> list[ConvergenceRow]:
    """Sup-norm error of the discrete solution against a reference, per N.

    The reference is computed once: either the potential-free continuum
    integral or a matrix-exponential grid solution (imported lazily to
    keep the dependency one-way). Precomputed reference values may be
    passed directly.
    """
    if list(slice_list) != sorted(set(slice_list)):
        raise ValueError("slice list must be strictly increasing")
    if reference_values is None:
        reference_values = _reference_values(config, reference)
    rows = []
    for n in slice_list:
        cfg = SolveConfig(
            kind=config.kind,
            total_time=config.total_time,
            slices=n,
            potential=config.potential,
            initial=config.initial,
            points=config.points,
            method=config.method,
            potential_is_zero=config.potential_is_zero,
        )
        start = time.perf_counter()
        values = solve(cfg)
        elapsed = time.perf_counter() - start
        err = max(abs(v - r) for v, r in zip(values, reference_values))
        rows.append(ConvergenceRow(slices=n, error=err, runtime_s=elapsed))
    return rows


def _reference_values(config: SolveConfig, reference: Reference) -> list[complex]:
    if config.total_time == 0:
        return [complex(config.initial(x)) for x in config.points]
    if reference is Reference.FREE_CONTINUOUS:
        if not config.potential_is_zero:
            raise ValueError("the continuum free solution requires a zero potential")
        if config.kind.kind is not Kind.DIFFUSION:
            raise ValueError("the continuum free solution is the diffusion closed form")
        return [free_solution_continuous(config.initial, x[0], config.total_time)
                for x in config.points]
    from .reference import matrix_exponential_solve

    grid = matrix_exponential_solve(
        kind=config.kind,
        potential=config.potential,
        initial=config.initial,
        total_time=config.total_time,
    )
    return [grid(x[0]) for x in config.points]
