"""Single-step translation propagators and two exact evolution oracles.

`evolve` performs lattice dynamic programming on the dual weight lattice:
it seeds a unit weight at the origin, pushes it through the N translation
stencils, and finally pairs the weights with samples of the initial
profile. Because the stencils commute with point evaluation, this is the
exact distributed sum over all b^N move sequences at cost
O(N * (2N+1)^K) instead of b^N.

`enumerate_paths` is the brute-force twin: an explicit loop over every
path index, multiplying the path prefactor, the potential exponent, and
the shifted initial value. The two must agree to rounding; that equality
pins down the time/shift pairing of the whole package.

Weight propagation runs through the propagators in reverse application
order (the slice at total time T first), spreading through the stencil
before applying each slice's potential factor at the lattice points the
spread reaches. Expanding the right-to-left operator product term by term
shows this is the unique ordering that reproduces it from a delta seed.

Conditioning: when the move weights have total magnitude above 1 (the
three-move stencil gives |1-2i| + 2 = 4.236...) the dual weights grow
like that magnitude to the N-th power while the answer stays O(1), so
double precision loses about 0.63*N digits to cancellation. Both oracles
therefore escalate to extended working precision automatically once the
estimated loss would intrude on a 1e-12 noise floor; the two-move
diffusion stencil (weights summing to 1) always stays in doubles.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import mpmath

from .teg import TegSpec, diffusion_spec, path_from_index, path_prefactor, potential_exponent, tdse_spec

_ENUMERATION_CAP = 10**7

# Escalate once the cancellation estimate exceeds this many digits.
_DOUBLE_LOSS_DIGITS = 4.0
_GUARD_DIGITS = 30


def working_digits(spec: TegSpec) -> int:
    """Decimal digits required by the stencil's cancellation growth; 0
    means doubles suffice."""
    l1 = sum(abs(w) for w in spec.weights)
    if l1 <= 1.0 + 1e-12:
        return 0
    loss = spec.slices * math.log10(l1)
    if loss <= _DOUBLE_LOSS_DIGITS:
        return 0
    return int(loss) + _GUARD_DIGITS


class InstanceTooLargeError(ValueError):
    """Path enumeration refused: b^N exceeds the hard cap."""


class Kind(Enum):
    DIFFUSION = "diffusion"
    SCHRODINGER = "schrodinger"


@dataclass(frozen=True)
class EquationKind:
    """Which equation family, and its spatial dimension."""

    kind: Kind
    dim: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        if self.kind is Kind.DIFFUSION and self.dim != 1:
            raise ValueError("the diffusion stencil is one-dimensional")

    @property
    def exponent_sign(self) -> complex:
        """exp[+t*V] for diffusion, exp[-i*t*U] for the Schroedinger case."""
        return 1.0 + 0j if self.kind is Kind.DIFFUSION else -1j

    def default_spec(self, total_time: float, slices: int) -> TegSpec:
        if self.kind is Kind.DIFFUSION:
            return diffusion_spec(total_time, slices)
        return tdse_spec(total_time, slices, self.dim)


DIFFUSION_1D = EquationKind(Kind.DIFFUSION, 1)
SCHRODINGER_1D = EquationKind(Kind.SCHRODINGER, 1)


@dataclass
class LatticeState:
    """Complex weights on the shift lattice around an anchor point.

    Keys are integer shift vectors s; the lattice point is x + s*tau.
    """

    weights: dict[tuple[int, ...], complex]
    x: tuple[float, ...]
    tau: float

    def support_radius(self) -> int:
        if not self.weights:
            return 0
        return max(max(abs(c) for c in s) for s in self.weights)

    def total_weight(self) -> complex:
        return sum(self.weights[s] for s in sorted(self.weights))


def delta_state(x: Sequence[float], spec: TegSpec) -> LatticeState:
    return LatticeState(weights={(0,) * spec.dim: 1.0 + 0j}, x=tuple(float(v) for v in x), tau=spec.tau)


def step(
    state: LatticeState,
    n: int,
    spec: TegSpec,
    potential: Callable[[Sequence[float], float], float],
    kind: EquationKind,
) -> LatticeState:
    """Push the weight lattice through propagator slice n (time n*t).

    Spreads every weight through the translation stencil, then multiplies
    each resulting weight by the slice's potential factor at its own
    lattice point. Support grows by one in every displaced direction.
    """
    if not 1 <= n <= spec.slices:
        raise ValueError(f"slice number {n} outside 1..{spec.slices}")
    spread: dict[tuple[int, ...], complex] = {}
    for s, w in state.weights.items():
        for code in range(spec.variety_order):
            ns = tuple(a + b for a, b in zip(s, spec.displacements[code]))
            spread[ns] = spread.get(ns, 0j) + w * spec.weights[code]
    sign = kind.exponent_sign
    t = spec.step_time
    out: dict[tuple[int, ...], complex] = {}
    for s, w in spread.items():
        point = tuple(xi + si * state.tau for xi, si in zip(state.x, s))
        value = potential(point, n * t)
        if not math.isfinite(value):
            raise ArithmeticError(f"non-finite potential value at {point}")
        out[s] = w * cmath.exp(sign * t * value)
    return LatticeState(weights=out, x=state.x, tau=state.tau)


def evolve(
    initial: Callable[[Sequence[float]], complex],
    x: Sequence[float],
    spec: TegSpec,
    potential: Callable[[Sequence[float], float], float],
    kind: EquationKind,
    precision: int | None = None,
) -> complex:
    """Exact N-slice evolution at the point x by lattice dynamic programming.

    Weight propagation visits the slices in reverse application order,
    n = N down to 1, so the slice at total time T spreads first; this is
    the dual of applying the propagators right-to-left to the initial
    profile, and reproduces the full path sum exactly.

    `precision` is the decimal working precision of the weight
    arithmetic; None picks doubles or enough guard digits automatically
    (see `working_digits`). Potential values and lattice points are
    always plain doubles, so both precisions describe the same discrete
    solution.
    """
    digits = working_digits(spec) if precision is None else precision
    if digits:
        return _evolve_mp(initial, x, spec, potential, kind, digits)
    state = delta_state(x, spec)
    for n in range(spec.slices, 0, -1):
        state = step(state, n, spec, potential, kind)
    tau = state.tau
    total = 0j
    for s in sorted(state.weights):
        point = tuple(xi + si * tau for xi, si in zip(state.x, s))
        total += state.weights[s] * initial(point)
    return total


def _evolve_mp(
    initial: Callable[[Sequence[float]], complex],
    x: Sequence[float],
    spec: TegSpec,
    potential: Callable[[Sequence[float], float], float],
    kind: EquationKind,
    digits: int,
) -> complex:
    # Every sample argument is built at working precision: the pairing of
    # the grown weights with independently double-rounded lattice points
    # or sample values would reinject the full cancellation loss.
    with mpmath.workdps(digits):
        x_mp = tuple(mpmath.mpf(float(v)) for v in x)
        tau = mpmath.sqrt(mpmath.mpf(spec.total_time) / (2 * spec.slices))
        t = spec.step_time
        sign = mpmath.mpc(kind.exponent_sign)
        stencil = [mpmath.mpc(w) for w in spec.weights]
        factor_cache: dict = {}
        weights: dict[tuple[int, ...], mpmath.mpc] = {(0,) * spec.dim: mpmath.mpc(1)}
        for n in range(spec.slices, 0, -1):
            spread: dict[tuple[int, ...], mpmath.mpc] = {}
            for s, w in weights.items():
                for code in range(spec.variety_order):
                    ns = tuple(a + b for a, b in zip(s, spec.displacements[code]))
                    acc = spread.get(ns)
                    spread[ns] = w * stencil[code] if acc is None else acc + w * stencil[code]
            weights = {}
            for s, w in spread.items():
                point = tuple(xi + si * tau for xi, si in zip(x_mp, s))
                value = potential(point, n * t)
                if not mpmath.isfinite(mpmath.mpf(value)):
                    raise ArithmeticError(f"non-finite potential value at {point}")
                factor = factor_cache.get(value)
                if factor is None:
                    factor = mpmath.exp(sign * t * value)
                    factor_cache[value] = factor
                weights[s] = w * factor
        total = mpmath.mpc(0)
        for s in sorted(weights):
            point = tuple(xi + si * tau for xi, si in zip(x_mp, s))
            total += weights[s] * mpmath.mpc(initial(point))
        return complex(total)


def enumerate_paths(
    initial: Callable[[Sequence[float]], complex],
    x: Sequence[float],
    spec: TegSpec,
    potential: Callable[[Sequence[float], float], float],
    kind: EquationKind,
    precision: int | None = None,
) -> complex:
    """Brute-force sum over all b^N paths: sum_M C_M * E_M * initial(x + S_M*tau).

    Must equal `evolve` to rounding; guarded to b^N <= 10^7. Terms are
    accumulated in ascending M for a deterministic reduction order, with
    the same automatic precision escalation as `evolve`.
    """
    if spec.path_count > _ENUMERATION_CAP:
        raise InstanceTooLargeError(f"{spec.path_count} paths exceed the {_ENUMERATION_CAP} cap")
    digits = working_digits(spec) if precision is None else precision
    if digits:
        return _enumerate_mp(initial, x, spec, potential, kind, digits)
    sign = kind.exponent_sign
    tau = spec.tau
    x = tuple(float(v) for v in x)
    total = 0j
    for index in range(spec.path_count):
        path = path_from_index(index, spec)
        weight = path_prefactor(index, spec)
        exponent = potential_exponent(index, spec, potential, x, sign)
        point = tuple(xi + si * tau for xi, si in zip(x, path.terminal_shift))
        total += weight * exponent * initial(point)
    return total


def _enumerate_mp(
    initial: Callable[[Sequence[float]], complex],
    x: Sequence[float],
    spec: TegSpec,
    potential: Callable[[Sequence[float], float], float],
    kind: EquationKind,
    digits: int,
) -> complex:
    t = spec.step_time
    big_t = spec.total_time
    with mpmath.workdps(digits):
        x_mp = tuple(mpmath.mpf(float(v)) for v in x)
        tau = mpmath.sqrt(mpmath.mpf(spec.total_time) / (2 * spec.slices))
        sign = mpmath.mpc(kind.exponent_sign)
        stencil = [mpmath.mpc(w) for w in spec.weights]
        total = mpmath.mpc(0)
        for index in range(spec.path_count):
            path = path_from_index(index, spec)
            weight = mpmath.mpc(1)
            exponent_sum = mpmath.mpf(0)
            for k, code in enumerate(path.moves, start=1):
                weight *= stencil[code]
                shift = path.prefix_shifts[k - 1]
                point = tuple(xi + si * tau for xi, si in zip(x_mp, shift))
                value = potential(point, big_t - (k - 1) * t)
                if not mpmath.isfinite(mpmath.mpf(value)):
                    raise ArithmeticError(f"non-finite potential value at {point}")
                exponent_sum += value
            point = tuple(xi + si * tau for xi, si in zip(x_mp, path.terminal_shift))
            total += weight * mpmath.exp(sign * t * exponent_sum) * mpmath.mpc(initial(point))
        return complex(total)
