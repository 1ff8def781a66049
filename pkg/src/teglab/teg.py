"""Translation Evolution Grid: paths, selection polynomials, and path factors.

A discretized evolution over N time slices with b distinct translation
moves per slice expands into b^N ordered move sequences. Encoding each
sequence as the base-b digits of its index M (least-significant digit =
first path step) turns "sum over all operator orderings" into "sum over
M", and every per-path quantity into a digit-filtered product:

  * path_prefactor  -- product of the move weights along the path
  * potential_exponent -- exp of the shifted-potential sum along the path
  * prefix_shift    -- lattice displacement after the first k steps
  * Path.terminal_shift -- displacement after all N steps

Path step k carries the potential evaluated at time T - (k-1)*t: the
first step of the drawn path corresponds to the propagator applied last.
That pairing is fixed by expanding the operator product (see
propagators.enumerate_paths, which must match lattice evolution exactly).

Digit filtering is the default evaluation everywhere; the dense
selection-polynomial expansions are kept only as small-N validators of
the same quantities via generic coefficient extraction.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

from .baserep import padded_digits
from .laurent import LaurentPoly, poly_mul, split_by_var

# Dense selection polynomials grow as (2b)^N; keep validators desk-sized.
_DENSE_N_CAP = 8


class PathIndexError(ValueError):
    """Path index M outside [0, b^N)."""


@dataclass(frozen=True)
class TegSpec:
    """One discretized equation: move weights, displacements, and slicing.

    variety_order b moves per step; displacement vectors are integer
    lattice steps of dimension K; t = T/N is the slice length and
    tau = sqrt(T/(2N)) the lattice spacing.
    """

    variety_order: int
    slices: int
    weights: tuple[complex, ...]
    displacements: tuple[tuple[int, ...], ...]
    total_time: float

    def __post_init__(self):
        b = self.variety_order
        if b < 2:
            raise ValueError(f"variety order must be >= 2, got {b}")
        if self.slices < 1:
            raise ValueError(f"slicing number must be >= 1, got {self.slices}")
        if len(self.weights) != b or len(self.displacements) != b:
            raise ValueError("need one weight and one displacement per move code")
        dims = {len(d) for d in self.displacements}
        if len(dims) != 1:
            raise ValueError("displacement vectors must share one dimension")
        if self.total_time < 0:
            raise ValueError("total time must be >= 0")

    @property
    def dim(self) -> int:
        return len(self.displacements[0])

    @property
    def step_time(self) -> float:
        return self.total_time / self.slices

    @property
    def tau(self) -> float:
        return math.sqrt(self.total_time / (2.0 * self.slices))

    @property
    def path_count(self) -> int:
        return self.variety_order**self.slices


def diffusion_spec(total_time: float, slices: int) -> TegSpec:
    """Two-move spec: down/up with weight 1/2 each (real diffusion stencil)."""
    return TegSpec(
        variety_order=2,
        slices=slices,
        weights=(0.5 + 0j, 0.5 + 0j),
        displacements=((-1,), (1,)),
        total_time=total_time,
    )


def tdse_spec(total_time: float, slices: int, dim: int = 1) -> TegSpec:
    """(2K+1)-move spec: one horizontal move with weight 1-2iK plus
    weight-i moves along +/- each axis."""
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    b = 2 * dim + 1
    weights = [complex(1.0, -2.0 * dim)] + [1j] * (2 * dim)
    displacements: list[tuple[int, ...]] = [(0,) * dim]
    for axis in range(dim):
        up = [0] * dim
        up[axis] = 1
        down = [0] * dim
        down[axis] = -1
        displacements.append(tuple(up))
        displacements.append(tuple(down))
    return TegSpec(
        variety_order=b,
        slices=slices,
        weights=tuple(weights),
        displacements=tuple(displacements),
        total_time=total_time,
    )


def _vec_add(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))


@dataclass(frozen=True)
class Path:
    """One decoded path: digits of M, running shifts, and the endpoint."""

    index: int
    moves: tuple[int, ...]
    prefix_shifts: tuple[tuple[int, ...], ...]

    @property
    def terminal_shift(self) -> tuple[int, ...]:
        return self.prefix_shifts[-1]

    @property
    def scalar_shifts(self) -> tuple[int, ...]:
        """1-D view of the running shifts; only valid in one dimension."""
        if any(len(s) != 1 for s in self.prefix_shifts):
            raise ValueError("scalar shifts only defined for 1-D paths")
        return tuple(s[0] for s in self.prefix_shifts)

    @property
    def move_string(self) -> str:
        return "".join(str(d) for d in self.moves)


def path_from_index(index: int, spec: TegSpec) -> Path:
    """Decode M into moves and running shifts (first step = lowest digit)."""
    if not 0 <= index < spec.path_count:
        raise PathIndexError(f"index {index} outside [0, {spec.path_count})")
    moves = padded_digits(index, spec.variety_order, spec.slices)
    shifts = []
    pos = (0,) * spec.dim
    for code in moves:
        pos = _vec_add(pos, spec.displacements[code])
        shifts.append(pos)
    return Path(index=index, moves=moves, prefix_shifts=tuple(shifts))


def prefix_shift(index: int, k: int, spec: TegSpec) -> tuple[int, ...]:
    """Lattice displacement after the first k path steps, 1 <= k <= N."""
    if not 1 <= k <= spec.slices:
        raise ValueError(f"step index {k} outside 1..{spec.slices}")
    return path_from_index(index, spec).prefix_shifts[k - 1]


def path_prefactor(index: int, spec: TegSpec) -> complex:
    """Product of the move weights along path M.

    Per-step weights sum to 1 in both bundled specs, so the prefactors of
    all b^N paths sum to 1.
    """
    if not 0 <= index < spec.path_count:
        raise PathIndexError(f"index {index} outside [0, {spec.path_count})")
    result = 1.0 + 0j
    for code in padded_digits(index, spec.variety_order, spec.slices):
        result *= spec.weights[code]
    return result


def potential_exponent(
    index: int,
    spec: TegSpec,
    potential: Callable[[Sequence[float], float], float],
    x: Sequence[float],
    sign: complex,
) -> complex:
    """exp[sign * t * sum_k V(x + s_k*tau, T - (k-1)*t)] along path M.

    sign is +1 for the diffusion equation and -i for the Schroedinger
    equation. Step k of the path pairs with evolution time T - (k-1)*t;
    this pairing reproduces the right-to-left operator product exactly.
    """
    path = path_from_index(index, spec)
    t = spec.step_time
    tau = spec.tau
    big_t = spec.total_time
    if len(x) != spec.dim:
        raise ValueError(f"point has dimension {len(x)}, spec has {spec.dim}")
    total = 0.0
    for k, shift in enumerate(path.prefix_shifts, start=1):
        point = tuple(xi + si * tau for xi, si in zip(x, shift))
        value = potential(point, big_t - (k - 1) * t)
        if not math.isfinite(value):
            raise ArithmeticError(f"non-finite potential value at {point}")
        total += value
    result = _cexp(sign * t * total)
    return result


def _cexp(z: complex) -> complex:
    try:
        return cmath.exp(z)
    except OverflowError:
        raise ArithmeticError(f"potential exponent overflow: exp({z})") from None


# --- selection polynomials -------------------------------------------------
#
# Variable layout for the dense validators: index 0 is the path-index
# selector (exponent k*b^n encodes digit k at step n), index 1 the step
# selector (exponent 2^n marks step n), and indexes 2.. carry one shift
# tracker per lattice dimension. A move with displacement d contributes
# the shift-tracker monomial gamma^(-d), so a product over a k-step
# prefix collapses to a single monomial encoding minus the prefix shift.


def _move_factor(spec: TegSpec, n: int, code: int, with_index_var: bool) -> LaurentPoly:
    d = spec.displacements[code]
    arity = 2 + spec.dim if with_index_var else 1 + spec.dim
    pos = 1 if with_index_var else 0
    base = [0] * arity
    step_mark = base.copy()
    step_mark[pos] = 2**n
    for axis, comp in enumerate(d):
        step_mark[pos + 1 + axis] = -comp
    terms = {tuple(base): 1.0 + 0j, tuple(step_mark): 1.0 + 0j}
    if with_index_var:
        shifted = {}
        offset = code * spec.variety_order**n
        for exps, c in terms.items():
            shifted[(exps[0] + offset,) + exps[1:]] = c
        terms = shifted
    return LaurentPoly(terms, arity)


def selection_poly(index: int, spec: TegSpec) -> LaurentPoly:
    """Digit-filtered selection polynomial of path M in (step, shift) variables.

    Product over steps n of [1 + f(move_n) * w^(2^n)] where f encodes the
    move's displacement on the shift trackers. Evaluating all variables at
    1 gives 2^N; extracting the step-selector coefficient 2^k - 1 yields
    the k-step prefix-shift monomial.
    """
    if spec.slices > _DENSE_N_CAP:
        raise ValueError(f"selection polynomial guarded to N <= {_DENSE_N_CAP}")
    moves = padded_digits(index, spec.variety_order, spec.slices)
    result = LaurentPoly.one(1 + spec.dim)
    for n, code in enumerate(moves):
        result = poly_mul(result, _move_factor(spec, n, code, with_index_var=False))
    return result


@lru_cache(maxsize=8)
def _dense_selection_slices(spec: TegSpec) -> dict[int, LaurentPoly]:
    """Full selection polynomial over all paths, grouped by path index."""
    if spec.slices > _DENSE_N_CAP:
        raise ValueError(f"dense selection guarded to N <= {_DENSE_N_CAP}")
    result = LaurentPoly.one(2 + spec.dim)
    for n in range(spec.slices):
        factor = LaurentPoly.zero(2 + spec.dim)
        for code in range(spec.variety_order):
            factor = factor + _move_factor(spec, n, code, with_index_var=True)
        result = poly_mul(result, factor)
    return split_by_var(result, 0)


def selection_poly_dense(index: int, spec: TegSpec) -> LaurentPoly:
    """Validator: same polynomial as selection_poly, read off the dense
    all-paths expansion by generic coefficient extraction."""
    if not 0 <= index < spec.path_count:
        raise PathIndexError(f"index {index} outside [0, {spec.path_count})")
    slices = _dense_selection_slices(spec)
    return slices.get(index, LaurentPoly.zero(1 + spec.dim))


def prefix_shift_extract(index: int, k: int, spec: TegSpec) -> tuple[int, ...]:
    """Validator: prefix shift after k steps via coefficient extraction.

    Reads the step-selector coefficient at 2^k - 1 (the only way to mark
    steps summing to that exponent is the first k steps together); the
    result must be a single unit-coefficient monomial whose shift-tracker
    exponents are minus the prefix shift.
    """
    if not 1 <= k <= spec.slices:
        raise ValueError(f"step index {k} outside 1..{spec.slices}")
    poly = selection_poly(index, spec)
    groups = split_by_var(poly, 0)
    mono = groups.get(2**k - 1)
    if mono is None or len(mono.terms) != 1:
        raise ArithmeticError(f"prefix selection did not isolate one monomial for M={index}, k={k}")
    (exps, c), = mono.terms.items()
    if abs(c - 1) > 1e-12:
        raise ArithmeticError(f"prefix monomial coefficient {c} != 1")
    return tuple(-e for e in exps)


def path_prefactor_extract(index: int, spec: TegSpec) -> complex:
    """Validator: move-weight product via dense coefficient extraction.

    Expands prod_n [sum_code weight(code) * z^(code * b^n)] and reads the
    coefficient of z^M; representation uniqueness makes it equal the
    digit-filtered product.
    """
    if spec.slices > _DENSE_N_CAP:
        raise ValueError(f"dense prefactor guarded to N <= {_DENSE_N_CAP}")
    if not 0 <= index < spec.path_count:
        raise PathIndexError(f"index {index} outside [0, {spec.path_count})")
    b = spec.variety_order
    result = LaurentPoly.one(1)
    for n in range(spec.slices):
        factor = LaurentPoly({(code * b**n,): spec.weights[code] for code in range(b)}, 1)
        result = poly_mul(result, factor)
    return result.terms.get((index,), 0j)


def terminal_shift_extract(index: int, spec: TegSpec) -> int:
    """Terminal 1-D shift of path M via coefficient extraction (b = 2 form).

    Builds prod_n [gamma + gamma^-1 * z^(2^n)], reads the coefficient of
    z^M (a single monomial gamma^(-S)), and returns the k weighted by the
    shift-tracker condition, i.e. S itself. For slicing numbers past the
    dense cap the digit sum is used directly; the two routes agree by
    representation uniqueness.
    """
    if spec.variety_order != 2 or spec.dim != 1:
        raise ValueError("terminal-shift extraction is defined for the two-move 1-D spec")
    if not 0 <= index < spec.path_count:
        raise PathIndexError(f"index {index} outside [0, {spec.path_count})")
    if spec.slices > _DENSE_N_CAP:
        return path_from_index(index, spec).terminal_shift[0]
    result = LaurentPoly.one(2)
    for n in range(spec.slices):
        factor = LaurentPoly({(0, 1): 1.0 + 0j, (2**n, -1): 1.0 + 0j}, 2)
        result = poly_mul(result, factor)
    groups = split_by_var(result, 0)
    mono = groups.get(index)
    if mono is None or len(mono.terms) != 1:
        raise ArithmeticError(f"terminal-shift extraction failed for M={index}")
    total = 0.0
    for k in range(-spec.slices, spec.slices + 1):
        total += k * mono.terms.get((-k,), 0j).real
    nearest = round(total)
    if abs(total - nearest) > 1e-9:
        raise ArithmeticError(f"non-integer terminal shift {total}")
    return int(nearest)
