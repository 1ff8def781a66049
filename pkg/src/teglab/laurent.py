"""Sparse multivariate Laurent polynomials with complex coefficients.

A polynomial in V formal variables is stored as a dictionary mapping
exponent tuples to complex coefficients:

    {(2, -1): (1+0j), (0, 0): 3j}   ->   z0^2 * z1^-1 + 3i

Each variable z_v stands for a unit-modulus phase e^{i*theta_v}, so the
coefficient of the exponent vector e is exactly the periodic contour
integral (1/2pi)^V * integral over [-pi,pi]^V of p(Y) * e^{-i e.Y} dY.
Selection logic (pick the terms satisfying integer conditions) therefore
reduces to dictionary lookups, which is what `coeff` and `select` do.
`quadrature_coeff` evaluates the same integral numerically on a uniform
periodic grid and exists purely as an independent cross-check.

Exponents are kept within signed 64-bit range; `poly_mul` checks every
summed exponent and raises ExponentOverflowError instead of wrapping or
silently promoting to big integers.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

import numpy as np

_INT64_MAX = 2**63 - 1

ExponentVec = tuple[int, ...]


class ExponentOverflowError(ArithmeticError):
    """An exponent left the signed 64-bit range during multiplication."""


class InsufficientSamplingError(ValueError):
    """Quadrature grid too coarse for the polynomial's bandwidth."""


class LaurentPoly:
    """Immutable-by-convention sparse Laurent polynomial.

    `terms` maps exponent tuples (length = arity) to complex coefficients.
    Terms with |coeff| <= prune threshold are never stored; the default
    threshold 0.0 drops exact zeros only.
    """

    __slots__ = ("terms", "arity")

    def __init__(self, terms: Mapping[ExponentVec, complex], arity: int):
        if arity < 1:
            raise ValueError(f"arity must be >= 1, got {arity}")
        clean: dict[ExponentVec, complex] = {}
        for exps, c in terms.items():
            if len(exps) != arity:
                raise ValueError(f"exponent {exps} has wrong arity (want {arity})")
            c = complex(c)
            if c != 0:
                clean[tuple(int(e) for e in exps)] = c
        self.terms = clean
        self.arity = arity

    @classmethod
    def zero(cls, arity: int) -> "LaurentPoly":
        return cls({}, arity)

    @classmethod
    def one(cls, arity: int) -> "LaurentPoly":
        return cls({(0,) * arity: 1.0 + 0j}, arity)

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff: complex = 1.0, arity: int | None = None) -> "LaurentPoly":
        exps = tuple(int(e) for e in exps)
        if arity is None:
            arity = len(exps)
        return cls({exps: coeff}, arity)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.arity == other.arity and self.terms == other.terms

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        return poly_add(self, other)

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            return poly_mul(self, other)
        return poly_scale(self, other)

    def __rmul__(self, other):
        return poly_scale(self, other)

    def __repr__(self) -> str:
        if not self.terms:
            return f"LaurentPoly(0, arity={self.arity})"
        parts = [f"{c!r}*z^{e}" for e, c in sorted(self.terms.items())]
        return "LaurentPoly(" + " + ".join(parts[:6]) + (" + ..." if len(parts) > 6 else "") + f", arity={self.arity})"

    def max_abs_exponent(self, var: int) -> int:
        """Largest |exponent| of variable `var` over all stored terms."""
        if not self.terms:
            return 0
        return max(abs(e[var]) for e in self.terms)


def _check_arity(a: LaurentPoly, b: LaurentPoly) -> None:
    if a.arity != b.arity:
        raise ValueError(f"arity mismatch: {a.arity} vs {b.arity}")


def poly_add(a: LaurentPoly, b: LaurentPoly, prune: float = 0.0) -> LaurentPoly:
    _check_arity(a, b)
    out = dict(a.terms)
    for e, c in b.terms.items():
        s = out.get(e, 0j) + c
        if abs(s) <= prune:
            out.pop(e, None)
        else:
            out[e] = s
    return LaurentPoly(out, a.arity)


def poly_scale(a: LaurentPoly, factor: complex) -> LaurentPoly:
    factor = complex(factor)
    if factor == 0:
        return LaurentPoly.zero(a.arity)
    return LaurentPoly({e: c * factor for e, c in a.terms.items()}, a.arity)


def poly_mul(a: LaurentPoly, b: LaurentPoly, prune: float = 0.0) -> LaurentPoly:
    """Sparse convolution product; term count is at most |a|*|b|.

    Every summed exponent is range-checked: leaving the signed 64-bit
    range raises ExponentOverflowError.
    """
    _check_arity(a, b)
    out: dict[ExponentVec, complex] = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            ne = tuple(x + y for x, y in zip(ea, eb))
            for x in ne:
                if x > _INT64_MAX or x < -_INT64_MAX - 1:
                    raise ExponentOverflowError(f"exponent {x} exceeds signed 64-bit range")
            c = out.get(ne, 0j) + ca * cb
            if abs(c) <= prune:
                out.pop(ne, None)
            else:
                out[ne] = c
    return LaurentPoly(out, a.arity)


def poly_pow(a: LaurentPoly, n: int, prune: float = 0.0) -> LaurentPoly:
    if n < 0:
        raise ValueError("negative power")
    result = LaurentPoly.one(a.arity)
    for _ in range(n):
        result = poly_mul(result, a, prune=prune)
    return result


def coeff(p: LaurentPoly, e: Sequence[int]) -> complex:
    """Coefficient of the exponent vector e.

    Equals the contour integral (1/2pi)^V * oint p * e^{-i e.Y} dY exactly,
    because every stored term with a different exponent integrates to zero.
    """
    e = tuple(int(x) for x in e)
    if len(e) != p.arity:
        raise ValueError(f"exponent arity {len(e)} != polynomial arity {p.arity}")
    return p.terms.get(e, 0j)


def select(structure: LaurentPoly, conditions: Iterable[Sequence[int]]) -> complex:
    """Sum of coefficients of `structure` over the condition exponents.

    The structure polynomial encodes which object combinations exist; each
    condition exponent picks out the combinations with one admissible
    exponent signature, so the sum realizes subset/pair selection identities.
    """
    return sum(coeff(structure, e) for e in conditions)


def quadrature_coeff(p: LaurentPoly, e: Sequence[int], samples_per_var: int) -> complex:
    """Trapezoid-rule evaluation of the coefficient integral.

    Uses the uniform periodic grid theta_j = -pi + 2pi*j/S per variable
    (the trapezoid rule with the endpoints identified). The rule is exact
    for band-limited integrands, so the precondition
    samples_per_var > 2 * (max |exponent| in p and e) guarantees agreement
    with `coeff` up to rounding. Kept strictly numerical: the polynomial is
    evaluated pointwise on the full grid.
    """
    e = tuple(int(x) for x in e)
    if len(e) != p.arity:
        raise ValueError(f"exponent arity {len(e)} != polynomial arity {p.arity}")
    for v in range(p.arity):
        bandwidth = max(p.max_abs_exponent(v), abs(e[v]))
        if samples_per_var <= 2 * bandwidth:
            raise InsufficientSamplingError(
                f"variable {v}: {samples_per_var} samples <= 2*{bandwidth} (max |exponent|)"
            )
    s = samples_per_var
    theta = -np.pi + 2.0 * np.pi * np.arange(s) / s
    shape = [1] * p.arity

    def axis_phase(var: int, k: int) -> np.ndarray:
        ph = np.exp(1j * k * theta)
        shp = shape.copy()
        shp[var] = s
        return ph.reshape(shp)

    values = np.zeros((s,) * p.arity, dtype=complex)
    for exps, c in p.terms.items():
        term = np.full((1,) * p.arity, c, dtype=complex)
        for v, k in enumerate(exps):
            term = term * axis_phase(v, k)
        values = values + term
    for v, k in enumerate(e):
        values = values * axis_phase(v, -k)
    result = complex(values.mean())
    if not (np.isfinite(result.real) and np.isfinite(result.imag)):
        raise ArithmeticError("non-finite quadrature result")
    return result


def split_by_var(p: LaurentPoly, var: int) -> dict[int, LaurentPoly]:
    """Group terms by the exponent of one variable.

    Returns {k: q_k} with p = sum_k z_var^k * q_k, where each q_k is a
    polynomial in the remaining arity-1 variables (original order kept).
    """
    if p.arity < 2:
        raise ValueError("split_by_var needs arity >= 2")
    if not 0 <= var < p.arity:
        raise ValueError(f"variable index {var} out of range")
    groups: dict[int, dict[ExponentVec, complex]] = {}
    for exps, c in p.terms.items():
        k = exps[var]
        rest = exps[:var] + exps[var + 1:]
        groups.setdefault(k, {})[rest] = c
    return {k: LaurentPoly(t, p.arity - 1) for k, t in groups.items()}


def coeff_in_var(p: LaurentPoly, var: int, k: int) -> LaurentPoly:
    """Coefficient of z_var^k as a polynomial in the remaining variables."""
    if p.arity < 2:
        raise ValueError("coeff_in_var needs arity >= 2")
    groups: dict[ExponentVec, complex] = {}
    for exps, c in p.terms.items():
        if exps[var] == k:
            groups[exps[:var] + exps[var + 1:]] = c
    return LaurentPoly(groups, p.arity - 1)
