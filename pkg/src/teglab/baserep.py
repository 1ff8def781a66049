"""Base-b integer representations and their generating-polynomial form.

Digits are stored least-significant first, so `digits[m]` is the
coefficient of b^m. The canonical form of 0 is the empty digit list;
otherwise the top digit is nonzero.

Repeated Euclidean division (`digits_euclid`) is the ground-truth oracle.
The same digits can be read off a product polynomial

    prod_{n=0..N} [1 + sum_{k=1..b-1} A_n(k) * z^(k*b^n)]

because representation uniqueness makes every exponent below b^(N+1)
reachable by exactly one choice of one term per factor. `selection_product`
exploits that for arbitrary per-position factor tables, and
`digit_extract` specializes it to read a single digit via a second
selector variable carrying position weights 2^n.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .laurent import LaurentPoly, coeff, poly_mul, split_by_var

# Dense two-variable expansion has (2b-1)^(N+1) terms; cap the work.
_EXACT_TERM_CAP = 2_000_000
_EXACT_N_CAP = 8


class InvalidBaseError(ValueError):
    """Representation base must be an integer >= 2."""


class InvalidDigitError(ValueError):
    """A digit fell outside the range 0 <= a < b."""


class DigitMismatchError(AssertionError):
    """The two digit-extraction routes disagreed (internal inconsistency)."""


@dataclass(frozen=True)
class BaseRepresentation:
    """Digits of `number` in base `base`, least-significant first."""

    base: int
    digits: tuple[int, ...]
    number: int

    def __post_init__(self):
        if self.base < 2:
            raise InvalidBaseError(f"base must be >= 2, got {self.base}")
        for a in self.digits:
            if not 0 <= a < self.base:
                raise InvalidDigitError(f"digit {a} out of range for base {self.base}")

    @property
    def length(self) -> int:
        """Index of the highest digit position (0 for single-digit numbers)."""
        return max(len(self.digits) - 1, 0)


def digits_euclid(number: int, base: int) -> BaseRepresentation:
    """Canonical digits by repeated Euclidean division (the oracle)."""
    if base < 2:
        raise InvalidBaseError(f"base must be >= 2, got {base}")
    if number < 0:
        raise ValueError(f"number must be >= 0, got {number}")
    m = number
    digits: list[int] = []
    while m:
        m, r = divmod(m, base)
        digits.append(r)
    return BaseRepresentation(base=base, digits=tuple(digits), number=number)


def recompose(rep: BaseRepresentation) -> int:
    """Reassemble sum a_m * b^m; inverse of digits_euclid."""
    total = 0
    power = 1
    for a in rep.digits:
        if not 0 <= a < rep.base:
            raise InvalidDigitError(f"digit {a} out of range for base {rep.base}")
        total += a * power
        power *= rep.base
    return total


def padded_digits(number: int, base: int, length: int) -> tuple[int, ...]:
    """Digits padded with zeros to exactly `length` positions."""
    d = digits_euclid(number, base).digits
    if len(d) > length:
        raise ValueError(f"{number} needs {len(d)} digits in base {base}, got length {length}")
    return d + (0,) * (length - len(d))


def selection_product(number: int, base: int, big_n: int, factors) -> complex:
    """Product of per-position factors selected by the digits of `number`.

    `factors(n, k)` gives the scalar attached to digit value k >= 1 at
    position n (digit 0 always contributes 1). Equals the coefficient of
    z^number in prod_{n=0..big_n} [1 + sum_k factors(n,k) z^(k b^n)]; by
    representation uniqueness this needs no polynomial expansion. Numbers
    at or beyond base^(big_n+1) are unreachable and return 0.
    """
    if base < 2:
        raise InvalidBaseError(f"base must be >= 2, got {base}")
    if number < 0:
        raise ValueError("number must be >= 0")
    if number >= base ** (big_n + 1):
        return 0j
    result = 1.0 + 0j
    for n, a in enumerate(padded_digits(number, base, big_n + 1)):
        if a:
            result *= factors(n, a)
    return result


def digit_structure(base: int, big_n: int) -> LaurentPoly:
    """Dense two-variable digit polynomial (z = number selector, w = position selector).

    prod_{n=0..big_n} [1 + sum_{k=1..base-1} (1 + k*w^(2^n)) z^(k*base^n)].
    The coefficient of z^M w^(2^m) is the digit a_m(base, M): the z-exponent
    pins every digit choice, and 2^m is reachable in the position variable
    only by taking the w-term at position m alone.
    """
    if base < 2:
        raise InvalidBaseError(f"base must be >= 2, got {base}")
    if big_n > _EXACT_N_CAP or (2 * base - 1) ** (big_n + 1) > _EXACT_TERM_CAP:
        raise ValueError(f"dense digit structure too large for base={base}, N={big_n}")
    result = LaurentPoly.one(2)
    for n in range(big_n + 1):
        terms = {(0, 0): 1.0 + 0j}
        for k in range(1, base):
            terms[(k * base**n, 0)] = 1.0 + 0j
            terms[(k * base**n, 2**n)] = float(k)
        result = poly_mul(result, LaurentPoly(terms, 2))
    return result


@functools.lru_cache(maxsize=16)
def _structure_slices(base: int, big_n: int) -> dict[int, LaurentPoly]:
    """digit_structure grouped by the number-selector exponent."""
    return split_by_var(digit_structure(base, big_n), 0)


def exact_route_available(base: int, big_n: int) -> bool:
    return big_n <= _EXACT_N_CAP and (2 * base - 1) ** (big_n + 1) <= _EXACT_TERM_CAP


def digit_extract_exact(number: int, base: int, position: int, big_n: int) -> int:
    """Digit a_position(base, number) by dense coefficient extraction.

    Independent of Euclidean division: expands the full digit polynomial
    and reads one coefficient. Guarded to small sizes; numbers at or
    beyond base^(big_n+1) give 0 in every position.
    """
    slices = _structure_slices(base, big_n)
    w_poly = slices.get(number)
    if w_poly is None:
        return 0
    value = coeff(w_poly, (2**position,))
    nearest = round(value.real)
    if abs(value - nearest) > 1e-6:
        raise ArithmeticError(f"non-integer digit coefficient {value}")
    return int(nearest)


def digit_extract(number: int, base: int, position: int, big_n: int, check: bool | None = None) -> int:
    """Digit a_position(base, number), zero outside the representable range.

    The fast route filters the digits directly. When `check` is true (the
    default wherever the dense expansion is affordable) the coefficient
    route is evaluated too and the two must agree.
    """
    if number >= base ** (big_n + 1):
        fast = 0
    else:
        padded = padded_digits(number, base, big_n + 1)
        fast = padded[position] if position < len(padded) else 0
    if check is None:
        check = exact_route_available(base, big_n)
    if check:
        exact = digit_extract_exact(number, base, position, big_n)
        if exact != fast:
            raise DigitMismatchError(
                f"digit routes disagree for M={number}, b={base}, m={position}, N={big_n}: "
                f"euclid={fast}, coefficient={exact}"
            )
    return fast
