"""Command-line interface: inspection, solving, validation, convergence.

Subcommands
    digits    -- base-b digits of M, Euclidean vs coefficient extraction
    path      -- decode one path index into moves, shifts, and prefactor
    solve     -- discrete solution on evaluation points, CSV output
    converge  -- error-vs-N table against a reference, CSV output
    validate  -- run the built-in identity suites

Every numeric output is printed with 17 significant digits and '\\n' line
endings, so identical flags reproduce byte-identical files. The optional
`--config FILE` reads `key = value` lines ('#' starts a comment); explicit
flags win over file values. `TEG_THREADS` caps the worker count used for
data-parallel evaluation points.

Exit codes: 0 success, 1 validation failure, 2 argument error,
3 runtime/solver error.
"""

from __future__ import annotations

import argparse
import cmath
import math
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from . import baserep, teg
from .laurent import LaurentPoly, coeff, quadrature_coeff
from .potentials import EvalError, ParseError, compile_field
from .propagators import (
    DIFFUSION_1D,
    EquationKind,
    InstanceTooLargeError,
    Kind,
    enumerate_paths,
    evolve,
)
from .reference import stirling_ratio
from .solver import (
    Method,
    Reference,
    SolveConfig,
    convergence_study,
    default_points,
    demoivre_weight,
    solve,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


class UsageError(ValueError):
    pass


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def read_config(path: str) -> dict[str, str]:
    """Parse `key = value` lines; '#' comments and blank lines ignored."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def _merged(args: argparse.Namespace, key: str, cast, default=None, required=False):
    """Flag value, else config-file value, else default."""
    value = getattr(args, key, None)
    if value is None and getattr(args, "_config", None):
        raw = args._config.get(key)
        if raw is not None:
            value = raw
    if value is None:
        if required:
            raise UsageError(f"missing required parameter --{key}")
        return default
    if isinstance(value, str):
        try:
            return cast(value)
        except (ValueError, TypeError) as exc:
            raise UsageError(f"bad value for --{key}: {value!r} ({exc})") from None
    return value


def worker_count() -> int:
    raw = os.environ.get("TEG_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"TEG_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"TEG_THREADS must be a positive integer, got {n}")
    return n


def parse_points(text: str, dim: int) -> list[tuple[float, ...]]:
    """Either 'lo:hi:count' or a comma-separated coordinate list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"range points need lo:hi:count, got {text!r}")
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise UsageError("point count must be >= 1")
        return default_points(dim, lo, hi, count)
    coords = [float(p) for p in text.split(",") if p.strip()]
    if not coords:
        raise UsageError("empty point list")
    if dim == 1:
        return [(c,) for c in coords]
    if len(coords) % dim:
        raise UsageError(f"{len(coords)} coordinates do not fill {dim}-vectors")
    return [tuple(coords[i:i + dim]) for i in range(0, len(coords), dim)]


def _point_label(point: tuple[float, ...]) -> str:
    if len(point) == 1:
        return _fmt(point[0])
    return ";".join(_fmt(c) for c in point)


def _write_lines(lines: list[str], out: str | None) -> None:
    payload = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(payload)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)


# --- subcommands ------------------------------------------------------------


def cmd_digits(args: argparse.Namespace) -> int:
    number = _merged(args, "M", int, required=True)
    base = _merged(args, "base", int, default=2)
    if number < 0:
        raise UsageError("--M must be >= 0")
    if base < 2:
        raise UsageError("--base must be >= 2")
    rep = baserep.digits_euclid(number, base)
    big_n = _merged(args, "N", int, default=max(len(rep.digits) - 1, 0))
    if big_n < 0:
        raise UsageError("--N must be >= 0")
    lines = ["m,euclid,extracted"]
    agree = True
    if number != 0:
        use_exact = baserep.exact_route_available(base, big_n)
        for m in range(big_n + 1):
            euclid = rep.digits[m] if m < len(rep.digits) else 0
            if use_exact:
                extracted = baserep.digit_extract_exact(number, base, m, big_n)
            else:
                extracted = baserep.digit_extract(number, base, m, big_n, check=False)
            agree = agree and euclid == extracted
            lines.append(f"{m},{euclid},{extracted}")
    _write_lines(lines, getattr(args, "out", None))
    if not agree:
        print("digit routes disagree", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_path(args: argparse.Namespace) -> int:
    number = _merged(args, "M", int, required=True)
    order = _merged(args, "order", int, default=2)
    slices = _merged(args, "N", int, required=True)
    spec = _spec_for_order(order, total_time=1.0, slices=slices)
    if not 0 <= number < spec.path_count:
        raise UsageError(f"--M must lie in [0, {spec.path_count})")
    path = teg.path_from_index(number, spec)
    prefactor = teg.path_prefactor(number, spec)
    lines = [f"moves={path.move_string}"]
    for k, shift in enumerate(path.prefix_shifts, start=1):
        label = str(shift[0]) if spec.dim == 1 else ";".join(str(c) for c in shift)
        lines.append(f"step {k}: move={path.moves[k - 1]} shift={label}")
    terminal = path.terminal_shift[0] if spec.dim == 1 else path.terminal_shift
    lines.append(f"S={terminal}")
    lines.append(f"C={_fmt(prefactor.real)}{'+' if prefactor.imag >= 0 else '-'}{_fmt(abs(prefactor.imag))}i")
    _write_lines(lines, getattr(args, "out", None))
    return EXIT_OK


def _spec_for_order(order: int, total_time: float, slices: int) -> teg.TegSpec:
    if order == 2:
        return teg.diffusion_spec(total_time, slices)
    if order >= 3 and order % 2 == 1:
        return teg.tdse_spec(total_time, slices, dim=(order - 1) // 2)
    raise UsageError(f"--order must be 2 or an odd number >= 3, got {order}")


def _build_solve_config(args: argparse.Namespace, need_slices: bool = True) -> tuple[SolveConfig, str]:
    eq = _merged(args, "eq", str, required=True)
    if eq not in ("diffusion", "schrodinger"):
        raise UsageError(f"--eq must be diffusion or schrodinger, got {eq!r}")
    dim = _merged(args, "K", int, default=1)
    if dim < 1:
        raise UsageError("--K must be >= 1")
    kind = EquationKind(Kind.DIFFUSION if eq == "diffusion" else Kind.SCHRODINGER, dim)
    total_time = _merged(args, "T", float, required=True)
    slices = _merged(args, "N", int, required=True) if need_slices else 1
    if total_time < 0:
        raise UsageError("--T must be >= 0")
    if slices < 1:
        raise UsageError("--N must be >= 1")
    potential_src = _merged(args, "potential", str, required=True)
    initial_src = _merged(args, "initial", str, required=True)
    try:
        potential = compile_field(potential_src, dim)
        initial_field = compile_field(initial_src, dim)
    except ParseError as exc:
        raise UsageError(f"expression error: {exc}") from None
    method_name = _merged(args, "method", str, default=Method.LATTICE_DP.value)
    try:
        method = Method(method_name)
    except ValueError:
        raise UsageError(f"unknown --method {method_name!r}") from None
    points_text = _merged(args, "points", str, default=None)
    points = parse_points(points_text, dim) if points_text else default_points(dim)
    config = SolveConfig(
        kind=kind,
        total_time=total_time,
        slices=slices,
        potential=potential,
        # no complex() wrapper: mp-precision lattice samples must pass through
        initial=lambda x: initial_field(x, 0.0),
        points=points,
        method=method,
        potential_is_zero=potential.is_zero(),
    )
    return config, method.value


def _solve_parallel(config: SolveConfig, workers: int) -> list[complex]:
    if workers <= 1 or len(config.points) <= 1:
        return solve(config)

    def one(point: tuple[float, ...]) -> complex:
        single = SolveConfig(
            kind=config.kind,
            total_time=config.total_time,
            slices=config.slices,
            potential=config.potential,
            initial=config.initial,
            points=[point],
            method=config.method,
            potential_is_zero=config.potential_is_zero,
        )
        return solve(single)[0]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, config.points))


def cmd_solve(args: argparse.Namespace) -> int:
    config, method_name = _build_solve_config(args)
    workers = worker_count()
    values = _solve_parallel(config, workers)
    if getattr(args, "verify", False):
        other_method = (
            Method.LATTICE_DP if config.method is Method.COMPACT_ENUMERATE else Method.COMPACT_ENUMERATE
        )
        other = SolveConfig(
            kind=config.kind,
            total_time=config.total_time,
            slices=config.slices,
            potential=config.potential,
            initial=config.initial,
            points=config.points,
            method=other_method,
            potential_is_zero=config.potential_is_zero,
        )
        check = _solve_parallel(other, workers)
        worst = max(abs(a - b) / (1.0 + abs(b)) for a, b in zip(values, check))
        if worst > 1e-10:
            print(f"verify failed: methods differ by {worst:.3e} relative", file=sys.stderr)
            return EXIT_RUNTIME
    lines = ["x,re,im,method,N,T"]
    for point, value in zip(config.points, values):
        lines.append(
            f"{_point_label(point)},{_fmt(value.real)},{_fmt(value.imag)},"
            f"{method_name},{config.slices},{_fmt(config.total_time)}"
        )
    _write_lines(lines, getattr(args, "out", None))
    return EXIT_OK


def cmd_converge(args: argparse.Namespace) -> int:
    config, _ = _build_solve_config(args, need_slices=False)
    nlist_text = _merged(args, "Nlist", str, required=True)
    try:
        slice_list = [int(p) for p in nlist_text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"--Nlist must be comma-separated integers, got {nlist_text!r}") from None
    if not slice_list or slice_list != sorted(set(slice_list)):
        raise UsageError("--Nlist must be strictly increasing")
    ref_name = _merged(args, "reference", str, required=True)
    try:
        reference = Reference(ref_name)
    except ValueError:
        raise UsageError(f"unknown --reference {ref_name!r}") from None
    rows = convergence_study(config, slice_list, reference)
    timings = bool(getattr(args, "timings", False))
    lines = ["N,error,runtime_s"]
    for row in rows:
        runtime = row.runtime_s if timings else 0.0
        lines.append(f"{row.slices},{_fmt(row.error)},{_fmt(runtime)}")
    _write_lines(lines, getattr(args, "out", None))
    return EXIT_OK


# --- validation suites ------------------------------------------------------


def _suite_extraction_vs_quadrature(rng: random.Random) -> str | None:
    for _ in range(40):
        arity = rng.choice([1, 1, 2])
        terms = {}
        for _ in range(rng.randint(1, 12)):
            exps = tuple(rng.randint(-20, 20) for _ in range(arity))
            terms[exps] = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        poly = LaurentPoly(terms, arity)
        probe = tuple(rng.randint(-20, 20) for _ in range(arity))
        exact = coeff(poly, probe)
        quad = quadrature_coeff(poly, probe, 43)
        if abs(quad - exact) > 1e-10 * (1.0 + abs(exact)):
            return f"extraction {exact} vs quadrature {quad}"
    return None


def _suite_digits(rng: random.Random) -> str | None:
    for base in (2, 3, 4, 5):
        big_n = 4
        for number in range(base ** (big_n + 1)):
            rep = baserep.digits_euclid(number, base)
            for m in range(big_n + 1):
                want = rep.digits[m] if m < len(rep.digits) else 0
                got = baserep.digit_extract_exact(number, base, m, big_n)
                if want != got:
                    return f"digit mismatch M={number} b={base} m={m}: {want} vs {got}"
    return None


def _suite_golden_paths(rng: random.Random) -> str | None:
    spec = teg.diffusion_spec(1.0, 5)
    upper = teg.path_from_index(11, spec)
    lower = teg.path_from_index(26, spec)
    if upper.move_string != "11010" or upper.scalar_shifts != (1, 2, 1, 2, 1):
        return f"path 11 decoded as {upper.move_string} {upper.scalar_shifts}"
    if lower.move_string != "01011" or lower.scalar_shifts != (-1, 0, -1, 0, 1):
        return f"path 26 decoded as {lower.move_string} {lower.scalar_shifts}"
    return None


def _suite_prefactor_sum(rng: random.Random) -> str | None:
    for spec in (teg.diffusion_spec(1.0, 10), teg.tdse_spec(1.0, 10)):
        total = sum(teg.path_prefactor(m, spec) for m in range(spec.path_count))
        if abs(total - 1.0) > 1e-12:
            return f"prefactor sum {total} for order {spec.variety_order}"
    spec = teg.diffusion_spec(1.0, 10)
    counts: dict[int, int] = {}
    for m in range(spec.path_count):
        s = teg.path_from_index(m, spec).terminal_shift[0]
        counts[s] = counts.get(s, 0) + 1
    for s, count in counts.items():
        if count != math.comb(spec.slices, (spec.slices - s) // 2):
            return f"path count at shift {s}: {count}"
    return None


def _suite_enumerate_vs_dp(rng: random.Random) -> str | None:
    initial = lambda x: cmath.exp(-x[0] ** 2)
    for eq, slices in ((DIFFUSION_1D, 6), (EquationKind(Kind.SCHRODINGER, 1), 5)):
        potential = compile_field("0.3*x^2 + 0.2*sin(x)*cos(t)", 1)
        spec = eq.default_spec(0.7, slices)
        for x in (-0.5, 0.4):
            a = enumerate_paths(initial, (x,), spec, potential, eq)
            b = evolve(initial, (x,), spec, potential, eq)
            if abs(a - b) > 1e-10 * (1.0 + abs(b)):
                return f"path sum {a} vs lattice {b} at x={x}"
    return None


def _suite_asymptotics(rng: random.Random) -> str | None:
    exact = math.comb(100, 50)
    approx = demoivre_weight(100, 50)
    if abs(approx - exact) / exact > 5e-3:
        return f"binomial approximation off by {abs(approx - exact) / exact:.3e}"
    ratio = stirling_ratio(20)
    if not 1.0 < ratio < math.exp(1.0 / 240.0):
        return f"factorial ratio {ratio} outside bracket"
    return None


_SUITES = [
    ("extraction_vs_quadrature", _suite_extraction_vs_quadrature),
    ("digit_uniqueness", _suite_digits),
    ("golden_paths", _suite_golden_paths),
    ("prefactor_and_path_counts", _suite_prefactor_sum),
    ("path_sum_vs_lattice", _suite_enumerate_vs_dp),
    ("asymptotic_bands", _suite_asymptotics),
]


def cmd_validate(args: argparse.Namespace) -> int:
    rng = random.Random(_merged(args, "seed", int, default=20260809))
    failures = 0
    for name, suite in _SUITES:
        detail = suite(rng)
        if detail is None:
            print(f"PASS {name}")
        else:
            failures += 1
            print(f"FAIL {name}: {detail}")
    return EXIT_OK if failures == 0 else EXIT_VALIDATION


# --- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="teglab", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("digits", help="base-b digits via division and via coefficient extraction")
    p.add_argument("--M", type=int)
    p.add_argument("--base", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--out")
    p.add_argument("--config")
    p.set_defaults(func=cmd_digits)

    p = sub.add_parser("path", help="decode a path index into moves and shifts")
    p.add_argument("--M", type=int)
    p.add_argument("--order", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--out")
    p.add_argument("--config")
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("solve", help="discrete solution at evaluation points (CSV)")
    p.add_argument("--eq")
    p.add_argument("--potential")
    p.add_argument("--initial")
    p.add_argument("--T", type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--method")
    p.add_argument("--points")
    p.add_argument("--out")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--config")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("converge", help="error-vs-N study against a reference (CSV)")
    p.add_argument("--eq")
    p.add_argument("--potential")
    p.add_argument("--initial")
    p.add_argument("--T", type=float)
    p.add_argument("--K", type=int)
    p.add_argument("--Nlist")
    p.add_argument("--reference")
    p.add_argument("--points")
    p.add_argument("--out")
    p.add_argument("--timings", action="store_true")
    p.add_argument("--config")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("validate", help="run the built-in identity suites")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args._config = read_config(args.config) if getattr(args, "config", None) else {}
    except OSError as exc:
        print(f"cannot read config file: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except (InstanceTooLargeError, EvalError, ArithmeticError, ValueError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
