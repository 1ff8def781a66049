import cmath
import math
import random

import pytest

from teglab.potentials import compile_field
from teglab.propagators import (
    DIFFUSION_1D,
    SCHRODINGER_1D,
    EquationKind,
    InstanceTooLargeError,
    Kind,
    delta_state,
    enumerate_paths,
    evolve,
    step,
    working_digits,
)
from teglab.teg import diffusion_spec, tdse_spec

ZERO = compile_field("0", 1)


def test_step_diffusion_delta():
    spec = diffusion_spec(1.0, 4)
    out = step(delta_state((0.0,), spec), 4, spec, ZERO, DIFFUSION_1D)
    assert out.weights == {(-1,): 0.5 + 0j, (1,): 0.5 + 0j}


def test_step_schrodinger_delta():
    spec = tdse_spec(1.0, 4)
    out = step(delta_state((0.0,), spec), 4, spec, ZERO, SCHRODINGER_1D)
    assert out.weights == {(0,): 1 - 2j, (1,): 1j, (-1,): 1j}


def test_step_constant_potential_factor():
    spec = diffusion_spec(1.0, 4)
    const = compile_field("1.7", 1)
    base = step(delta_state((0.0,), spec), 2, spec, ZERO, DIFFUSION_1D)
    shifted = step(delta_state((0.0,), spec), 2, spec, const, DIFFUSION_1D)
    factor = math.exp(spec.step_time * 1.7)
    for s, w in base.weights.items():
        assert shifted.weights[s] == pytest.approx(w * factor)


def test_step_slice_range():
    spec = diffusion_spec(1.0, 4)
    with pytest.raises(ValueError):
        step(delta_state((0.0,), spec), 5, spec, ZERO, DIFFUSION_1D)


def test_evolve_quadratic_closed_form():
    # exact for quadratic data: the lattice second moment equals T/2
    square = lambda x: complex(x[0] ** 2)
    for n in (1, 2, 7):
        spec = diffusion_spec(1.0, n)
        for x in (-1.5, 0.0, 2.0):
            got = evolve(square, (x,), spec, ZERO, DIFFUSION_1D)
            assert got == pytest.approx(x**2 + 0.5, abs=1e-12)


def test_evolve_matches_binomial_expansion():
    gauss = lambda x: complex(math.exp(-x[0] ** 2))
    for n in (3, 6, 11):
        spec = diffusion_spec(0.7, n)
        tau = spec.tau
        for x in (-0.4, 0.9):
            want = 2.0**-n * sum(
                math.comb(n, k) * math.exp(-((x + (n - 2 * k) * tau) ** 2)) for k in range(n + 1)
            )
            got = evolve(gauss, (x,), spec, ZERO, DIFFUSION_1D)
            assert got == pytest.approx(want, rel=1e-13)


def test_evolve_schrodinger_constant_state():
    one = lambda x: 1.0 + 0j
    spec = tdse_spec(1.0, 1)
    assert evolve(one, (0.2,), spec, ZERO, SCHRODINGER_1D) == pytest.approx(1.0)


def test_enumerate_single_slice_expansion():
    # three explicit terms for one slice of the three-move stencil
    spec = tdse_spec(0.9, 1)
    pot = compile_field("0.3*x^2 + 0.1*t", 1)
    init = lambda x: complex(math.cos(x[0]))
    x = 0.4
    t = spec.step_time
    tau = spec.tau
    terms = [
        (1 - 2j) * cmath.exp(-1j * t * pot((x,), 0.9)) * init((x,)),
        1j * cmath.exp(-1j * t * pot((x + tau,), 0.9)) * init((x + tau,)),
        1j * cmath.exp(-1j * t * pot((x - tau,), 0.9)) * init((x - tau,)),
    ]
    got = enumerate_paths(init, (x,), spec, pot, SCHRODINGER_1D)
    assert got == pytest.approx(sum(terms))


def _random_expression(rng):
    a, b, c = (round(rng.uniform(-0.6, 0.6), 3) for _ in range(3))
    shape = rng.choice(
        [
            f"{a}*x^2 + {b}*x + {c}",
            f"{a}*exp(-x^2) + {b}*cos(t)",
            f"{a}*sin(x) + {b}*x*t",
            f"{a}*x^2*cos({abs(b) + 0.2}*t)",
        ]
    )
    return compile_field(shape, 1)


def test_enumerate_equals_evolve_randomized():
    rng = random.Random(42)
    gauss = lambda x: cmath.exp(-x[0] ** 2)
    for _ in range(12):
        pot = _random_expression(rng)
        n = rng.randint(1, 8)
        spec = diffusion_spec(rng.uniform(0.2, 1.4), n)
        x = (rng.uniform(-1.5, 1.5),)
        a = enumerate_paths(gauss, x, spec, pot, DIFFUSION_1D)
        b = evolve(gauss, x, spec, pot, DIFFUSION_1D)
        assert abs(a - b) <= 1e-10 * (1 + abs(b))
    for _ in range(6):
        pot = _random_expression(rng)
        n = rng.randint(1, 6)
        spec = tdse_spec(rng.uniform(0.2, 1.2), n)
        x = (rng.uniform(-1.5, 1.5),)
        a = enumerate_paths(gauss, x, spec, pot, SCHRODINGER_1D)
        b = evolve(gauss, x, spec, pot, SCHRODINGER_1D)
        assert abs(a - b) <= 1e-10 * (1 + abs(b))


def test_enumerate_equals_evolve_extended_precision():
    # past the double-precision loss threshold both sides escalate
    spec = tdse_spec(0.8, 8)
    assert working_digits(spec) > 0
    pot = compile_field("0.4*x^2 + 0.2*sin(t)", 1)
    gauss = lambda x: cmath.exp(-x[0] ** 2)
    a = enumerate_paths(gauss, (0.5,), spec, pot, SCHRODINGER_1D)
    b = evolve(gauss, (0.5,), spec, pot, SCHRODINGER_1D)
    assert abs(a - b) <= 1e-10 * (1 + abs(b))


def test_enumerate_equals_evolve_two_dimensional():
    kind = EquationKind(Kind.SCHRODINGER, 2)
    pot = compile_field("0.2*x1^2 + 0.3*x2^2", 2)
    init = lambda x: cmath.exp(-x[0] ** 2 - 0.5 * x[1] ** 2)
    for n in (1, 2, 4):
        spec = tdse_spec(0.6, n, dim=2)
        a = enumerate_paths(init, (0.3, -0.2), spec, pot, kind)
        b = evolve(init, (0.3, -0.2), spec, pot, kind)
        assert abs(a - b) <= 1e-10 * (1 + abs(b))


def test_diffusion_weights_conserved():
    spec = diffusion_spec(1.0, 8)
    state = delta_state((0.0,), spec)
    for n in range(8, 0, -1):
        state = step(state, n, spec, ZERO, DIFFUSION_1D)
        total = sum(state.weights.values())
        assert total == pytest.approx(1.0, abs=1e-12)
        assert all(w.real >= 0 and abs(w.imag) < 1e-15 for w in state.weights.values())


def test_schrodinger_weight_sum_unity():
    spec = tdse_spec(1.0, 8)
    state = delta_state((0.0,), spec)
    for n in range(8, 0, -1):
        state = step(state, n, spec, ZERO, SCHRODINGER_1D)
        assert abs(sum(state.weights.values()) - 1.0) < 1e-12


def test_support_bound():
    spec = tdse_spec(1.0, 6)
    pot = compile_field("0.1*x^2", 1)
    state = delta_state((0.0,), spec)
    for i, n in enumerate(range(6, 0, -1), start=1):
        state = step(state, n, spec, pot, SCHRODINGER_1D)
        assert state.support_radius() <= i


def test_enumeration_guard():
    spec = diffusion_spec(1.0, 24)
    with pytest.raises(InstanceTooLargeError):
        enumerate_paths(lambda x: 1.0, (0.0,), spec, ZERO, DIFFUSION_1D)


def test_working_digits_rule():
    assert working_digits(diffusion_spec(1.0, 500)) == 0
    assert working_digits(tdse_spec(1.0, 6)) == 0
    assert working_digits(tdse_spec(1.0, 32)) > 0


def test_diffusion_kind_is_one_dimensional():
    with pytest.raises(ValueError):
        EquationKind(Kind.DIFFUSION, 2)
