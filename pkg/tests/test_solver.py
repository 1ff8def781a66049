import cmath
import math
import random

import pytest

from teglab.potentials import compile_field
from teglab.propagators import DIFFUSION_1D, SCHRODINGER_1D
from teglab.solver import (
    ConvergenceRow,
    Method,
    Reference,
    SolveConfig,
    binomial_free_value,
    convergence_study,
    default_points,
    demoivre_weight,
    free_solution_continuous,
    solve,
)

ZERO = compile_field("0", 1)
SQUARE = lambda x: complex(x[0] ** 2)
GAUSS = lambda x: cmath.exp(-x[0] ** 2)


def _config(**kw):
    base = dict(
        kind=DIFFUSION_1D,
        total_time=1.0,
        slices=8,
        potential=ZERO,
        initial=SQUARE,
        points=default_points(),
        method=Method.LATTICE_DP,
        potential_is_zero=True,
    )
    base.update(kw)
    return SolveConfig(**base)


def test_solve_quadratic_every_method():
    for method in (Method.LATTICE_DP, Method.COMPACT_ENUMERATE, Method.BINOMIAL_CLOSED_FORM):
        values = solve(_config(method=method))
        for (x, *_), v in zip(default_points(), values):
            assert v == pytest.approx(x**2 + 0.5, abs=1e-12)


def test_solve_matches_binomial_closed_form_large_n():
    for n in (1, 7, 19, 30):
        cfg = _config(slices=n, initial=GAUSS)
        dp = solve(cfg)
        closed = [binomial_free_value(GAUSS, p, 1.0, n) for p in cfg.points]
        for a, b in zip(dp, closed):
            assert abs(a - b) <= 1e-12 * (1 + abs(b))


def test_binomial_method_guard():
    cfg = _config(method=Method.BINOMIAL_CLOSED_FORM, potential_is_zero=False)
    with pytest.raises(ValueError):
        solve(cfg)
    cfg = _config(method=Method.BINOMIAL_CLOSED_FORM, kind=SCHRODINGER_1D)
    with pytest.raises(ValueError):
        solve(cfg)


def test_method_equivalence_with_potential():
    pot = compile_field("0.3*x^2 + 0.2*cos(t)", 1)
    cfg = _config(potential=pot, potential_is_zero=False, slices=6, initial=GAUSS)
    dp = solve(cfg)
    en = solve(_config(potential=pot, potential_is_zero=False, slices=6, initial=GAUSS,
                       method=Method.COMPACT_ENUMERATE))
    for a, b in zip(dp, en):
        assert abs(a - b) <= 1e-10 * (1 + abs(b))


def test_schrodinger_free_gaussian_converges():
    def free_tdse(x, t):
        a = 1 + 2j * t
        return cmath.exp(-x * x / a) / cmath.sqrt(a)

    errors = []
    for n in (8, 16, 32):
        cfg = _config(kind=SCHRODINGER_1D, slices=n, initial=GAUSS, points=[(0.5,)])
        errors.append(abs(solve(cfg)[0] - free_tdse(0.5, 1.0)))
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 0.01


def test_free_solution_quadratic():
    assert free_solution_continuous(SQUARE, 1.2, 0.8) == pytest.approx(1.2**2 + 0.4, abs=1e-12)


def test_free_solution_normalization():
    one = lambda x: 1.0
    assert free_solution_continuous(one, 0.3, 2.0) == pytest.approx(1.0)


def test_free_solution_zero_time():
    assert free_solution_continuous(GAUSS, 0.7, 0.0) == pytest.approx(GAUSS((0.7,)))


def test_demoivre_at_centre():
    exact = math.comb(100, 50)
    approx = demoivre_weight(100, 50)
    rel = abs(approx - exact) / exact
    assert rel == pytest.approx(0.0025, abs=3e-4)
    assert rel < 0.005


def test_demoivre_n16():
    exact = math.comb(16, 8)
    assert abs(demoivre_weight(16, 8) - exact) / exact < 0.02


def test_demoivre_peak_at_centre():
    values = [demoivre_weight(20, k) for k in range(21)]
    assert max(range(21), key=lambda k: values[k]) == 10
    assert values[3] == pytest.approx(values[17])


def test_convergence_diffusion_first_order():
    cfg = _config(initial=GAUSS)
    rows = convergence_study(cfg, [16, 32, 64, 128], Reference.FREE_CONTINUOUS)
    errors = [r.error for r in rows]
    for a, b in zip(errors, errors[1:]):
        assert 1.6 <= a / b <= 2.4


def test_convergence_zero_time():
    cfg = _config(total_time=0.0, initial=GAUSS)
    rows = convergence_study(cfg, [4, 8], Reference.FREE_CONTINUOUS)
    assert all(r.error == 0 for r in rows)


def test_convergence_requires_increasing_list():
    with pytest.raises(ValueError):
        convergence_study(_config(), [8, 4], Reference.FREE_CONTINUOUS)


def test_free_reference_requires_zero_potential():
    pot = compile_field("x^2", 1)
    cfg = _config(potential=pot, potential_is_zero=False)
    with pytest.raises(ValueError):
        convergence_study(cfg, [4, 8], Reference.FREE_CONTINUOUS)


def test_solve_linear_in_initial_data():
    rng = random.Random(9)
    pot = compile_field("0.2*x^2", 1)
    f = lambda x: cmath.exp(-x[0] ** 2)
    g = lambda x: complex(math.sin(x[0]))
    for _ in range(4):
        a, b = rng.uniform(-2, 2), rng.uniform(-2, 2)
        combo = lambda x: a * f(x) + b * g(x)
        kw = dict(potential=pot, potential_is_zero=False, slices=5, points=[(0.4,), (-1.0,)])
        vf = solve(_config(initial=f, **kw))
        vg = solve(_config(initial=g, **kw))
        vc = solve(_config(initial=combo, **kw))
        for cf, cg, cc in zip(vf, vg, vc):
            assert cc == pytest.approx(a * cf + b * cg, rel=1e-12, abs=1e-12)


def test_convergence_row_rejects_negative_error():
    with pytest.raises(ValueError):
        ConvergenceRow(slices=4, error=-1.0, runtime_s=0.0)


def test_default_points_grid():
    pts = default_points()
    assert len(pts) == 11
    assert pts[0] == (-2.0,)
    assert pts[-1] == (2.0,)
    assert default_points(dim=2)[3] == (pytest.approx(-0.8), 0.0)
