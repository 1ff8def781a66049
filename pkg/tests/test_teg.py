import cmath
import math
import random

import pytest

from teglab.laurent import LaurentPoly, poly_mul
from teglab.potentials import compile_field
from teglab.teg import (
    PathIndexError,
    TegSpec,
    diffusion_spec,
    path_from_index,
    path_prefactor,
    path_prefactor_extract,
    potential_exponent,
    prefix_shift,
    prefix_shift_extract,
    selection_poly,
    selection_poly_dense,
    tdse_spec,
    terminal_shift_extract,
)


def test_diffusion_spec_moves():
    spec = diffusion_spec(1.0, 5)
    assert spec.variety_order == 2
    assert spec.weights == (0.5 + 0j, 0.5 + 0j)
    assert spec.displacements == ((-1,), (1,))
    assert spec.tau == pytest.approx(math.sqrt(0.1))
    assert spec.step_time == pytest.approx(0.2)


def test_tdse_spec_moves():
    spec = tdse_spec(2.0, 4)
    assert spec.variety_order == 3
    assert spec.weights == (1 - 2j, 1j, 1j)
    assert spec.displacements == ((0,), (1,), (-1,))
    spec2 = tdse_spec(2.0, 4, dim=2)
    assert spec2.variety_order == 5
    assert spec2.weights[0] == 1 - 4j
    assert spec2.displacements == ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1))


def test_weights_sum_to_one():
    for spec in (diffusion_spec(1.0, 3), tdse_spec(1.0, 3), tdse_spec(1.0, 3, dim=3)):
        assert sum(spec.weights) == pytest.approx(1.0)


def test_golden_path_upper():
    path = path_from_index(11, diffusion_spec(1.0, 5))
    assert path.moves == (1, 1, 0, 1, 0)
    assert path.move_string == "11010"
    assert path.scalar_shifts == (1, 2, 1, 2, 1)
    assert path.terminal_shift == (1,)


def test_golden_path_lower():
    path = path_from_index(26, diffusion_spec(1.0, 5))
    assert path.moves == (0, 1, 0, 1, 1)
    assert path.move_string == "01011"
    assert path.scalar_shifts == (-1, 0, -1, 0, 1)


def test_path_zero_all_first_move():
    path = path_from_index(0, tdse_spec(1.0, 4))
    assert path.moves == (0, 0, 0, 0)
    assert path.terminal_shift == (0,)
    path = path_from_index(0, diffusion_spec(1.0, 4))
    assert path.terminal_shift == (-4,)


def test_path_index_out_of_range():
    with pytest.raises(PathIndexError):
        path_from_index(32, diffusion_spec(1.0, 5))


def test_prefix_shift_sequences():
    spec = diffusion_spec(1.0, 5)
    assert [prefix_shift(11, k, spec)[0] for k in range(1, 6)] == [1, 2, 1, 2, 1]
    assert [prefix_shift(26, k, spec)[0] for k in range(1, 6)] == [-1, 0, -1, 0, 1]
    spec3 = tdse_spec(1.0, 4)
    assert all(prefix_shift(0, k, spec3) == (0,) for k in range(1, 5))


def test_prefix_shift_step_property():
    rng = random.Random(5)
    spec = tdse_spec(1.0, 7)
    for _ in range(40):
        m = rng.randrange(spec.path_count)
        path = path_from_index(m, spec)
        prev = (0,)
        for k in range(1, spec.slices + 1):
            cur = prefix_shift(m, k, spec)
            move = path.moves[k - 1]
            assert tuple(c - p for c, p in zip(cur, prev)) == spec.displacements[move]
            prev = cur


def test_prefix_shift_extract_agrees():
    spec = diffusion_spec(1.0, 5)
    for m in range(spec.path_count):
        for k in range(1, 6):
            assert prefix_shift_extract(m, k, spec) == prefix_shift(m, k, spec)
    spec8 = diffusion_spec(1.0, 8)
    rng = random.Random(11)
    for _ in range(20):
        m = rng.randrange(spec8.path_count)
        k = rng.randint(1, 8)
        assert prefix_shift_extract(m, k, spec8) == prefix_shift(m, k, spec8)


def test_selection_poly_upper_path_structure():
    # independent construction: product of per-step two-term factors with
    # tracker exponents opposite to the move displacements
    spec = diffusion_spec(1.0, 5)
    moves = (1, 1, 0, 1, 0)
    expected = LaurentPoly.one(2)
    for n, move in enumerate(moves):
        d = spec.displacements[move][0]
        expected = poly_mul(expected, LaurentPoly({(0, 0): 1, (2**n, -d): 1}, 2))
    assert selection_poly(11, spec) == expected


def test_selection_poly_horizontal_moves():
    spec = tdse_spec(1.0, 2)
    poly = selection_poly(0, spec)
    assert poly.terms == {(0, 0): 1 + 0j, (1, 0): 1 + 0j, (2, 0): 1 + 0j, (3, 0): 1 + 0j}


def test_selection_poly_value_at_unit_arguments():
    rng = random.Random(2)
    for spec in (diffusion_spec(1.0, 6), tdse_spec(1.0, 6)):
        for _ in range(10):
            m = rng.randrange(spec.path_count)
            total = sum(selection_poly(m, spec).terms.values())
            assert total == pytest.approx(2**spec.slices)


@pytest.mark.parametrize("make_spec", [diffusion_spec, tdse_spec])
def test_selection_poly_dense_agrees(make_spec):
    spec = make_spec(1.0, 4)
    for m in range(spec.path_count):
        filtered = selection_poly(m, spec)
        dense = selection_poly_dense(m, spec)
        assert filtered.terms.keys() == dense.terms.keys()
        for exps, c in filtered.terms.items():
            assert abs(dense.terms[exps] - c) < 1e-12


def test_selection_poly_dense_sample_n6():
    spec = tdse_spec(1.0, 6)
    rng = random.Random(17)
    for _ in range(8):
        m = rng.randrange(spec.path_count)
        assert selection_poly_dense(m, spec).terms.keys() == selection_poly(m, spec).terms.keys()


def test_prefactor_horizontal():
    assert path_prefactor(0, tdse_spec(1.0, 2)) == (1 - 2j) ** 2


def test_prefactor_diffusion_uniform():
    spec = diffusion_spec(1.0, 9)
    for m in (0, 5, 511):
        assert path_prefactor(m, spec) == pytest.approx(2.0**-9)


@pytest.mark.parametrize("make_spec", [diffusion_spec, tdse_spec])
def test_prefactor_sums_to_one(make_spec):
    spec = make_spec(1.0, 6)
    total = sum(path_prefactor(m, spec) for m in range(spec.path_count))
    assert abs(total - 1.0) < 1e-12


def test_prefactor_extract_agrees():
    spec = tdse_spec(1.0, 5)
    for m in range(spec.path_count):
        assert abs(path_prefactor_extract(m, spec) - path_prefactor(m, spec)) < 1e-12


def test_potential_exponent_zero_potential():
    zero = compile_field("0", 1)
    spec = tdse_spec(1.0, 6)
    for m in (0, 100, 728):
        assert potential_exponent(m, spec, zero, (0.3,), -1j) == 1


def test_potential_exponent_constant_potential():
    const = compile_field("2.5", 1)
    spec = diffusion_spec(0.8, 5)
    for m in (0, 11, 31):
        got = potential_exponent(m, spec, const, (0.1,), 1.0)
        assert got == pytest.approx(cmath.exp(2.5 * 0.8))


def test_potential_exponent_linear_shifted_sum():
    # upper golden path visits shifts 1,2,1,2,1
    linear = compile_field("x", 1)
    spec = diffusion_spec(1.0, 5)
    got = potential_exponent(11, spec, linear, (0.0,), 1.0)
    assert got == pytest.approx(math.exp(spec.step_time * spec.tau * 7))


def test_terminal_shift_extract_golden():
    spec = diffusion_spec(1.0, 5)
    assert terminal_shift_extract(11, spec) == 1
    assert terminal_shift_extract(26, spec) == 1
    assert terminal_shift_extract(0, spec) == -5


def test_terminal_shift_extract_agrees_all():
    spec = diffusion_spec(1.0, 7)
    for m in range(spec.path_count):
        assert terminal_shift_extract(m, spec) == path_from_index(m, spec).terminal_shift[0]


def test_terminal_shift_extract_wrong_spec():
    with pytest.raises(ValueError):
        terminal_shift_extract(0, tdse_spec(1.0, 4))


def test_path_count_by_shift():
    spec = diffusion_spec(1.0, 10)
    counts = {}
    for m in range(spec.path_count):
        s = path_from_index(m, spec).terminal_shift[0]
        counts[s] = counts.get(s, 0) + 1
    for s in range(-10, 11):
        want = math.comb(10, (10 - s) // 2) if (10 - s) % 2 == 0 else 0
        assert counts.get(s, 0) == want


def test_spec_validation():
    with pytest.raises(ValueError):
        TegSpec(1, 3, (1.0,), ((0,),), 1.0)
    with pytest.raises(ValueError):
        TegSpec(2, 0, (0.5, 0.5), ((-1,), (1,)), 1.0)
    with pytest.raises(ValueError):
        TegSpec(2, 3, (0.5, 0.5), ((-1,), (1, 0)), 1.0)
