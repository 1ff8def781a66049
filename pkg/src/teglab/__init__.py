"""teglab: time-sliced parabolic PDE solutions as lattice-path sums.

Two reusable engines back everything: sparse Laurent-polynomial
coefficient extraction (`laurent`, `baserep`) and the translation-grid
path model (`teg`, `propagators`). `solver` assembles discrete solutions
and convergence studies, `reference` provides independent ground truth,
`potentials` the expression language, and `cli` the command line.
"""

from .baserep import BaseRepresentation, digit_extract, digits_euclid, recompose, selection_product
from .laurent import (
    ExponentOverflowError,
    InsufficientSamplingError,
    LaurentPoly,
    coeff,
    poly_mul,
    quadrature_coeff,
    select,
)
from .potentials import EvalError, ParseError, PotentialField, compile_field, parse
from .propagators import (
    DIFFUSION_1D,
    SCHRODINGER_1D,
    EquationKind,
    Kind,
    LatticeState,
    enumerate_paths,
    evolve,
    step,
)
from .reference import matrix_exponential_solve, stirling_approx, stirling_ratio
from .solver import (
    ConvergenceRow,
    Method,
    Reference,
    SolveConfig,
    convergence_study,
    default_points,
    demoivre_weight,
    free_solution_continuous,
    solve,
)
from .teg import (
    Path,
    TegSpec,
    diffusion_spec,
    path_from_index,
    path_prefactor,
    potential_exponent,
    prefix_shift,
    tdse_spec,
)

__version__ = "0.1.0"

__all__ = [
    "BaseRepresentation",
    "ConvergenceRow",
    "DIFFUSION_1D",
    "EquationKind",
    "EvalError",
    "ExponentOverflowError",
    "InsufficientSamplingError",
    "Kind",
    "LatticeState",
    "LaurentPoly",
    "Method",
    "ParseError",
    "Path",
    "PotentialField",
    "Reference",
    "SCHRODINGER_1D",
    "SolveConfig",
    "TegSpec",
    "coeff",
    "compile_field",
    "convergence_study",
    "default_points",
    "demoivre_weight",
    "diffusion_spec",
    "digit_extract",
    "digits_euclid",
    "enumerate_paths",
    "evolve",
    "free_solution_continuous",
    "matrix_exponential_solve",
    "parse",
    "path_from_index",
    "path_prefactor",
    "poly_mul",
    "potential_exponent",
    "prefix_shift",
    "quadrature_coeff",
    "recompose",
    "select",
    "selection_product",
    "solve",
    "step",
    "stirling_approx",
    "stirling_ratio",
    "tdse_spec",
]
