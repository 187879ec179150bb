"""Numerical p-calculus: the difference operator for the node map t -> t**p,
lattice integrals, and the associated calculus of variations."""

from .deriv import p_derivative, p_derivative_boundary, p_derivative_n
from .errors import (
    ConvergenceError,
    DivergenceError,
    DomainError,
    ExpressionError,
    ExpressionSyntaxError,
    LatticeMismatchError,
    MissingBindingError,
    NonFiniteValueError,
    NumericalError,
    PCalcError,
    TruncationError,
    UnknownIdentifierError,
    UnresolvedNodeError,
)
from .expr import Expression, parse
from .integrate import (
    IntegralResult,
    QuadratureRule,
    by_parts_residual,
    ftc_residual,
    integral_from_0,
    integral_from_1,
    integral_to_1,
    integral_zero_one,
    lattice_rule,
    p_integral,
    p_integral_n,
)
from .lattice import (
    LatticeRay,
    PLattice,
    PParam,
    TruncationPolicy,
    common_lattice_index,
    quadrature_lattice,
    ray,
    union_lattice,
)

from .variational import (
    GridFunction,
    Lagrangian,
    VariationalProblem,
    admissible,
    admissible_variation,
    convexity_probe,
    el_residual,
    first_variation,
    functional_value,
    fundamental_lemma_probe,
    solve_common_lattice,
    y_norm,
)

__version__ = "0.1.0"
