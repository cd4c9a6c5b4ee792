"""quatode: linear quaternion-valued differential equations.

Quaternion matrix algebra (permutation determinant, double determinant,
entrywise inverse, complex adjoint, exponential, right eigenpairs), a small
expression language for quaternion-valued functions of t, and a
variation-of-constants solver for dx/dt = A(t) x + f(t) with initial-value
and periodic boundary-value modes.
"""

from .quat import I, J, K, ONE, ZERO, Quaternion, as_quaternion, qexp
from .qlinalg import (DETP_MAX_SIZE, EigenpairError, NormalCycleForm,
                      Permutation, QMatrix, QVector, ShapeError,
                      SingularMatrixError, complex_adjoint, conj_transpose,
                      ddet, det_p, expm, from_complex_adjoint, inverse,
                      normal_cycle_form, right_eigenpairs,
                      singular_tolerance, w_entry)
from .qexpr import (EvalError, ExprMatrix, ParseError, depends_on_t,
                    eval_matrix, eval_vector, evaluate, parse, parse_vector,
                    render)
from .qode import (FundamentalMatrix, Problem, QuadratureError,
                   SolutionTable, fundamental_constant, fundamental_eigen,
                   fundamental_numeric, fundamental_table, general_solution,
                   particular_integral, solve_ivp, solve_periodic)
from .verify import compare, residual_max

__version__ = "0.1.0"

__all__ = [
    "Quaternion", "qexp", "as_quaternion", "ZERO", "ONE", "I", "J", "K",
    "QMatrix", "QVector", "Permutation", "NormalCycleForm",
    "normal_cycle_form", "det_p", "conj_transpose", "ddet", "w_entry",
    "inverse", "complex_adjoint", "from_complex_adjoint", "expm",
    "right_eigenpairs", "singular_tolerance", "DETP_MAX_SIZE",
    "ShapeError", "SingularMatrixError", "EigenpairError",
    "parse", "evaluate", "render", "depends_on_t", "parse_vector",
    "ExprMatrix", "eval_matrix", "eval_vector", "ParseError", "EvalError",
    "Problem", "FundamentalMatrix", "SolutionTable", "QuadratureError",
    "fundamental_constant", "fundamental_eigen", "fundamental_numeric",
    "fundamental_table", "particular_integral", "general_solution",
    "solve_ivp", "solve_periodic",
    "residual_max", "compare",
]
