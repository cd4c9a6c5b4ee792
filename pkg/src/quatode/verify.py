"""Independent verification utilities: residual checks and closed-form
comparison for solution tables."""

from __future__ import annotations

import numpy as np

from .qexpr import ExprMatrix, eval_matrix, eval_vector, parse
from .qlinalg import QMUL
from .qode import SolutionTable


def _derivative(times: np.ndarray, values: np.ndarray) -> np.ndarray:
    # Central differences inside, 2nd-order one-sided at both endpoints.
    return np.gradient(values, times, axis=0, edge_order=2)


def residual_max(sol: SolutionTable, A: ExprMatrix, f=None) -> float:
    """Max finite-difference residual |D_h x - A(t) x - f(t)| over the
    interior samples (max-abs over the 4n real components).

    Also writes the per-sample residuals (endpoints included, one-sided
    differences there) into sol.residuals.
    """
    S = len(sol)
    if S < 5:
        raise ValueError(f"residual check needs at least 5 samples, got {S}")
    if isinstance(A, (list, tuple)):
        A = ExprMatrix.parse(A)
    times = sol.times
    deriv = _derivative(times, sol.values)
    At = np.stack([eval_matrix(A, t).data for t in times])
    if sol.metadata.get("layout") == "matrix":
        n = A.rows
        vals = sol.values.reshape(S, n, n, 4)
        ax = np.einsum("sika,skjb,abc->sijc", At, vals, QMUL)
        r = deriv.reshape(S, n, n, 4) - ax
        res = np.max(np.abs(r), axis=(1, 2, 3))
    else:
        ax = np.einsum("sika,skb,abc->sic", At, sol.values, QMUL)
        r = deriv - ax
        if f is not None:
            ft = np.stack([eval_vector(f, t).data[:, 0, :] for t in times])
            r = r - ft
        res = np.max(np.abs(r), axis=(1, 2))
    sol.residuals = res
    return float(np.max(res[1:-1]))


def compare(sol: SolutionTable, reference) -> float:
    """Sup-norm distance between a solution table and a reference.

    reference is either another SolutionTable on the same time grid or a
    vector of expressions (strings or ASTs) evaluated at sol.times.
    """
    if isinstance(reference, SolutionTable):
        if len(reference) != len(sol) or \
                float(np.max(np.abs(reference.times - sol.times))) > 1e-12:
            raise ValueError("reference table is on a different time grid")
        return float(np.max(np.abs(sol.values - reference.values)))
    exprs = [parse(e) if isinstance(e, str) else e for e in reference]
    ref = np.stack([eval_vector(exprs, t).data[:, 0, :] for t in sol.times])
    return float(np.max(np.abs(sol.values - ref)))
