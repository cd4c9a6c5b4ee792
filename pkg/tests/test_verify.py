import numpy as np
import pytest

from quatode import (SolutionTable, compare, eval_vector, parse,
                     residual_max, solve_ivp)

from helpers import (DIAG_A, DIAG_F, DIAG_REF, TRI_A, TRI_F, TRI_REF,
                     diag_problem)


def _table_from_exprs(exprs, t0, t_end, samples) -> SolutionTable:
    ts = np.linspace(t0, t_end, samples)
    vals = np.stack([eval_vector(exprs, float(t)).data[:, 0, :] for t in ts])
    return SolutionTable(times=ts, values=vals, metadata={"n": len(exprs)})


def test_residual_of_exact_diag_solution():
    tab = _table_from_exprs(DIAG_REF, 0.0, 1.0, 101)
    r = residual_max(tab, DIAG_A, DIAG_F)
    assert 0.0 < r <= 1e-4
    assert tab.residuals is not None and len(tab.residuals) == 101


def test_residual_of_exact_triangular_solution():
    tab = _table_from_exprs(TRI_REF, 0.0, 1.0, 101)
    assert residual_max(tab, TRI_A, TRI_F) <= 1e-4


def test_residual_zero_for_constant_solution():
    # Dyadic grid spacing keeps the difference coefficients exact.
    tab = _table_from_exprs(["1+2*i", "j"], 0.0, 2.0, 9)
    assert residual_max(tab, [["0", "0"], ["0", "0"]], None) == 0.0
    assert np.max(tab.residuals) == 0.0


def test_residual_quadratic_decay_on_sample_quadrupling():
    r100 = residual_max(_table_from_exprs(DIAG_REF, 0.0, 1.0, 101),
                        DIAG_A, DIAG_F)
    r400 = residual_max(_table_from_exprs(DIAG_REF, 0.0, 1.0, 401),
                        DIAG_A, DIAG_F)
    assert 12.0 <= r100 / r400 <= 20.0


def test_residual_requires_five_samples():
    tab = _table_from_exprs(["t"], 0.0, 1.0, 4)
    with pytest.raises(ValueError):
        residual_max(tab, [["0"]], None)


def test_residual_endpoints_recorded_but_not_in_max():
    tab = _table_from_exprs(DIAG_REF, 0.0, 1.0, 101)
    r = residual_max(tab, DIAG_A, DIAG_F)
    assert r == float(np.max(tab.residuals[1:-1]))
    # One-sided endpoint estimates are larger but still finite.
    assert np.all(np.isfinite(tab.residuals))


def test_compare_solution_to_itself_is_zero():
    sol = solve_ivp(diag_problem(samples=21))
    assert compare(sol, sol) == 0.0


def test_compare_against_reference_expressions():
    sol = solve_ivp(diag_problem())
    assert compare(sol, DIAG_REF) <= 1e-8
    assert compare(sol, [parse(e) for e in DIAG_REF]) <= 1e-8


def test_compare_between_tables():
    a = _table_from_exprs(["t"], 0.0, 1.0, 11)
    b = _table_from_exprs(["t+1"], 0.0, 1.0, 11)
    assert compare(a, b) == 1.0


def test_compare_rejects_mismatched_grids():
    a = _table_from_exprs(["t"], 0.0, 1.0, 11)
    b = _table_from_exprs(["t"], 0.0, 1.0, 12)
    with pytest.raises(ValueError):
        compare(a, b)


def test_compare_propagates_reference_errors():
    sol = solve_ivp(diag_problem(samples=21))
    with pytest.raises(Exception):
        compare(sol, ["sin(i)", "0"])
