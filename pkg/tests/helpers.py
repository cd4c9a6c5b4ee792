"""Shared oracles and reference data for the test suite.

Everything here is deliberately independent of the library code paths it
checks: the quaternion product oracle expands over the multiplication
table, the determinant oracle is a cofactor expansion on floats, the
exponential oracle is a truncated power series, and quadrature oracles are
fixed-grid composite Simpson sums.
"""

from __future__ import annotations

import math

import numpy as np

from quatode import ExprMatrix, Problem, QMatrix, Quaternion

# -- the two worked initial-value problems ----------------------------------

DIAG_A = [["j", "0"], ["0", "k"]]
DIAG_F = ["(t^2+1)*i", "t*j"]
DIAG_X0 = ["j", "k"]
DIAG_REF = [
    "2*t*i + exp(j*t)*j - (t^2 + exp(j*t) - 1)*k",
    "-t*i + (1 - exp(k*t))*j + exp(k*t)*k",
]

TRI_A = [["i", "0"], ["1", "1+i"]]
TRI_F = ["i", "t*k"]
TRI_X0 = ["i", "-i"]
TRI_REF = [
    "(i+1)*exp(i*t) - 1",
    "(1 + exp((1+i)*t) - 2*exp(i*t))/2 + (exp((1+i)*t) - 1 - 2*exp(i*t))/2*i"
    " + (exp((1+i)*t) - t - 1)/2*j - t/2*k",
]

# Closed-form fundamental matrix of the triangular system (columns
# nu_m e^{lambda_m t} for nu_1 = (i, -i), nu_2 = (0, 1)).
TRI_PHI = [["i*exp(i*t)", "0"], ["-i*exp(i*t)", "exp((1+i)*t)"]]
TRI_PHI_INV = [["-i*exp(-i*t)", "0"], ["exp(-(1+i)*t)", "exp(-(1+i)*t)"]]

DIAG_PHI = [["exp(j*t)", "0"], ["0", "exp(k*t)"]]


def diag_problem(**overrides) -> Problem:
    kw = dict(n=2, A=DIAG_A, mode="ivp", f=DIAG_F, x0=DIAG_X0,
              t0=0.0, t_end=1.0, samples=101, quad_tol=1e-10)
    kw.update(overrides)
    return Problem(**kw)


def tri_problem(**overrides) -> Problem:
    kw = dict(n=2, A=TRI_A, mode="ivp", f=TRI_F, x0=TRI_X0,
              t0=0.0, t_end=1.0, samples=101, quad_tol=1e-10)
    kw.update(overrides)
    return Problem(**kw)


# -- independent oracles ------------------------------------------------------

# Multiplication table e_a e_b = sign * e_c, indices 0..3 for 1, i, j, k.
_TABLE = {
    (0, 0): (0, 1), (0, 1): (1, 1), (0, 2): (2, 1), (0, 3): (3, 1),
    (1, 0): (1, 1), (1, 1): (0, -1), (1, 2): (3, 1), (1, 3): (2, -1),
    (2, 0): (2, 1), (2, 1): (3, -1), (2, 2): (0, -1), (2, 3): (1, 1),
    (3, 0): (3, 1), (3, 1): (2, 1), (3, 2): (1, -1), (3, 3): (0, -1),
}


def mul_oracle(a: Quaternion, b: Quaternion) -> Quaternion:
    """Brute-force 4x4 componentwise expansion over the multiplication table."""
    av = (a.w, a.x, a.y, a.z)
    bv = (b.w, b.x, b.y, b.z)
    out = [0.0, 0.0, 0.0, 0.0]
    for p in range(4):
        for r in range(4):
            c, sign = _TABLE[p, r]
            out[c] += sign * av[p] * bv[r]
    return Quaternion(*out)


def cofactor_det(M: list) -> float:
    """Recursive cofactor expansion of a real matrix given as nested lists."""
    n = len(M)
    if n == 1:
        return M[0][0]
    total = 0.0
    for c in range(n):
        minor = [row[:c] + row[c + 1:] for row in M[1:]]
        total += (-1.0) ** c * M[0][c] * cofactor_det(minor)
    return total


def qexp_series(q: Quaternion, terms: int = 30) -> Quaternion:
    """Power series sum_{m<terms} q^m / m!."""
    out = Quaternion(1.0)
    power = Quaternion(1.0)
    for m in range(1, terms):
        power = power * q
        out = out + power * (1.0 / math.factorial(m))
    return out


def composite_simpson(g, a: float, b: float, panels: int) -> np.ndarray:
    """Fixed-grid composite Simpson on a vector-valued integrand."""
    s = np.linspace(a, b, 2 * panels + 1)
    w = np.ones(len(s))
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (b - a) / (2 * panels) / 3.0
    vals = np.stack([np.asarray(g(x)) for x in s])
    return np.einsum("s,s...->...", w, vals)


def random_qmatrix(rng: np.random.Generator, n: int, scale: float = 1.0) -> QMatrix:
    return QMatrix(rng.uniform(-scale, scale, size=(n, n, 4)))


def random_well_conditioned(rng: np.random.Generator, n: int) -> QMatrix:
    A = rng.uniform(-1.0, 1.0, size=(n, n, 4))
    A[np.arange(n), np.arange(n), 0] += 2.5
    return QMatrix(A)


def quat_close(a: Quaternion, b: Quaternion, tol: float = 1e-12) -> bool:
    return max(abs(a.w - b.w), abs(a.x - b.x),
               abs(a.y - b.y), abs(a.z - b.z)) <= tol


def expr_matrix(rows) -> ExprMatrix:
    return ExprMatrix.parse(rows)
