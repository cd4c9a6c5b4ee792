"""Fundamental matrices and the variation-of-constants solver.

Solves dx/dt = A(t) x + f(t) over the quaternions.  Every solution has the
form Phi(t) q + Phi(t) * integral_{t0}^{t} Phi(s)^{-1} f(s) ds for a
fundamental matrix Phi and a constant quaternion vector q; initial-value
problems take q = Phi(t0)^{-1} x0, and T-periodic problems determine q from
the invertibility of Phi(0) - Phi(T).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quat import as_quaternion, qexp
from .qexpr import ExprMatrix, eval_matrix, eval_vector, evaluate, parse
from .qlinalg import (QMUL, EigenpairError, QMatrix, SingularMatrixError,
                      _ddet_batch, _qmm, complex_adjoint, ddet,
                      from_complex_adjoint, expm, inverse, right_eigenpairs,
                      singular_tolerance)


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""


_MODES = ("ivp", "periodic", "homogeneous")


@dataclass
class Problem:
    """Full description of one solve.

    A is the n x n coefficient expression matrix, f the forcing expression
    vector (None means zero).  mode selects the solve: "ivp" (requires x0),
    "periodic" (requires period), or "homogeneous" (fundamental-matrix
    sampling, no x0).
    """

    n: int
    A: ExprMatrix
    mode: str = "ivp"
    f: list | None = None
    x0: list | None = None
    t0: float = 0.0
    t_end: float = 1.0
    period: float | None = None
    quad_tol: float = 1e-10
    ode_steps: int = 4096
    samples: int = 101

    def __post_init__(self):
        if isinstance(self.A, (list, tuple)):
            self.A = ExprMatrix.parse(self.A)
        if self.A.rows != self.n or self.A.cols != self.n:
            raise ValueError(f"A must be {self.n}x{self.n}, got "
                             f"{self.A.rows}x{self.A.cols}")
        if self.mode not in _MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.f is not None:
            if len(self.f) != self.n:
                raise ValueError(f"f must have {self.n} entries")
            self.f = [parse(e) if isinstance(e, str) else e for e in self.f]
        if self.mode == "ivp":
            if self.x0 is None:
                raise ValueError("mode 'ivp' requires x0")
            if len(self.x0) != self.n:
                raise ValueError(f"x0 must have {self.n} entries")
            self.x0 = [evaluate(parse(e), 0.0) if isinstance(e, str)
                       else as_quaternion(e) for e in self.x0]
        elif self.x0 is not None:
            raise ValueError(f"mode {self.mode!r} does not take x0")
        if self.mode == "periodic":
            if self.period is None or self.period <= 0.0:
                raise ValueError("mode 'periodic' requires a positive period")
            if self.t0 < 0.0:
                raise ValueError("periodic mode expects t0 >= 0")
        if not self.t0 < self.t_end:
            raise ValueError(f"need t0 < t_end, got [{self.t0}, {self.t_end}]")
        if self.samples < 2:
            raise ValueError("need at least 2 samples")
        if self.ode_steps < 1:
            raise ValueError("ode_steps must be positive")
        if self.quad_tol <= 0.0:
            raise ValueError("quad_tol must be positive")


@dataclass
class FundamentalMatrix:
    """Matrix of n independent homogeneous solutions, Phi(t_ref) = I.

    kind is "expm" (constant A through the complex exponential), "eigen"
    (columns nu_m e^{lambda_m t}) or "numeric" (RK4 grid with cubic Hermite
    dense output).  ddet(Phi(t)) stays nonzero on the working interval.
    """

    evaluator: Callable[[float], QMatrix]
    kind: str
    t_ref: float
    n: int

    def __call__(self, t: float) -> QMatrix:
        return self.evaluator(t)

    def inverse_at(self, t: float) -> QMatrix:
        return _invert(self.evaluator(t))


@dataclass
class SolutionTable:
    """Sampled trajectory with optional per-sample residual diagnostics.

    values has shape (samples, n, 4); for fundamental-matrix tables
    (metadata["layout"] == "matrix") the n*n entries are flattened row
    major into shape (samples, n*n, 4).
    """

    times: np.ndarray
    values: np.ndarray
    residuals: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if len(self.times) != len(self.values):
            raise ValueError("times and values lengths differ")
        if np.any(np.diff(self.times) <= 0.0):
            raise ValueError("times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    def value_at(self, s: int) -> QMatrix:
        return QMatrix._wrap(self.values[s][:, None, :].copy())

    def to_json_dict(self) -> dict:
        return {
            "times": self.times.tolist(),
            "values": self.values.tolist(),
            "residuals": None if self.residuals is None else self.residuals.tolist(),
            "metadata": self.metadata,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "SolutionTable":
        residuals = d.get("residuals")
        return cls(
            times=np.asarray(d["times"], dtype=float),
            values=np.asarray(d["values"], dtype=float),
            residuals=None if residuals is None else np.asarray(residuals, dtype=float),
            metadata=dict(d.get("metadata", {})),
        )


# -- fundamental matrices ----------------------------------------------------


def fundamental_constant(A: QMatrix, t_ref: float = 0.0) -> FundamentalMatrix:
    """Phi(t) = exp(A (t - t_ref)) for constant A; Phi(t_ref) = I."""
    return FundamentalMatrix(lambda t: expm(A, t - t_ref), "expm", t_ref, A.rows)


def fundamental_eigen(A: QMatrix) -> FundamentalMatrix:
    """Phi(t) with columns nu_m e^{lambda_m t} from the right eigenpairs.

    Requires the eigenvector matrix V to satisfy ddet(V) != 0; raises
    EigenpairError otherwise (fall back to fundamental_constant).
    """
    pairs = right_eigenpairs(A)
    V = QMatrix.from_columns([v for _, v in pairs])
    if abs(ddet(V)) < singular_tolerance(V):
        raise EigenpairError("eigenvectors are dependent (ddet = 0); build "
                             "the fundamental matrix from the exponential")
    lams = [lam for lam, _ in pairs]
    vdata = V.data

    def evaluator(t: float) -> QMatrix:
        cols = np.empty_like(vdata)
        for m, lam in enumerate(lams):
            e = qexp(lam * t)
            earr = np.array((e.w, e.x, e.y, e.z))
            cols[:, m, :] = np.einsum("ma,b,abc->mc", vdata[:, m, :], earr, QMUL)
        return QMatrix._wrap(cols)

    return FundamentalMatrix(evaluator, "eigen", 0.0, A.rows)


def fundamental_numeric(A: ExprMatrix, t0: float, t_end: float,
                        steps: int = 4096) -> FundamentalMatrix:
    """Integrate Phi' = A(t) Phi, Phi(t0) = I with fixed-step classical RK4.

    Dense output is cubic Hermite between grid points using the stored
    derivatives A(t_m) Phi_m.  Raises SingularMatrixError if ddet(Phi)
    drops below the singular tolerance at any grid point (step-size
    failure); that check runs on the full grid for n <= 4 and on a thinned
    grid above.
    """
    if A.rows != A.cols:
        raise ValueError(f"A must be square, got {A.rows}x{A.cols}")
    n = A.rows
    if not t0 < t_end:
        raise ValueError("need t0 < t_end")
    h = (t_end - t0) / steps
    ts = t0 + h * np.arange(steps + 1)
    P = np.zeros((steps + 1, n, n, 4))
    D = np.zeros_like(P)
    P[0] = QMatrix.identity(n).data

    def a_at(t: float) -> np.ndarray:
        return eval_matrix(A, t).data

    a_cur = a_at(t0)
    for s in range(steps):
        p = P[s]
        k1 = _qmm(a_cur, p)
        am = a_at(ts[s] + 0.5 * h)
        ae = a_at(ts[s] + h)
        k2 = _qmm(am, p + (0.5 * h) * k1)
        k3 = _qmm(am, p + (0.5 * h) * k2)
        k4 = _qmm(ae, p + h * k3)
        P[s + 1] = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        D[s] = k1
        a_cur = ae
    D[steps] = _qmm(a_cur, P[steps])

    check = slice(None) if n <= 4 else slice(None, None, max(1, steps // 64))
    dd = _ddet_batch(P[check])
    fro = np.sqrt(np.sum(P[check] ** 2, axis=(1, 2, 3)))
    tol = 1e-10 * (1.0 + fro ** (2 * n))
    if np.any(dd < tol):
        bad = int(np.argmax(dd < tol))
        raise SingularMatrixError(
            f"fundamental matrix became numerically singular near "
            f"t = {ts[check][bad]:g}; increase ode_steps")

    def evaluator(t: float) -> QMatrix:
        s = (t - t0) / h
        idx = min(max(int(math.floor(s)), 0), steps - 1)
        th = s - idx
        h00 = (1.0 + 2.0 * th) * (1.0 - th) ** 2
        h10 = th * (1.0 - th) ** 2
        h01 = th * th * (3.0 - 2.0 * th)
        h11 = th * th * (th - 1.0)
        val = (h00 * P[idx] + (h10 * h) * D[idx]
               + h01 * P[idx + 1] + (h11 * h) * D[idx + 1])
        return QMatrix._wrap(val)

    return FundamentalMatrix(evaluator, "numeric", t0, n)


def _invert(M: QMatrix) -> QMatrix:
    """Determinant-formula inverse for n <= 4; complex-adjoint solve above."""
    if M.rows <= 4:
        return inverse(M)
    return from_complex_adjoint(np.linalg.inv(complex_adjoint(M)))


def _is_constant(A: ExprMatrix, lo: float, hi: float) -> bool:
    """Probe each entry at 5 spread t values; constant when the max
    pairwise deviation stays below 1e-13."""
    if A.is_constant():
        return True
    probes = [lo + f * (hi - lo) for f in (0.0, 0.2137, 0.5406, 0.7919, 1.0)]
    vals = np.stack([eval_matrix(A, t).data for t in probes])
    dev = np.max(vals, axis=0) - np.min(vals, axis=0)
    return float(np.max(dev)) < 1e-13


def _build_fundamental(p: Problem, t_ref: float, t_lo: float,
                       t_hi: float) -> FundamentalMatrix:
    if _is_constant(p.A, t_lo, t_hi):
        return fundamental_constant(eval_matrix(p.A, t_ref), t_ref)
    return fundamental_numeric(p.A, t_ref, t_hi, p.ode_steps)


# -- quadrature ---------------------------------------------------------------


def _simpson_rec(g, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = g(lm)
    frm = g(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if float(np.max(np.abs(delta))) <= 15.0 * tol:
        return left + right + delta / 15.0
    if depth <= 0:
        raise QuadratureError(
            f"adaptive Simpson hit the refinement depth cap on "
            f"[{a:g}, {b:g}] without reaching tolerance {tol:g}")
    return (_simpson_rec(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + _simpson_rec(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1))


def _adaptive_simpson(g, a: float, b: float, tol: float,
                      depth: int = 30) -> np.ndarray:
    """Vector-valued adaptive Simpson with Richardson correction; the
    interval orientation carries the sign."""
    fa = g(a)
    if a == b:
        return np.zeros_like(fa)
    fb = g(b)
    m = 0.5 * (a + b)
    fm = g(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_rec(g, a, b, fa, fm, fb, whole, tol, depth)


def _integrand(Phi: FundamentalMatrix, f_exprs, cache: dict):
    """s -> Phi(s)^{-1} f(s) flattened to 4n reals, memoized by node."""
    def g(s: float) -> np.ndarray:
        hit = cache.get(s)
        if hit is None:
            inv = _invert(Phi(s))
            fv = eval_vector(f_exprs, s)
            hit = _qmm(inv.data, fv.data).ravel()
            cache[s] = hit
        return hit
    return g


def _as_exprs(f, n: int):
    if f is None:
        return None
    exprs = [parse(e) if isinstance(e, str) else e for e in f]
    if len(exprs) != n:
        raise ValueError(f"forcing vector must have {n} entries")
    return exprs


def particular_integral(Phi: FundamentalMatrix, f, t0: float, t: float,
                        quad_tol: float = 1e-10) -> QMatrix:
    """Phi(t) * integral_{t0}^{t} Phi(s)^{-1} f(s) ds.

    Each of the 4n real components of the integrand is integrated by
    adaptive Simpson to quad_tol (depth cap 30).
    """
    n = Phi.n
    exprs = _as_exprs(f, n)
    if exprs is None:
        return QMatrix.zeros(n, 1)
    g = _integrand(Phi, exprs, {})
    Q = _adaptive_simpson(g, t0, t, quad_tol)
    return Phi(t) @ QMatrix._wrap(Q.reshape(n, 1, 4))


def general_solution(Phi: FundamentalMatrix, q, f, t0: float,
                     quad_tol: float = 1e-10) -> Callable[[float], QMatrix]:
    """The general solution t -> Phi(t) q + Phi(t) int_{t0}^{t} Phi^{-1} f.

    q is an arbitrary constant quaternion vector; with q = Phi(t0)^{-1} x0
    this coincides with solve_ivp.
    """
    n = Phi.n
    qvec = q if isinstance(q, QMatrix) else QMatrix.vector([as_quaternion(e) for e in q])
    exprs = _as_exprs(f, n)
    cache: dict = {}

    def sol(t: float) -> QMatrix:
        if exprs is None:
            return Phi(t) @ qvec
        g = _integrand(Phi, exprs, cache)
        Q = _adaptive_simpson(g, t0, t, quad_tol)
        return Phi(t) @ (qvec + QMatrix._wrap(Q.reshape(n, 1, 4)))

    return sol


# -- solvers ------------------------------------------------------------------


def _grid_integrals(Phi, exprs, anchor, ts, quad_tol, cache):
    """Accumulated integrals Q(ts[m]) = int_anchor^{ts[m]} Phi^{-1} f ds.

    Tolerance is split across panels in proportion to their length so the
    accumulated error stays within quad_tol.
    """
    n = Phi.n
    Q = np.zeros((len(ts), 4 * n))
    if exprs is None:
        return Q
    g = _integrand(Phi, exprs, cache)
    span = abs(ts[0] - anchor) + (ts[-1] - ts[0])
    if span == 0.0:
        return Q
    acc = _adaptive_simpson(g, anchor, ts[0],
                            quad_tol * max(abs(ts[0] - anchor) / span, 1e-3))
    Q[0] = acc
    for m in range(1, len(ts)):
        tol = quad_tol * (ts[m] - ts[m - 1]) / span
        acc = acc + _adaptive_simpson(g, ts[m - 1], ts[m], tol)
        Q[m] = acc
    return Q


def _sample_ddet_check(phis: np.ndarray, n: int):
    if n > 4:
        return
    dd = _ddet_batch(phis)
    fro = np.sqrt(np.sum(phis ** 2, axis=(1, 2, 3)))
    tol = 1e-10 * (1.0 + fro ** (2 * n))
    if np.any(dd < tol):
        raise SingularMatrixError(
            "fundamental matrix lost invertibility (ddet ~ 0) at a sample point")


def solve_ivp(p: Problem) -> SolutionTable:
    """Sample phi(t) = Phi(t) Phi(t0)^{-1} x0 + Phi(t) int_{t0}^{t} Phi^{-1} f
    on `samples` equispaced points of [t0, t_end].

    phi(t0) = x0 exactly up to quadrature tolerance.
    """
    if p.mode != "ivp":
        raise ValueError(f"solve_ivp needs mode 'ivp', got {p.mode!r}")
    Phi = _build_fundamental(p, p.t0, p.t0, p.t_end)
    ts = np.linspace(p.t0, p.t_end, p.samples)
    cache: dict = {}

    phi_cache: dict = {}

    def phi_at(t: float) -> QMatrix:
        hit = phi_cache.get(t)
        if hit is None:
            hit = Phi(t)
            phi_cache[t] = hit
        return hit

    c0 = _invert(phi_at(p.t0)) @ QMatrix.vector(p.x0)
    Q = _grid_integrals(FundamentalMatrix(phi_at, Phi.kind, Phi.t_ref, Phi.n),
                        p.f, p.t0, ts, p.quad_tol, cache)
    n = p.n
    phis = np.stack([phi_at(t).data for t in ts])
    _sample_ddet_check(phis, n)
    coeff = c0.data[None, :, :, :] + Q.reshape(len(ts), n, 1, 4)
    values = np.einsum("sika,skjb,abc->sijc", phis, coeff, QMUL)[:, :, 0, :]
    return SolutionTable(
        times=ts, values=values,
        metadata={"mode": "ivp", "n": n, "quad_tol": p.quad_tol,
                  "samples": p.samples, "strategy": Phi.kind,
                  "t0": p.t0, "t_end": p.t_end})


def solve_periodic(p: Problem) -> SolutionTable:
    """Unique T-periodic solution via q = (Phi(0) - Phi(T))^{-1} Phi(T) Q_T.

    Q_T = int_0^T Phi(s)^{-1} f(s) ds; requires Phi(0) - Phi(T) invertible,
    otherwise SingularMatrixError (no unique periodic solution).  A and f
    are sampled at 8 points for T-periodicity; violations only warn.
    """
    if p.mode != "periodic":
        raise ValueError(f"solve_periodic needs mode 'periodic', got {p.mode!r}")
    T = p.period
    t_hi = max(p.t_end, T)
    Phi = _build_fundamental(p, 0.0, 0.0, t_hi)

    amax = 0.0
    for m in range(8):
        tm = m * T / 8.0
        dev = (eval_matrix(p.A, tm + T) - eval_matrix(p.A, tm)).max_abs()
        amax = max(amax, dev)
        if p.f is not None:
            fdev = (eval_vector(p.f, tm + T) - eval_vector(p.f, tm)).max_abs()
            amax = max(amax, fdev)
    if amax > 1e-8:
        warnings.warn(f"problem data does not look T-periodic "
                      f"(max deviation {amax:g} over 8 probe points)",
                      stacklevel=2)

    ts = np.linspace(p.t0, p.t_end, p.samples)
    cache: dict = {}
    phi_cache: dict = {}

    def phi_at(t: float) -> QMatrix:
        hit = phi_cache.get(t)
        if hit is None:
            hit = Phi(t)
            phi_cache[t] = hit
        return hit

    memo_phi = FundamentalMatrix(phi_at, Phi.kind, Phi.t_ref, Phi.n)
    Q = _grid_integrals(memo_phi, p.f, 0.0, ts, p.quad_tol, cache)
    n = p.n
    if p.f is None:
        QT = np.zeros(4 * n)
    elif ts[0] == 0.0 and ts[-1] == T:
        QT = Q[-1]
    else:
        g = _integrand(memo_phi, _as_exprs(p.f, n), cache)
        QT = _adaptive_simpson(g, 0.0, T, p.quad_tol)

    M = QMatrix.identity(n) - phi_at(T)
    try:
        Minv = _invert(M)
    except SingularMatrixError as e:
        raise SingularMatrixError(
            "no unique periodic solution: Phi(0) - Phi(T) is singular "
            f"(ddet ~ 0); {e}") from e
    qvec = Minv @ (phi_at(T) @ QMatrix._wrap(QT.reshape(n, 1, 4)))

    phis = np.stack([phi_at(t).data for t in ts])
    _sample_ddet_check(phis, n)
    coeff = qvec.data[None, :, :, :] + Q.reshape(len(ts), n, 1, 4)
    values = np.einsum("sika,skjb,abc->sijc", phis, coeff, QMUL)[:, :, 0, :]
    meta = {"mode": "periodic", "n": n, "quad_tol": p.quad_tol,
            "samples": p.samples, "strategy": Phi.kind,
            "t0": p.t0, "t_end": p.t_end, "period": T}
    if ts[0] == 0.0 and ts[-1] == T:
        gap = float(np.max(np.abs(values[0] - values[-1])))
        meta["periodic_gap"] = gap
        if gap > 1e-6 * (1.0 + float(np.max(np.abs(values)))):
            warnings.warn(f"periodicity gap |x(0) - x(T)| = {gap:g} is large",
                          stacklevel=2)
    return SolutionTable(times=ts, values=values, metadata=meta)


def fundamental_table(p: Problem) -> SolutionTable:
    """Sample the normal fundamental matrix (Phi(t0) = I) of the
    homogeneous system; entries are flattened row major."""
    if p.mode != "homogeneous":
        raise ValueError(f"fundamental_table needs mode 'homogeneous', "
                         f"got {p.mode!r}")
    Phi = _build_fundamental(p, p.t0, p.t0, p.t_end)
    ts = np.linspace(p.t0, p.t_end, p.samples)
    n = p.n
    phis = np.stack([Phi(t).data for t in ts])
    _sample_ddet_check(phis, n)
    values = phis.reshape(len(ts), n * n, 4)
    return SolutionTable(
        times=ts, values=values,
        metadata={"mode": "homogeneous", "layout": "matrix", "n": n,
                  "samples": p.samples, "strategy": Phi.kind,
                  "t0": p.t0, "t_end": p.t_end})
