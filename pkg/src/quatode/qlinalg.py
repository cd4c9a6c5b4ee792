"""Quaternion matrix algebra.

Dense matrices over the quaternions, backed by a (rows, cols, 4) float64
array in w,i,j,k component order.  The determinant kernel det_p is the
permutation expansion ordered by normal-form disjoint cycle decompositions;
invertibility is governed by the double determinant ddet(A) = det_p(A+ A),
and the inverse is assembled entrywise from bordered determinants w_kj.
The complex adjoint embedding chi(A) carries the matrix exponential and the
right eigenvalue problem to a 2n x 2n complex matrix.
"""

from __future__ import annotations

import functools
import itertools
import math
import numbers
from dataclasses import dataclass

import numpy as np

from .quat import Quaternion, as_quaternion

# Hamilton structure tensor: (p q)_c = sum_ab p_a q_b QMUL[a, b, c].
QMUL = np.zeros((4, 4, 4))
for (_a, _b), (_c, _s) in {
    (0, 0): (0, 1), (0, 1): (1, 1), (0, 2): (2, 1), (0, 3): (3, 1),
    (1, 0): (1, 1), (1, 1): (0, -1), (1, 2): (3, 1), (1, 3): (2, -1),
    (2, 0): (2, 1), (2, 1): (3, -1), (2, 2): (0, -1), (2, 3): (1, 1),
    (3, 0): (3, 1), (3, 1): (2, 1), (3, 2): (1, -1), (3, 3): (0, -1),
}.items():
    QMUL[_a, _b, _c] = _s
QMUL.flags.writeable = False

# The permutation expansion enumerates n! terms; refuse above this size.
DETP_MAX_SIZE = 8


class ShapeError(ValueError):
    """Matrix dimensions do not fit the requested operation."""


class SingularMatrixError(ArithmeticError):
    """ddet(A) vanishes within tolerance; no inverse exists."""


class EigenpairError(ArithmeticError):
    """Could not extract a full set of independent right eigenpairs."""


def _qmm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Quaternion matrix product on raw (r, n, 4) x (n, c, 4) arrays."""
    return np.einsum("ika,kjb,abc->ijc", a, b, QMUL)


def _qmul_arr(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Componentwise Hamilton product on (..., 4) arrays."""
    return np.einsum("...a,...b,abc->...c", p, q, QMUL)


class QMatrix:
    """Immutable dense quaternion matrix.

    Construct from a (rows, cols, 4) float array or a nested list whose
    entries are Quaternion or real scalars.  A column vector is an n x 1
    matrix (see :func:`QMatrix.vector`).
    """

    __slots__ = ("_d",)

    def __init__(self, data):
        if isinstance(data, QMatrix):
            arr = data._d.copy()
        elif isinstance(data, np.ndarray):
            arr = np.array(data, dtype=float)
            if arr.ndim != 3 or arr.shape[2] != 4:
                raise ShapeError(f"expected a (rows, cols, 4) array, got {arr.shape}")
        else:
            rows = [[as_quaternion(e) for e in row] for row in data]
            if not rows or not rows[0]:
                raise ShapeError("matrix must have at least one row and column")
            if len({len(r) for r in rows}) != 1:
                raise ShapeError("ragged rows in matrix literal")
            arr = np.array([[(q.w, q.x, q.y, q.z) for q in row] for row in rows])
        arr.flags.writeable = False
        self._d = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "QMatrix":
        self = object.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=float)
        arr.flags.writeable = False
        self._d = arr
        return self

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QMatrix":
        return cls._wrap(np.zeros((rows, cols, 4)))

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        d = np.zeros((n, n, 4))
        d[np.arange(n), np.arange(n), 0] = 1.0
        return cls._wrap(d)

    @classmethod
    def diag(cls, entries) -> "QMatrix":
        qs = [as_quaternion(e) for e in entries]
        n = len(qs)
        d = np.zeros((n, n, 4))
        for m, q in enumerate(qs):
            d[m, m] = (q.w, q.x, q.y, q.z)
        return cls._wrap(d)

    @classmethod
    def vector(cls, entries) -> "QMatrix":
        return cls([[e] for e in entries])

    @classmethod
    def from_columns(cls, columns) -> "QMatrix":
        cols = [c.data if isinstance(c, QMatrix) else QMatrix.vector(c).data
                for c in columns]
        return cls._wrap(np.concatenate(cols, axis=1))

    @property
    def data(self) -> np.ndarray:
        return self._d

    @property
    def rows(self) -> int:
        return self._d.shape[0]

    @property
    def cols(self) -> int:
        return self._d.shape[1]

    @property
    def shape(self):
        return self._d.shape[:2]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, key) -> Quaternion:
        if isinstance(key, tuple):
            i, j = key
        elif self.cols == 1:
            i, j = key, 0
        else:
            raise TypeError("index a matrix with a (row, col) pair")
        return Quaternion(*self._d[i, j])

    def __add__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return QMatrix._wrap(self._d + other._d)

    def __sub__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return QMatrix._wrap(self._d - other._d)

    def __neg__(self):
        return QMatrix._wrap(-self._d)

    def __matmul__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        return QMatrix._wrap(_qmm(self._d, other._d))

    def __mul__(self, other):
        """Entrywise right multiplication by a scalar: (A * q)_ij = A_ij q."""
        if isinstance(other, numbers.Real):
            return QMatrix._wrap(self._d * float(other))
        if isinstance(other, Quaternion):
            e = np.array((other.w, other.x, other.y, other.z))
            return QMatrix._wrap(np.einsum("ija,b,abc->ijc", self._d, e, QMUL))
        return NotImplemented

    def __rmul__(self, other):
        """Entrywise left multiplication by a scalar: (q * A)_ij = q A_ij."""
        if isinstance(other, numbers.Real):
            return QMatrix._wrap(self._d * float(other))
        if isinstance(other, Quaternion):
            e = np.array((other.w, other.x, other.y, other.z))
            return QMatrix._wrap(np.einsum("a,ijb,abc->ijc", e, self._d, QMUL))
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._d, other._d))

    __hash__ = None

    def conj_transpose(self) -> "QMatrix":
        d = self._d.transpose(1, 0, 2).copy()
        d[..., 1:] *= -1.0
        return QMatrix._wrap(d)

    def column(self, j: int) -> "QMatrix":
        return QMatrix._wrap(self._d[:, j:j + 1, :].copy())

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._d)))

    def norm_fro(self) -> float:
        return float(np.sqrt(np.sum(self._d * self._d)))

    def to_rows(self):
        return [[Quaternion(*self._d[i, j]) for j in range(self.cols)]
                for i in range(self.rows)]

    def __repr__(self):
        return f"QMatrix({self.rows}x{self.cols})"

    def __str__(self):
        rows = [", ".join(str(q) for q in row) for row in self.to_rows()]
        return "[" + "; ".join(rows) + "]"


QVector = QMatrix  # a column vector is an n x 1 matrix


# -- permutations and their normal cycle form -----------------------------


@dataclass(frozen=True)
class Permutation:
    """Bijection of {1..n}; mapping[m-1] = sigma(m)."""

    mapping: tuple

    def __post_init__(self):
        m = tuple(int(v) for v in self.mapping)
        object.__setattr__(self, "mapping", m)
        n = len(m)
        if sorted(m) != list(range(1, n + 1)):
            raise ValueError(f"not a permutation of 1..{n}: {m}")

    @property
    def size(self) -> int:
        return len(self.mapping)

    def __call__(self, m: int) -> int:
        return self.mapping[m - 1]


@dataclass(frozen=True)
class NormalCycleForm:
    """Disjoint cycles, each written leader-first with the leader its
    maximum, listed in strictly decreasing leader order; fixed points
    appear as singletons."""

    cycles: tuple

    @property
    def size(self) -> int:
        return sum(len(c) for c in self.cycles)

    @property
    def r(self) -> int:
        return len(self.cycles)

    @property
    def sign(self) -> int:
        return -1 if (self.size - self.r) % 2 else 1


def normal_cycle_form(sigma) -> NormalCycleForm:
    """Decompose a permutation into its normal cycle form."""
    if not isinstance(sigma, Permutation):
        sigma = Permutation(tuple(sigma))
    n = sigma.size
    seen = [False] * (n + 1)
    cycles = []
    for leader in range(n, 0, -1):
        if seen[leader]:
            continue
        cycle = [leader]
        seen[leader] = True
        m = sigma(leader)
        while m != leader:
            cycle.append(m)
            seen[m] = True
            m = sigma(m)
        cycles.append(tuple(cycle))
    return NormalCycleForm(tuple(cycles))


@functools.lru_cache(maxsize=None)
def _perm_chains(n: int):
    """All n! permutations as (sign, chain) with chain the 0-based factor
    index pairs a[m, sigma(m)] in normal-form multiplication order."""
    chains = []
    for perm in itertools.permutations(range(n)):
        seen = [False] * n
        chain = []
        r = 0
        for leader in range(n - 1, -1, -1):
            if seen[leader]:
                continue
            r += 1
            m = leader
            while True:
                seen[m] = True
                chain.append((m, perm[m]))
                m = perm[m]
                if m == leader:
                    break
        sign = -1 if (n - r) % 2 else 1
        chains.append((sign, tuple(chain)))
    return tuple(chains)


# -- determinants ----------------------------------------------------------


def det_p(A: QMatrix) -> Quaternion:
    """Permutation determinant.

    Sum over all permutations sigma of ±(product of entries a[m, sigma(m)]
    taken along sigma's normal-form cycles): cycles multiply left to right
    in decreasing leader order, within a cycle the factors follow the index
    chain from the leader, and the sign is (-1)**(n - r) with r the cycle
    count.  For commuting entries this is the ordinary determinant.
    """
    if not A.is_square:
        raise ShapeError(f"det_p needs a square matrix, got {A.shape}")
    n = A.rows
    if n > DETP_MAX_SIZE:
        raise ShapeError(f"det_p permutation expansion is capped at "
                         f"{DETP_MAX_SIZE}x{DETP_MAX_SIZE}, got {n}x{n}")
    E = A.to_rows()
    total = Quaternion()
    for sign, chain in _perm_chains(n):
        r0, c0 = chain[0]
        term = E[r0][c0]
        for r, c in chain[1:]:
            term = term * E[r][c]
        total = total + term if sign > 0 else total - term
    return total


def _det_p_batch(G: np.ndarray) -> np.ndarray:
    """det_p over a batch: G has shape (B, n, n, 4), result (B, 4)."""
    n = G.shape[1]
    out = np.zeros((G.shape[0], 4))
    for sign, chain in _perm_chains(n):
        r0, c0 = chain[0]
        term = G[:, r0, c0, :]
        for r, c in chain[1:]:
            term = _qmul_arr(term, G[:, r, c, :])
        out += sign * term
    return out


def conj_transpose(A: QMatrix) -> QMatrix:
    return A.conj_transpose()


def ddet(A: QMatrix) -> float:
    """Double determinant det_p(A+ A); real and nonnegative, nonzero
    exactly when A is invertible."""
    if not A.is_square:
        raise ShapeError(f"ddet needs a square matrix, got {A.shape}")
    d = det_p(A.conj_transpose() @ A)
    imag = max(abs(d.x), abs(d.y), abs(d.z))
    if imag > 1e-8 * (1.0 + abs(d.w)):
        raise ArithmeticError(
            f"ddet must be real; got imaginary magnitude {imag:g} "
            f"against real part {d.w:g}")
    return d.w


def _ddet_batch(P: np.ndarray) -> np.ndarray:
    """ddet over a batch of square matrices, shape (B, n, n, 4) -> (B,)."""
    ct = P.transpose(0, 2, 1, 3).copy()
    ct[..., 1:] *= -1.0
    G = np.einsum("sika,skjb,abc->sijc", ct, P, QMUL)
    return _det_p_batch(G)[:, 0]


def singular_tolerance(A: QMatrix) -> float:
    """ddet values below this are treated as zero; ddet scales like the
    2n-th power of the entry magnitude."""
    n = A.rows
    return 1e-10 * (1.0 + A.norm_fro() ** (2 * n))


def w_entry(A: QMatrix, k: int, j: int) -> Quaternion:
    """Bordered determinant w_kj used by the entrywise inverse.

    Let C be A with columns j and n-1 swapped (0-based; the last column
    position receives column j) and R be C with its last column replaced by
    the standard basis vector e_k.  Then w_kj = det_p(R+ C).
    """
    if not A.is_square:
        raise ShapeError(f"w_entry needs a square matrix, got {A.shape}")
    n = A.rows
    if not (0 <= k < n and 0 <= j < n):
        raise IndexError(f"w_entry indices ({k}, {j}) out of range for n={n}")
    order = list(range(n))
    order[j], order[n - 1] = order[n - 1], order[j]
    C = A.data[:, order, :]
    R = C.copy()
    R[:, n - 1, :] = 0.0
    R[k, n - 1, 0] = 1.0
    Rct = R.transpose(1, 0, 2).copy()
    Rct[..., 1:] *= -1.0
    return det_p(QMatrix._wrap(_qmm(Rct, C)))


def inverse(A: QMatrix) -> QMatrix:
    """Entrywise inverse B with conj(B[j, k]) = w_kj / ddet(A).

    Raises SingularMatrixError when |ddet(A)| falls below the size-scaled
    singular tolerance.
    """
    if not A.is_square:
        raise ShapeError(f"inverse needs a square matrix, got {A.shape}")
    d = ddet(A)
    if abs(d) < singular_tolerance(A):
        raise SingularMatrixError(
            f"matrix is singular: ddet = {d:.3e} below tolerance "
            f"{singular_tolerance(A):.3e}")
    n = A.rows
    out = np.empty((n, n, 4))
    for j in range(n):
        for k in range(n):
            w = w_entry(A, k, j)
            out[j, k] = (w.w / d, -w.x / d, -w.y / d, -w.z / d)
    return QMatrix._wrap(out)


# -- complex adjoint, exponential, eigenpairs ------------------------------


def complex_adjoint(A: QMatrix) -> np.ndarray:
    """Embed A into a 2r x 2c complex matrix.

    Each entry q = z1 + z2 j (z1 = w + x i, z2 = y + z i) becomes the block
    [[z1, z2], [-conj(z2), conj(z1)]]; the map is a ring homomorphism.
    """
    d = A.data
    z1 = d[..., 0] + 1j * d[..., 1]
    z2 = d[..., 2] + 1j * d[..., 3]
    r, c = A.shape
    M = np.empty((2 * r, 2 * c), dtype=complex)
    M[0::2, 0::2] = z1
    M[0::2, 1::2] = z2
    M[1::2, 0::2] = -z2.conj()
    M[1::2, 1::2] = z1.conj()
    return M


def from_complex_adjoint(M: np.ndarray, tol: float = 1e-9) -> QMatrix:
    """Left inverse of complex_adjoint.

    M must carry the 2x2 block symmetry of the embedding within tol
    (relative to its largest entry); otherwise a ValueError is raised.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] % 2 or M.shape[1] % 2:
        raise ShapeError(f"expected an even-dimensioned complex matrix, got {M.shape}")
    Z1 = M[0::2, 0::2]
    Z2 = M[0::2, 1::2]
    W1 = M[1::2, 0::2]
    W2 = M[1::2, 1::2]
    scale = 1.0 + float(np.max(np.abs(M))) if M.size else 1.0
    dev = max(float(np.max(np.abs(W1 + Z2.conj()))),
              float(np.max(np.abs(W2 - Z1.conj()))))
    if dev > tol * scale:
        raise ValueError(
            f"matrix is not in the image of the quaternion embedding: "
            f"block deviation {dev:.3e} exceeds {tol * scale:.3e}")
    z1 = 0.5 * (Z1 + W2.conj())
    z2 = 0.5 * (Z2 - W1.conj())
    d = np.stack([z1.real, z1.imag, z2.real, z2.imag], axis=-1)
    return QMatrix._wrap(d)


# Pade-13 scaling-and-squaring constants.
_PADE13_B = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
)
_PADE13_THETA = 5.371920351148152


def _expm_complex(M: np.ndarray) -> np.ndarray:
    """Complex matrix exponential, scaling and squaring with a Pade-13 core."""
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    eye = np.eye(n, dtype=complex)
    nrm = float(np.linalg.norm(M, 1)) if n else 0.0
    if nrm == 0.0:
        return eye.copy()
    s = max(0, int(math.ceil(math.log2(nrm / _PADE13_THETA)))) if nrm > _PADE13_THETA else 0
    A = M / (2.0 ** s)
    b = _PADE13_B
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * eye)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * eye)
    R = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        R = R @ R
    return R


def expm(A: QMatrix, t: float = 1.0) -> QMatrix:
    """exp(A t), computed as the complex exponential of chi(A) t pulled
    back through the embedding; satisfies dPhi/dt = A Phi, Phi(0) = I."""
    if not A.is_square:
        raise ShapeError(f"expm needs a square matrix, got {A.shape}")
    if t == 0.0:
        return QMatrix.identity(A.rows)
    return from_complex_adjoint(_expm_complex(complex_adjoint(A) * t))


def _vector_from_adjoint_column(u: np.ndarray) -> QMatrix:
    """Back-map an eigenvector of chi(A) to a quaternion column,
    v_m = u[2m] - conj(u[2m+1]) j."""
    p = u[0::2]
    q = u[1::2]
    d = np.stack([p.real, p.imag, -q.real, q.imag], axis=-1)[:, None, :]
    return QMatrix._wrap(d)


def _adjoint_conjugate_partner(u: np.ndarray) -> np.ndarray:
    """Map a lambda-eigenvector of chi(A) to a conj(lambda)-eigenvector;
    the image spans the same right quaternionic line (v -> v j)."""
    out = np.empty_like(u)
    out[0::2] = u[1::2].conj()
    out[1::2] = -u[0::2].conj()
    return out


def right_eigenpairs(A: QMatrix):
    """Right eigenpairs (lambda, v) with A v = v lambda.

    Eigenvalues are returned as the complex representative of their
    similarity class with nonnegative i-component; eigenvectors have unit
    norm.  Raises EigenpairError when n independent pairs cannot be
    extracted (defective chi(A)); a fundamental matrix should then be
    built from the exponential instead.
    """
    if not A.is_square:
        raise ShapeError(f"right_eigenpairs needs a square matrix, got {A.shape}")
    n = A.rows
    chi = complex_adjoint(A)
    evals, evecs = np.linalg.eig(chi)
    order = sorted(range(2 * n), key=lambda m: (-evals[m].imag, evals[m].real, m))
    res_tol = 1e-9 * max(1.0, A.norm_fro())
    dep_tol = 1e-8
    basis = []          # orthonormal span of accepted {u, partner(u)}
    pairs = []
    for idx in order:
        if len(pairs) == n:
            break
        lam = complex(evals[idx])
        u = np.array(evecs[:, idx])
        w = u.copy()
        for b in basis:
            w -= (b.conj() @ w) * b
        if np.linalg.norm(w) < dep_tol:
            continue
        v = _vector_from_adjoint_column(u)
        if lam.imag < 0.0:
            v = v * Quaternion(0.0, 0.0, 1.0, 0.0)
            lam = lam.conjugate()
        nv = v.norm_fro()
        v = v * (1.0 / nv)
        lam_q = Quaternion(lam.real, lam.imag)
        if ((A @ v) - (v * lam_q)).max_abs() > res_tol:
            continue
        for cand in (u, _adjoint_conjugate_partner(u)):
            wb = cand.copy()
            for b in basis:
                wb -= (b.conj() @ wb) * b
            nb = np.linalg.norm(wb)
            if nb > 1e-12:
                basis.append(wb / nb)
        pairs.append((lam_q, v))
    if len(pairs) < n:
        raise EigenpairError(
            f"extracted only {len(pairs)} of {n} independent right "
            f"eigenpairs; matrix is defective or ill conditioned, build "
            f"the fundamental matrix from the exponential instead")
    return pairs
