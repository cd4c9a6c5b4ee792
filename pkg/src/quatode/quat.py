"""Scalar quaternion arithmetic.

Convention: q = w + x*i + y*j + z*k with real components, scalar first,
Hamilton product, i**2 = j**2 = k**2 = i*j*k = -1.  Values are immutable;
all operations are pure.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass

# Default absolute tolerance for "is zero" checks on components.
ZERO_TOL = 1e-12


@dataclass(frozen=True, slots=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "w", float(self.w))
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "z", float(self.z))

    # -- ring structure -------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Quaternion(self.w + other.w, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Quaternion(self.w - other.w, self.x - other.x,
                          self.y - other.y, self.z - other.z)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            a, b = self, other
            return Quaternion(
                a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
                a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
                a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
                a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
            )
        if isinstance(other, numbers.Real):
            s = float(other)
            return Quaternion(self.w * s, self.x * s, self.y * s, self.z * s)
        return NotImplemented

    def __rmul__(self, other):
        # Real scalars commute with every quaternion.
        if isinstance(other, numbers.Real):
            return self * float(other)
        return NotImplemented

    def __truediv__(self, other):
        """Right division: a / b = a * b**-1."""
        if isinstance(other, Quaternion):
            return self * other.inverse()
        if isinstance(other, numbers.Real):
            s = float(other)
            return Quaternion(self.w / s, self.x / s, self.y / s, self.z / s)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, numbers.Real):
            return float(other) * self.inverse()
        return NotImplemented

    # -- conjugation, norm, inverse --------------------------------------

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return math.hypot(self.w, self.x, self.y, self.z)

    def norm2(self) -> float:
        """Squared norm, q.conjugate() * q as a real number."""
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    __abs__ = norm

    def inverse(self) -> "Quaternion":
        n2 = self.norm2()
        if n2 == 0.0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        return Quaternion(self.w / n2, -self.x / n2, -self.y / n2, -self.z / n2)

    @property
    def real(self) -> float:
        return self.w

    @property
    def imag(self) -> "Quaternion":
        return Quaternion(0.0, self.x, self.y, self.z)

    def is_zero(self, tol: float = ZERO_TOL) -> bool:
        return max(abs(self.w), abs(self.x), abs(self.y), abs(self.z)) <= tol

    def is_real(self, tol: float = ZERO_TOL) -> bool:
        return max(abs(self.x), abs(self.y), abs(self.z)) <= tol

    # -- rendering --------------------------------------------------------

    def __str__(self):
        parts = []
        for coef, unit in ((self.w, ""), (self.x, "i"), (self.y, "j"), (self.z, "k")):
            if coef == 0.0:
                continue
            mag = _fmt_float(abs(coef))
            if unit and mag == "1":
                mag = ""
            parts.append(("-" if coef < 0 else "+", mag + unit))
        if not parts:
            return "0"
        sign, term = parts[0]
        out = ("-" if sign == "-" else "") + term
        for sign, term in parts[1:]:
            out += sign + term
        return out


def _fmt_float(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _coerce(value):
    if isinstance(value, Quaternion):
        return value
    if isinstance(value, numbers.Real):
        return Quaternion(float(value))
    return None


def as_quaternion(value) -> Quaternion:
    q = _coerce(value)
    if q is None:
        raise TypeError(f"cannot interpret {value!r} as a quaternion")
    return q


ZERO = Quaternion()
ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def qexp(q: Quaternion) -> Quaternion:
    """Exponential e**q = e**w (cos|v| + (v/|v|) sin|v|) with v = imag part.

    For |v| below 1e-300 the real-exponential branch is taken; the
    singularity at v = 0 is removable.
    """
    vn = math.hypot(q.x, q.y, q.z)
    ew = math.exp(q.w)
    if vn < 1e-300:
        return Quaternion(ew)
    s = ew * math.sin(vn) / vn
    return Quaternion(ew * math.cos(vn), s * q.x, s * q.y, s * q.z)
