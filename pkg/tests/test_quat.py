import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quatode import I, J, K, ONE, Quaternion, qexp

from helpers import mul_oracle, qexp_series, quat_close

finite = st.floats(-10.0, 10.0, allow_nan=False)
quaternions = st.builds(Quaternion, finite, finite, finite, finite)


def test_multiplication_table():
    assert I * I == Quaternion(-1)
    assert J * J == Quaternion(-1)
    assert K * K == Quaternion(-1)
    assert I * J * K == Quaternion(-1)
    assert I * J == K and J * I == -K
    assert J * K == I and K * J == -I
    assert K * I == J and I * K == -J


def test_product_used_by_determinant_example():
    # k(1+j) - (i+k) = k + kj - i - k = -2i
    assert K * (ONE + J) - (I + K) == Quaternion(0, -2, 0, 0)


def test_product_against_expansion_oracle():
    a = ONE + J
    b = I + K
    assert a * b == mul_oracle(a, b) == Quaternion(0, 2, 0, 0)


@given(quaternions, quaternions)
def test_mul_matches_table_expansion(a, b):
    assert quat_close(a * b, mul_oracle(a, b), 1e-9)


@given(quaternions, quaternions)
def test_norm_multiplicative(a, b):
    lhs = (a * b).norm()
    rhs = a.norm() * b.norm()
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, rhs)


@given(quaternions, quaternions, quaternions)
def test_mul_associative(a, b, c):
    lhs = (a * b) * c
    rhs = a * (b * c)
    scale = max(1.0, lhs.norm())
    assert quat_close(lhs, rhs, 1e-12 * scale)


def test_mul_not_commutative():
    assert I * J != J * I


def test_conj_norm_inv_trivials():
    assert J.conjugate() == -J
    assert Quaternion(1, 1, 1, 1).norm() == 2.0
    assert J.inverse() == -J
    q = Quaternion(2, -1, 0.5, 3)
    assert quat_close(q.conjugate() * q, Quaternion(q.norm2()), 1e-12)


@given(quaternions, quaternions)
@settings(max_examples=100)
def test_conj_antihomomorphism(p, h):
    assert quat_close((p * h).conjugate(), h.conjugate() * p.conjugate(), 1e-9)


@given(quaternions)
def test_inverse_two_sided(q):
    if q.norm() < 1e-3:
        return
    one = Quaternion(1)
    assert quat_close(q * q.inverse(), one, 1e-12)
    assert quat_close(q.inverse() * q, one, 1e-12)


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        Quaternion().inverse()


def test_division_is_right_division():
    # a / b = a * b**-1; i / j = i * (-j) = k... check explicitly
    assert I / J == I * J.inverse()
    assert quat_close(I / J, Quaternion(0, 0, 0, -1), 1e-15)
    assert Quaternion(1) / 2 == Quaternion(0.5)


def test_real_and_imag_parts():
    q = Quaternion(1, 2, 3, 4)
    assert q.real == 1.0
    assert q.imag == Quaternion(0, 2, 3, 4)


def test_qexp_trivials():
    assert qexp(Quaternion()) == Quaternion(1)
    assert quat_close(qexp(J * (math.pi / 2)), J, 1e-15)
    assert quat_close(qexp(K * math.pi), Quaternion(-1), 1e-15)


def test_qexp_euler_form():
    t = 0.7
    expected = Quaternion(math.cos(t), 0, math.sin(t), 0)
    assert quat_close(qexp(J * t), expected, 1e-15)


@given(quaternions)
@settings(max_examples=150)
def test_qexp_matches_power_series(q):
    if q.norm() > 3.0:
        return
    assert quat_close(qexp(q), qexp_series(q, 30), 1e-10)


def test_qexp_tiny_imaginary_branch():
    q = Quaternion(0.5, 1e-305, 0, 0)
    assert qexp(q) == Quaternion(math.exp(0.5))


@pytest.mark.parametrize("q,text", [
    (Quaternion(), "0"),
    (Quaternion(1), "1"),
    (Quaternion(0, -2), "-2i"),
    (Quaternion(0, 1), "i"),
    (Quaternion(0, -1), "-i"),
    (Quaternion(1, 0, -0.5), "1-0.5j"),
    (Quaternion(1, 2, 3, 4), "1+2i+3j+4k"),
    (Quaternion(0, 0, 0.5, 0), "0.5j"),
])
def test_rendering(q, text):
    assert str(q) == text


def test_scalar_coercion_in_arithmetic():
    assert 1 + I == Quaternion(1, 1)
    assert 2 * J == Quaternion(0, 0, 2)
    assert J * 2 == Quaternion(0, 0, 2)
    assert 1 - K == Quaternion(1, 0, 0, -1)
    assert quat_close(1 / J, -J, 1e-15)
