from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from painleve_hh import ContractViolation, Scalar, as_scalar, nth_root

rationals = st.builds(
    Fraction,
    st.integers(min_value=-50, max_value=50),
    st.integers(min_value=1, max_value=20),
)


def sc(q):
    return Scalar.exact(q)


@given(rationals, rationals, rationals)
def test_field_axioms_exact(a, b, c):
    A, B, C = sc(a), sc(b), sc(c)
    assert ((A + B) + C).fraction() == (A + (B + C)).fraction()
    assert (A * (B + C)).fraction() == (A * B + A * C).fraction()
    assert (A + B).fraction() == (B + A).fraction()
    assert (A * B).fraction() == a * b
    if b != 0:
        assert (A / B * B).fraction() == a


@given(rationals, rationals)
def test_exact_arithmetic_stays_exact(a, b):
    A, B = sc(a), sc(b)
    for value in (A + B, A - B, A * B):
        assert value.is_exact
    if b != 0:
        assert (A / B).is_exact


def test_float_contamination_is_sticky():
    a = Scalar.from_real("0.5")
    b = sc(Fraction(1, 2))
    assert not (a + b).is_exact
    assert not (a * b).is_exact


def test_exact_zero_annihilates_floats():
    z = sc(0)
    f = Scalar.from_real("3.25")
    assert (z * f).is_exact and (z * f).is_zero()
    assert (z / f).is_exact
    # addition with exact zero keeps the other operand untouched
    assert (z + f).mpc() == f.mpc()


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        sc(1) / sc(0)


def test_precision_floor():
    with pytest.raises(ContractViolation):
        Scalar.exact(1).with_precision(32)


def test_nth_root_exact_perfect_power():
    r = nth_root(sc(16), 4, 0)
    assert r.is_exact and r.fraction() == 2
    r = nth_root(sc(Fraction(27, 8)), 3, 0)
    assert r.is_exact and r.fraction() == Fraction(3, 2)


def test_nth_root_branch_rotation():
    r = nth_root(sc(16), 4, 1)
    v = r.mpc()
    assert abs(v - mpmath.mpc(0, 2)) < mpmath.mpf("1e-70")


def test_nth_root_negative_rational_is_imaginary():
    x = sc(Fraction(-2, 11))
    r = nth_root(x, 2, 0)
    v = r.mpc()
    assert v.real == 0 or abs(v.real) < mpmath.mpf("1e-70")
    check = r * r - x
    assert check.mag() <= mpmath.mpf(2) ** (-128) * (1 + x.mag())


def test_nth_root_of_zero_any_branch():
    for branch in range(5):
        assert nth_root(sc(0), 5, branch).is_zero()


@given(rationals, st.integers(min_value=1, max_value=5),
       st.integers(min_value=0, max_value=4))
def test_nth_root_inverts(q, n, branch):
    if branch >= n:
        branch %= n
    x = sc(q)
    r = nth_root(x, n, branch)
    err = (r ** n - x).mag()
    assert err <= mpmath.mpf(2) ** (-128) * (1 + x.mag())


def test_nth_root_contract_violations():
    with pytest.raises(ContractViolation):
        nth_root(sc(2), 0, 0)
    with pytest.raises(ContractViolation):
        nth_root(sc(2), 3, 3)


def test_principal_branch_argument():
    # principal cube root of -8 has argument pi/3, not pi
    r = nth_root(sc(-8), 3, 0)
    v = r.mpc()
    assert v.imag > 0
    with mpmath.mp.workprec(256):
        ref = mpmath.mpc(1, mpmath.sqrt(3))
        assert abs(v - ref) < mpmath.mpf("1e-70")


def test_high_precision_multiplication_round_trip():
    # regression: operations must not round at the ambient 53-bit context
    c = nth_root(sc(Fraction(625, 128)), 4, 0)
    err = (c * c - c ** 2).mag()
    assert err <= mpmath.mpf(2) ** (-240)
    err = (-(-c) - c).mag()
    assert err == 0


def test_as_scalar_coercions():
    assert as_scalar(3).fraction() == 3
    assert as_scalar(Fraction(2, 7)).fraction() == Fraction(2, 7)
    assert not as_scalar(0.25).is_exact
    with pytest.raises(ContractViolation):
        as_scalar(object())


def test_magnitude_and_parts():
    z = Scalar.from_complex("3", "-4")
    assert abs(z.magnitude().mpc().real - 5) < mpmath.mpf("1e-70")
    assert abs(z.real().mpc().real - 3) < mpmath.mpf("1e-70")
    assert abs(z.imag().mpc().real + 4) < mpmath.mpf("1e-70")
    assert abs(z.conjugate().mpc().imag - 4) < mpmath.mpf("1e-70")
