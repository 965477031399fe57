from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from painleve_hh import ContractViolation, PuiseuxSeries, Scalar

small_coeffs = st.lists(
    st.builds(Fraction, st.integers(min_value=-9, max_value=9),
              st.integers(min_value=1, max_value=4)),
    min_size=1, max_size=5,
)


def S(lead, coeffs, step=1, complete=False):
    return PuiseuxSeries(lead, step, [Scalar.exact(c) for c in coeffs],
                         complete=complete)


@given(small_coeffs, small_coeffs, small_coeffs)
def test_ring_identities_on_complete_series(a, b, c):
    A = S(-2, a, complete=True)
    B = S(0, b, complete=True)
    C = S(1, c, complete=True)
    lhs = (A + B) * C
    rhs = A * C + B * C
    for e in set(lhs.exponents()) | set(rhs.exponents()):
        le, re = lhs.coefficient(e), rhs.coefficient(e)
        assert le is not None and re is not None
        assert (le - re).is_zero()


def test_truncation_window_of_product():
    # 10 known coefficients starting at t^-2, times itself
    A = S(-2, range(1, 11))
    assert A.max_exp == 7
    P = A * A
    assert P.lead == Fraction(-4)
    assert P.max_exp == 5  # -2 + 7
    # the coefficient beyond the window is unknown, not zero
    assert P.coefficient(6) is None
    assert P.coefficient(5) is not None


def test_mixed_step_arithmetic():
    half = S(Fraction(-3, 2), [1, 0, 2], step=Fraction(1, 2))
    whole = S(-2, [1, 1, 1])
    prod = half * whole
    assert prod.step == Fraction(1, 2)
    assert prod.lead == Fraction(-7, 2)
    total = half + whole
    assert total.coefficient(-2).fraction() == 1
    assert total.coefficient(Fraction(-3, 2)).fraction() == 1


def test_complete_flag_semantics():
    fixture = PuiseuxSeries.monomial(1, -2)
    assert fixture.complete
    cube = fixture.pow_int(3)
    assert cube.complete
    assert cube.coefficient(-6).fraction() == 1
    assert cube.coefficient(0).is_zero()  # exact zero, not unknown
    truncated = S(-2, [1, 2, 3])
    mixed = fixture * truncated
    assert not mixed.complete
    assert mixed.max_exp == truncated.max_exp + Fraction(-2)


def test_differentiate():
    a = S(-2, [3, 0, 5])  # 3 t^-2 + 5
    d = a.differentiate()
    assert d.coefficient(-3).fraction() == -6
    assert d.coefficient(-1).fraction() == 0
    half = S(Fraction(-3, 2), [2], step=Fraction(1, 2))
    dh = half.differentiate()
    assert dh.coefficient(Fraction(-5, 2)).fraction() == -3


def test_differentiate_keeps_exactness_at_zero_exponent():
    a = S(0, [7, 1])
    d = a.differentiate()
    c = d.coefficient(-1)
    assert c.is_exact and c.is_zero()


def test_evaluate_against_direct_sum():
    s = S(-2, [Fraction(1), Fraction(-3, 2), Fraction(2, 7)])
    t = Scalar.exact(1, 3)
    direct = (Scalar.exact(9) - Scalar.exact(3, 2) * 3
              + Scalar.exact(2, 7))
    got = s.evaluate(t)
    assert (got - direct).mag() < mpmath.mpf(2) ** (-200)


def test_evaluate_half_integer_grid():
    s = PuiseuxSeries(Fraction(-3, 2), Fraction(1, 2),
                      [Scalar.exact(1), Scalar.exact(0), Scalar.exact(2)])
    t = Scalar.exact(1, 4)
    # t^(-3/2) + 2 t^(-1/2) = 8 + 4
    assert (s.evaluate(t) - Scalar.exact(12)).mag() < mpmath.mpf(2) ** (-200)


def test_evaluate_at_center_rejected():
    s = S(-2, [1])
    with pytest.raises(ContractViolation):
        s.evaluate(Scalar.exact(0))


def test_center_mismatch_rejected():
    a = S(0, [1])
    b = PuiseuxSeries(0, 1, [Scalar.exact(1)], center=Scalar.exact(1))
    with pytest.raises(ContractViolation):
        a + b


def test_zero_series_behavior():
    z = PuiseuxSeries.zero()
    assert z.is_identically_zero()
    a = S(-1, [2, 3])
    assert (a + z).coefficient(-1).fraction() == 2
    assert (a * z).is_identically_zero()


def test_normalized_drops_exact_leading_zeros():
    s = S(-2, [0, 0, 5, 1])
    n = s.normalized()
    assert n.lead == 0
    assert n.coefficient(0).fraction() == 5


def test_truncate():
    s = S(-2, range(10))
    t = s.truncate(2)
    assert t.max_exp == 2
    assert not t.complete


def test_coefficient_off_grid_inside_window():
    s = S(-2, [1, 2], step=1)
    c = s.coefficient(Fraction(-3, 2))
    assert c is not None and c.is_zero()
