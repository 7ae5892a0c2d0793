from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hmfkernel.coeffs import Cyclotomic, FormalLog, PAdic, TagMismatch, coerce, tag_of, to_padic


def test_cube_root_of_unity_relations():
    w = Cyclotomic.root_of_unity(1, 3)
    assert w * w * w == 1
    assert 1 + w + w * w == 0
    assert (w * w).conjugate() == w


def test_mixed_orders_lift_to_lcm():
    i = Cyclotomic.root_of_unity(1, 4)
    w = Cyclotomic.root_of_unity(1, 3)
    z = i * w
    assert z.m == 12
    assert z ** 12 == 1
    assert z ** 4 != 1 and z ** 6 != 1


def test_rational_results_collapse_to_fraction():
    w = Cyclotomic.root_of_unity(1, 3)
    s = w + w.conjugate()
    assert isinstance(s, Fraction) and s == -1
    assert Cyclotomic(3, [Fraction(2), Fraction(0)]).simplify() == 2


@st.composite
def cyclo(draw, m=5):
    return Cyclotomic(m, [Fraction(draw(st.integers(-5, 5))) for _ in range(4)])


@given(cyclo(), cyclo(), cyclo())
def test_cyclotomic_ring_laws(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)


@given(st.integers(0, 5 ** 4), st.integers(0, 5 ** 4), st.integers(0, 5 ** 4))
def test_padic_ring_laws(x, y, z):
    a, b, c = PAdic(5, 4, x), PAdic(5, 4, y), PAdic(5, 4, z)
    assert (a + b) * c == a * c + b * c
    assert a - a == 0


@given(st.integers(1, 5 ** 4).filter(lambda n: n % 5))
def test_padic_inverse(x):
    a = PAdic(5, 4, x)
    assert a * a.inverse() == 1


def test_padic_non_unit_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        PAdic(5, 3, 10).inverse()


def test_padic_precision_mismatch():
    with pytest.raises(TagMismatch):
        PAdic(5, 3, 1) + PAdic(5, 4, 1)
    with pytest.raises(TagMismatch):
        to_padic(PAdic(5, 3, 1), 5, 4)


def test_rational_to_padic():
    assert to_padic(Fraction(1, 2), 5, 2) * 2 == 1


def test_formal_log_is_additive_only():
    a = FormalLog.basis("3", 2) + FormalLog.basis("5", -1)
    assert (a - a) == 0
    assert (a * 3).terms == {"3": Fraction(6), "5": Fraction(-3)}
    with pytest.raises(TagMismatch):
        a + Fraction(1)
    with pytest.raises(TagMismatch):
        a * a


def test_tags():
    assert tag_of(Fraction(1)) == "rational"
    assert tag_of(Cyclotomic.root_of_unity(1, 3)) == "cyclotomic"
    assert tag_of(coerce(3)) == "rational"
