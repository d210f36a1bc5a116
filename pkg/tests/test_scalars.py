"""Field laws and text round trips for the exact scalar ring."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qmatball.scalars import QScalar, parse_scalar, render_scalar

q = QScalar.q_power
rat = QScalar.rational


def gauss_fractions():
    small = st.fractions(min_value=-4, max_value=4, max_denominator=3)
    return st.tuples(small, small)


@st.composite
def scalars(draw, allow_denominator=True):
    terms = draw(st.lists(
        st.tuples(st.integers(min_value=-6, max_value=6), gauss_fractions()),
        min_size=0, max_size=4,
    ))
    out = QScalar.zero()
    for e, (re, im) in terms:
        out = out + QScalar.s_power(e, (re, im))
    if allow_denominator and draw(st.booleans()):
        den = draw(scalars(allow_denominator=False))
        if not den.is_zero():
            out = out * den.invert()
    return out


@given(scalars(), scalars(), scalars())
@settings(max_examples=60, deadline=None)
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(scalars())
@settings(max_examples=60, deadline=None)
def test_additive_and_multiplicative_inverses(a):
    assert (a - a).is_zero()
    if not a.is_zero():
        assert (a * a.invert()).is_one()


@given(scalars())
@settings(max_examples=60, deadline=None)
def test_conjugation_is_an_involution(a):
    assert a.conj().conj() == a
    assert (a * a.conj()).is_real()


@given(scalars())
@settings(max_examples=80, deadline=None)
def test_render_parse_round_trip(a):
    assert parse_scalar(render_scalar(a)) == a


@given(scalars(), scalars())
@settings(max_examples=40, deadline=None)
def test_numeric_evaluation_is_a_homomorphism(a, b):
    qv = 0.4
    lhs = (a * b).eval(qv)
    rhs = a.eval(qv) * b.eval(qv)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


def test_rendered_forms():
    assert str(q(2)) == "q^2"
    assert str(q(-1)) == "q^(-1)"
    assert str(q(Fraction(-3, 2))) == "q^(-3/2)"
    assert str(QScalar.lam()) == "q - q^(-1)"
    assert str(rat(1) - q(2)) == "(-1)*q^2 + 1"
    assert str(QScalar.i_unit()) == "(i)"
    assert str((rat(1) - q(2)).invert()) == "1/((-1)*q^2 + 1)"


def test_q_power_rejects_thirds():
    with pytest.raises(ValueError):
        q(Fraction(1, 3))


def test_lambda_value():
    lam = QScalar.lam()
    assert abs(lam.eval(0.5) - (0.5 - 2.0)) < 1e-15


def test_power_operator_handles_negative_exponents():
    a = rat(1) + q(1)
    assert a ** 0 == QScalar.one()
    assert a ** 3 == a * a * a
    assert a ** -2 == (a * a).invert()
