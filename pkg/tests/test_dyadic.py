from hypothesis import given, strategies as st

import pytest

from positree.dyadic import Dyadic, ONE, ZERO, half_power


dyadics = st.builds(Dyadic, st.integers(-(2**40), 2**40), st.integers(0, 50))


def test_normalization():
    assert Dyadic(4, 2) == Dyadic(1, 0)
    assert Dyadic(6, 1) == Dyadic(3, 0)
    assert Dyadic(0, 7).exp == 0
    assert Dyadic(3, 2).num == 3 and Dyadic(3, 2).exp == 2
    assert Dyadic(-4, 3) == Dyadic(-1, 1)


def test_arithmetic_examples():
    assert Dyadic(1, 1) + Dyadic(1, 2) == Dyadic(3, 2)
    assert Dyadic(3, 2) - Dyadic(1, 2) == Dyadic(1, 1)
    assert Dyadic(3, 2) * Dyadic(1, 1) == Dyadic(3, 3)
    assert ONE - Dyadic(1, 2) == Dyadic(3, 2)
    assert Dyadic(1, 1).shift_down(2) == Dyadic(1, 3)
    assert half_power(3) == Dyadic(1, 3)


def test_comparisons():
    assert Dyadic(1, 2) < Dyadic(1, 1) < ONE
    assert Dyadic(3, 2) > Dyadic(1, 1)
    assert not Dyadic(3, 2) > Dyadic(3, 2)
    assert ZERO < Dyadic(1, 20)
    assert Dyadic(2, 0) == 2
    assert Dyadic(1, 1) < 1


def test_parse_format_round_trip():
    for text in ["0", "1", "3/2^2", "-5/2^7", "11/2^4"]:
        assert str(Dyadic.parse(text)) == text
    assert Dyadic.parse("4/2^2") == ONE
    with pytest.raises(ValueError):
        Dyadic.parse("1/3")
    with pytest.raises(ValueError):
        Dyadic.parse("0.5")


@given(dyadics, dyadics)
def test_no_drift(a, b):
    assert (a + b) - b == a


@given(dyadics, dyadics, dyadics)
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c


@given(dyadics, dyadics)
def test_order_consistent_with_subtraction(a, b):
    assert (a < b) == (b - a).is_positive
