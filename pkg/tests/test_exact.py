import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bornlab.exact import ONE, SQRT2, ZERO, ZSqrt2

coef = st.integers(min_value=-10**6, max_value=10**6)
elements = st.builds(ZSqrt2, coef, coef)


def test_multiplication_rule():
    # (a+b√2)(c+d√2) = (ac+2bd) + (ad+bc)√2
    assert ZSqrt2(3, -2) * ZSqrt2(-1, 5) == ZSqrt2(3 * -1 + 2 * -2 * 5, 3 * 5 + -2 * -1)
    assert SQRT2 * SQRT2 == 2
    assert ZSqrt2(1, 1) * ZSqrt2(-1, 1) == ONE


@given(elements, elements, elements)
def test_ring_laws_hold_exactly(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert x + ZERO == x and x * ONE == x
    assert x - x == ZERO


@given(elements)
def test_sign_matches_float(x):
    f = float(x)
    if x == ZERO:
        assert x.sign() == 0
    else:
        # |a + b√2| >= 1/(|a| + |b|√2) for nonzero elements, far above rounding here
        assert x.sign() == (1 if f > 0 else -1)


@given(elements)
def test_norm_is_multiplicative_with_conjugate(x):
    assert x * x.conjugate() == x.norm()


def test_equality_with_ints_and_hash():
    assert ZSqrt2(4, 0) == 4
    assert ZSqrt2(4, 1) != 4
    assert len({ZSqrt2(1, 2), ZSqrt2(1, 2), ZSqrt2(2, 1)}) == 2


def test_overflow_is_detected():
    big = ZSqrt2(2**62, 0)
    with pytest.raises(OverflowError):
        big * 4
    with pytest.raises(OverflowError):
        ZSqrt2(2**63, 0)


def test_pair_round_trip_and_validation():
    assert ZSqrt2.from_pair([3, -1]) == ZSqrt2(3, -1)
    assert ZSqrt2(3, -1).to_pair() == [3, -1]
    for bad in ([1], [1.0, 2], [True, 0]):
        with pytest.raises(ValueError):
            ZSqrt2.from_pair(bad)


def test_float_value():
    assert float(ZSqrt2(1, 1)) == pytest.approx(1 + math.sqrt(2))
    assert str(ZSqrt2(1, -1)) == "1-1√2"


def test_immutable():
    x = ZSqrt2(1, 2)
    with pytest.raises(AttributeError):
        x._a = 5
