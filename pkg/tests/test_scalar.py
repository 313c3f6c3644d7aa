import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hadamard_rw.scalar import (
    HALF,
    INV_SQRT2,
    ONE,
    DyadicRoot2,
    DyadicVector,
    QSqrt2,
    Scale,
    dy_add,
    dy_mul,
    dy_scale_half,
    dy_scale_inv_sqrt2,
    dy_scale_sqrt2,
    dy_to_float,
    format_exact,
    parse_dyadic,
    parse_exact,
)

ints = st.integers(min_value=-(10**6), max_value=10**6)
small_k = st.integers(min_value=0, max_value=20)
dyadics = st.builds(DyadicRoot2, ints, ints, small_k)


def triple(x):
    return (x.a, x.b, x.k)


def test_add_examples():
    assert triple(dy_add(DyadicRoot2(1), DyadicRoot2(1))) == (2, 0, 0)
    assert triple(dy_add(DyadicRoot2(1), DyadicRoot2(0, 1, 1))) == (2, 1, 1)
    assert triple(dy_add(DyadicRoot2(1, 0, 1), DyadicRoot2(-1, 0, 1))) == (0, 0, 0)


def test_scale_half_examples():
    assert triple(dy_scale_half(DyadicRoot2(1))) == (1, 0, 1)
    assert triple(dy_scale_half(DyadicRoot2(0))) == (0, 0, 0)
    # (2, 0, 1) canonicalises to (1, 0, 0) before halving
    assert triple(DyadicRoot2(2, 0, 1)) == (1, 0, 0)
    assert triple(dy_scale_half(DyadicRoot2(2, 0, 1))) == (1, 0, 1)


def test_scale_inv_sqrt2_examples():
    assert triple(dy_scale_inv_sqrt2(ONE)) == (0, 1, 1)
    assert triple(dy_scale_inv_sqrt2(DyadicRoot2(0, 1, 1))) == (1, 0, 1)
    assert dy_scale_inv_sqrt2(dy_scale_inv_sqrt2(ONE)) == HALF


def test_mul_examples():
    r2 = DyadicRoot2(0, 1, 0)
    assert triple(dy_mul(r2, r2)) == (2, 0, 0)
    assert triple(dy_mul(DyadicRoot2(1, 1), DyadicRoot2(1, -1))) == (-1, 0, 0)
    x = DyadicRoot2(3, -5, 4)
    assert dy_mul(x, ONE) == x


def test_to_float_examples():
    assert dy_to_float(DyadicRoot2(1, 0, 1)) == 0.5
    assert dy_to_float(DyadicRoot2(0, 1, 1)) == 0.7071067811865476
    assert dy_to_float(DyadicRoot2(0, 0, 5)) == 0.0


def test_to_float_overflow():
    with pytest.raises(OverflowError):
        dy_to_float(DyadicRoot2(1 << 2000))


def test_to_float_cancellation_is_accurate():
    # 99 - 70*sqrt2 ~ 0.00505 is a near-cancellation; float arithmetic loses digits
    x = DyadicRoot2(99, -70)
    assert dy_to_float(x) == pytest.approx(0.005050633883346584, rel=1e-15)


def test_string_round_trip():
    assert str(DyadicRoot2(0, 1, 1)) == "0+1*sqrt2/2^1"
    assert parse_dyadic("0+1*sqrt2/2^1") == INV_SQRT2
    assert parse_dyadic("1+-1*sqrt2/2^0") == DyadicRoot2(1, -1)
    assert parse_dyadic("7") == DyadicRoot2(7)
    with pytest.raises(ValueError):
        parse_dyadic("0.5")


def test_immutable():
    with pytest.raises(AttributeError):
        ONE.a = 3


@given(dyadics)
def test_canonical_form(x):
    assert x.k == 0 or (x.a % 2 == 1 or x.b % 2 == 1)
    assert x.k >= 0


@given(ints, ints, small_k, st.integers(min_value=0, max_value=10))
def test_canonicalisation_preserves_value(a, b, k, extra):
    x = DyadicRoot2(a, b, k)
    y = DyadicRoot2(a << extra, b << extra, k + extra)
    assert x == y
    assert triple(DyadicRoot2(*triple(x))) == triple(x)
    assert dy_to_float(x) == dy_to_float(y)


def _close(exact, approx):
    return math.isclose(dy_to_float(exact), approx, rel_tol=1e-12, abs_tol=1e-12 * max(1.0, abs(approx)))


@given(dyadics, dyadics)
def test_ring_ops_match_float(x, y):
    fx, fy = dy_to_float(x), dy_to_float(y)
    assert _close(x + y, fx + fy) or abs(fx + fy) < 1e-6
    assert _close(x * y, fx * fy) or abs(fx * fy) < 1e-6
    assert _close(dy_scale_half(x), fx / 2)
    assert _close(dy_scale_inv_sqrt2(x), fx / math.sqrt(2))


@given(dyadics)
def test_inv_sqrt2_twice_is_half(x):
    assert dy_scale_inv_sqrt2(dy_scale_inv_sqrt2(x)) == dy_scale_half(x)
    assert dy_scale_sqrt2(dy_scale_inv_sqrt2(x)) == x


@given(dyadics, dyadics)
def test_equality_is_exact(x, y):
    same = (x - y) == DyadicRoot2()
    assert same == (x == y)
    if not same:
        # distinct small instances have distinct float images
        assert dy_to_float(x) != dy_to_float(y) or abs(dy_to_float(x)) > 1e12


@given(dyadics, dyadics)
def test_ordering_matches_float(x, y):
    fx, fy = dy_to_float(x), dy_to_float(y)
    if abs(fx - fy) > 1e-9:
        assert (x < y) == (fx < fy)


def test_qsqrt2_arithmetic():
    x = QSqrt2(1, 1)
    assert x * QSqrt2(1, -1) == -1
    assert x / x == 1
    assert (QSqrt2(3) / QSqrt2(0, 1)) == QSqrt2(0, Fraction(3, 2))
    assert float(QSqrt2(Fraction(1, 3), Fraction(1, 5))) == pytest.approx(1 / 3 + math.sqrt(2) / 5)
    with pytest.raises(ZeroDivisionError):
        x / QSqrt2()


def test_format_exact():
    assert format_exact(QSqrt2(Fraction(1, 4))) == "1+0*sqrt2/2^2"
    assert format_exact(QSqrt2(Fraction(1, 46))) == "1/46+0*sqrt2"
    assert parse_exact("1/46+0*sqrt2") == QSqrt2(Fraction(1, 46))
    assert parse_exact("1+0*sqrt2/2^2") == DyadicRoot2(1, 0, 2)


def test_scale():
    s = Scale(Fraction(1, 46))
    assert s.rational() is None
    assert float(s) == pytest.approx(1 / math.sqrt(46))
    assert (s * s).rational() == Fraction(1, 46)
    assert Scale.of(INV_SQRT2) == Scale(Fraction(1, 2))
    with pytest.raises(ValueError):
        Scale(0)


@given(st.lists(dyadics, min_size=1, max_size=12))
def test_vector_round_trip(vals):
    v = DyadicVector.from_scalars(vals)
    assert v.to_list() == vals
    assert v.k == 0 or any(x % 2 for x in v.a + v.b)


@given(st.lists(dyadics, min_size=1, max_size=8), st.integers(min_value=0, max_value=9))
def test_vector_sqrt2_power(vals, n):
    v = DyadicVector.from_scalars(vals)
    out = v.scale_sqrt2_pow(n).to_list()
    for x, y in zip(vals, out):
        for _ in range(n):
            x = dy_scale_sqrt2(x)
        assert x == y
