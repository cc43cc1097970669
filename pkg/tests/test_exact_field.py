import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cgindex.exact_field import (
    ExactScalar,
    RadicandMismatch,
    ScalarParseError,
    ceil_of,
    floor_of,
    frac_of,
    is_squarefree,
    phi_of,
)

from oracles import interval_floor, mp_value, to_mp
from strategies import scalars

S = ExactScalar.parse


def test_floor_examples():
    assert floor_of(Fraction(3, 2)) == 1
    assert S("17/2√2").floor() == 12
    assert S("-√2").floor() == -2
    assert S("√2").floor() == 1
    assert ExactScalar(-3).floor() == -3


def test_phi_and_frac_examples():
    assert phi_of(5) == 0
    assert phi_of(Fraction(1, 2)) == 1
    assert phi_of(S("√2")) == 1
    half_root = S("1/2√2")
    assert half_root.frac_of_multiple(24) == S("-16+12√2")
    assert frac_of(half_root * 24) == S("-16+12√2")


def test_field_arithmetic_examples():
    r2 = ExactScalar.sqrt(2)
    assert r2 * r2 == 2
    assert (r2 * r2).is_integer
    assert (2 + r2).reciprocal() == S("1-1/2√2")
    assert (2 + r2) * (2 + r2).reciprocal() == 1
    assert 1 + S("1/2√2") < 2
    assert not 2 < 1 + S("1/2√2")


def test_resonance_arithmetic_anchor():
    r2 = ExactScalar.sqrt(2)
    assert -1 / r2 - 1 / (2 + r2) == -1


@pytest.mark.parametrize("text,a,b,D", [
    ("0", 0, 0, None),
    ("3/4", Fraction(3, 4), 0, None),
    ("√2", 0, 1, 2),
    ("-√2", 0, -1, 2),
    ("1/2√2", 0, Fraction(1, 2), 2),
    ("3-5/7√11", 3, Fraction(-5, 7), 11),
    ("1/2 + 1/3 sqrt5", Fraction(1, 2), Fraction(1, 3), 5),
    ("2√3", 0, 2, 3),
])
def test_parse(text, a, b, D):
    x = S(text)
    assert (x.a, x.b, x.radicand) == (Fraction(a), Fraction(b), D)


@pytest.mark.parametrize("bad", ["0.5", "1e3", "√4", "√1", "abc", "", "1/0", "√2+√3", "1//2"])
def test_parse_rejects(bad):
    with pytest.raises((ScalarParseError, ValueError, ZeroDivisionError)):
        S(bad)


@given(scalars())
def test_str_parse_round_trip(x):
    assert S(str(x)) == x


def test_radicand_rules():
    with pytest.raises(ValueError):
        ExactScalar(0, 1, 4)
    with pytest.raises(ValueError):
        ExactScalar(0, 1, 1)
    with pytest.raises(RadicandMismatch):
        ExactScalar.sqrt(2) + ExactScalar.sqrt(3)
    # rational values carry no radicand and mix with anything
    assert (ExactScalar(1, 0, 2) + ExactScalar.sqrt(3)).radicand == 3
    assert is_squarefree(30) and not is_squarefree(12)


def test_zero_division():
    with pytest.raises(ZeroDivisionError):
        ExactScalar(0).reciprocal()
    with pytest.raises(ZeroDivisionError):
        ExactScalar.sqrt(2) / 0


def test_hash_consistent_with_rationals():
    assert hash(ExactScalar(Fraction(1, 2))) == hash(ExactScalar(Fraction(2, 4)))
    assert ExactScalar(3) == 3
    assert {ExactScalar.sqrt(2): 1}[S("√2")] == 1


@given(scalars(), scalars())
def test_ring_identities(x, y):
    if x.radicand != y.radicand:
        y = ExactScalar(y.a, y.b, x.radicand)
    assert (x + y) - y == x
    assert x * y == y * x
    if y != 0:
        assert (x / y) * y == x


@given(scalars())
def test_floor_matches_interval_oracle(x):
    assert x.floor() == interval_floor(x.a, x.b, x.radicand)
    assert x.ceil() == -interval_floor(-x.a, -x.b, x.radicand)
    f = x.frac()
    assert 0 <= f < 1


@given(scalars(max_num=100, max_den=50), st.integers(1, 10**6))
def test_floor_of_multiple(x, m):
    assert x.floor_of_multiple(m) == (x * m).floor()
    assert x.floor_of_multiple(m) == interval_floor(x.a * m, x.b * m, x.radicand)


@given(scalars(), scalars())
def test_ordering_matches_numeric(x, y):
    if x.radicand != y.radicand:
        y = ExactScalar(y.a, y.b, x.radicand)
    vx, vy = to_mp(x), to_mp(y)
    if x == y:
        assert vx == vy
    else:
        assert (x < y) == (vx < vy)


def test_float_conversion():
    assert math.isclose(float(S("1/2√2")), math.sqrt(2) / 2)
    assert float(ExactScalar(Fraction(1, 3))) == 1 / 3
    assert abs(float(S("-7/3+2/9√13")) - float(mp_value(Fraction(-7, 3), Fraction(2, 9), 13))) < 1e-15


def test_sign_and_abs():
    assert S("1-√2").sign() == -1
    assert abs(S("1-√2")) == S("-1+√2")
    assert ExactScalar(0).sign() == 0
    assert ceil_of(S("√2")) == 2
