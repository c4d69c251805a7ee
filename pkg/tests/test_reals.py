from decimal import Decimal
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from apavoid.errors import UndecidableBoundary, UndecidableFloor
from apavoid.reals import (
    Enclosure,
    Quadratic,
    as_real,
    ceil_div,
    format_exact,
    frac,
    locate_subinterval,
    parse_exact,
)

from oracles import dec

SQRT2 = parse_exact("sqrt(2)")

rationals = st.fractions(max_denominator=60).filter(lambda q: abs(q) < 10**4)
radicands = st.sampled_from([2, 3, 5, 6, 7, 10, 12, 18, 1001])


def test_frac_rational_examples():
    assert frac(F(7, 3)) == F(1, 3)
    assert frac(F(-1, 2)) == F(1, 2)
    assert frac(F(-1, 2)).kind == "rational"


def test_frac_sqrt2_against_decimal():
    f = frac(SQRT2, F(1, 10**6))
    lo, hi = f.current_enclosure
    assert hi - lo <= F(1, 10**6)
    ref = dec(0, 1, 2) - 1
    assert Decimal(lo.numerator) / lo.denominator <= ref <= Decimal(hi.numerator) / hi.denominator


@pytest.mark.parametrize(
    "x, N, expected",
    [(F(1, 2), 3, 1), (SQRT2, 3, 1), (F(2, 3), 3, 2), (F(-1, 3), 3, 2), (F(0), 1, 0)],
)
def test_locate_subinterval(x, N, expected):
    assert locate_subinterval(x, N) == expected


@pytest.mark.parametrize(
    "a, b, expected", [(F(9, 2), 1, 5), (0, F(7, 3), 0), (F(-1, 2), 1, 0), (7, 7, 1)]
)
def test_ceil_div(a, b, expected):
    assert ceil_div(a, b) == expected


def test_ceil_div_rejects_nonpositive_divisor():
    with pytest.raises(ValueError):
        ceil_div(1, 0)


@given(rationals, st.integers(1, 30))
def test_locate_matches_definition_for_rationals(x, N):
    i = locate_subinterval(x, N)
    fr = x - (x.numerator // x.denominator)
    assert i <= N * fr < i + 1
    assert 0 <= i < N


@given(rationals, rationals.filter(lambda b: b != 0), radicands)
def test_quadratic_floor_and_sign_against_decimal(a, b, d):
    q = Quadratic(a, b, d)
    ref = dec(a, b, d)
    assert q.floor() == int(ref.to_integral_value(rounding="ROUND_FLOOR"))
    assert q.sign() == (1 if ref > 0 else -1)


@given(rationals, rationals, radicands, st.integers(1, 200))
def test_refine_reaches_any_width(a, b, d, bits):
    q = Quadratic(a, b, d)
    w = F(1, 2**bits)
    lo, hi = q.refine(w).current_enclosure
    assert hi - lo <= w
    assert lo <= q <= hi if not q.is_rational else lo == hi == q


def test_refine_halving_shrinks_width():
    widths = []
    w = F(1)
    for _ in range(40):
        lo, hi = SQRT2.refine(w).current_enclosure
        widths.append(hi - lo)
        w /= 2
    assert all(x <= F(1, 2**i) for i, x in enumerate(widths))


@given(rationals, rationals, radicands, rationals, rationals)
def test_field_arithmetic_is_exact(a, b, d, c, e):
    x = Quadratic(a, b, d)
    y = Quadratic(c, e, d)
    assert (x + y) - y == x
    assert (x * y) == Quadratic(a * c + b * e * d, a * e + b * c, d)
    if y.sign() != 0:
        assert (x * y) / y == x


def test_square_extraction_and_rational_collapse():
    assert parse_exact("sqrt(8)") == 2 * SQRT2
    assert parse_exact("sqrt(9)") == 3
    assert isinstance(parse_exact("sqrt(9)"), F)
    assert SQRT2 * SQRT2 == 2


@pytest.mark.parametrize(
    "text",
    ["3", "-7/2", "1/2+sqrt(2)", "(1+sqrt(5))/2", "sqrt(2)/10", "-1/3*sqrt(7)", "2-sqrt(3)"],
)
def test_format_parse_round_trip(text):
    v = parse_exact(text)
    assert parse_exact(format_exact(v)) == v


@pytest.mark.parametrize("text", ["0.5", "1e3", "", "x", "sqrt(sqrt(2))", "2**-1", "1/0"])
def test_parse_rejects_inexact_or_bad_input(text):
    with pytest.raises(ValueError):
        parse_exact(text)


def test_floats_are_refused():
    with pytest.raises(TypeError):
        as_real(0.5)


def test_ordering_mixes_fractions_and_surds():
    assert F(1) < SQRT2 < F(3, 2)
    assert sorted([F(3, 2), SQRT2, 1]) == [1, SQRT2, F(3, 2)]
    assert not (SQRT2 == F(7, 5))


def _sqrt2_enclosure(**kw):
    return Enclosure(lambda w: SQRT2.enclosure(w), **kw)


def test_enclosure_kind_decides_away_from_boundaries():
    e = _sqrt2_enclosure()
    assert e.kind == "enclosure"
    assert e.floor() == 1
    assert locate_subinterval(e, 3) == 1
    assert (e / 3 < F(1, 2)) is True


def test_enclosure_at_integer_is_undecidable():
    e = _sqrt2_enclosure(max_width=F(1, 2**64))
    two = e * e
    with pytest.raises(UndecidableFloor):
        two.floor()
    with pytest.raises(UndecidableBoundary):
        locate_subinterval(two, 2)
    with pytest.raises(UndecidableFloor):
        frac(two)


def test_mixed_fields_fall_back_to_enclosures():
    s3 = parse_exact("sqrt(3)")
    v = SQRT2 + s3
    assert v.kind == "enclosure"
    assert v.floor() == 3  # 3.146...
    assert (SQRT2 * s3).floor() == 2  # sqrt(6) = 2.449...
