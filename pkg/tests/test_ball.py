import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from jfun import ball
from jfun.ball import Ball, DomainError, PrecisionError

mpmath.mp.prec = 300


def contains_mpf(b: Ball, value) -> bool:
    # value from mpmath at 300 bits; slack far below any radius tested
    v = Fraction(mpmath.nstr(value, 85, strip_zeros=False))
    slack = Fraction(1, 10**80)
    return b.lower() - slack <= v <= b.upper() + slack


def test_exact_construction():
    assert Ball.exact(0.75).mid() == Fraction(3, 4)
    assert Ball.exact(Fraction(5, 8)).is_exact()
    with pytest.raises(ValueError):
        Ball.exact(Fraction(1, 3))
    third = Ball.from_fraction(Fraction(1, 3), 64)
    assert third.contains(Fraction(1, 3)) and third.rad_float() < 2**-60


def test_pi_and_sqrt():
    pi = ball.const_pi(64)
    assert contains_mpf(pi, mpmath.pi) and pi.rad_float() < 1e-18
    pi_big = ball.const_pi(2000)
    assert pi_big.rad() < Fraction(1, 2**1990)
    assert contains_mpf(ball.sqrt(Ball(2), 128), mpmath.sqrt(2))
    assert contains_mpf(ball.rsqrt(Ball(3), 128), 1 / mpmath.sqrt(3))
    with pytest.raises(DomainError):
        ball.sqrt(Ball(-1), 64)


@pytest.mark.parametrize("x", [0.5, 1, 10, 100, -7.25, 1000.125])
def test_exp_contains(x):
    e = ball.exp(Ball.exact(x), 128)
    assert contains_mpf(e, mpmath.exp(mpmath.mpf(x)))
    assert e.rel_accuracy_bits() > 110


def test_exp_with_radius_contains_endpoints():
    x = Ball.from_float(2.0, 0.001)
    e = ball.exp(x, 80)
    assert contains_mpf(e, mpmath.exp(mpmath.mpf(1.999))) and contains_mpf(e, mpmath.exp(mpmath.mpf(2.001)))


@pytest.mark.parametrize("num,den", [(1, 8), (1, 3), (5, 7), (123456789, 1000003), (10**40 + 1, 97)])
def test_cos_two_pi_frac(num, den):
    c = ball.cos_two_pi_frac(num, den, 100)
    assert contains_mpf(c, mpmath.cos(2 * mpmath.pi * (num % den) / den))
    assert c.rad_float() < 2.0**-95


def test_cos_reduction_is_exact():
    for den in (7, 12, 1001):
        for num in (3, 5 * den + 3, 10**30 * den + 3):
            assert ball.cos_two_pi_frac(num, den, 80) == ball.cos_two_pi_frac(num % den, den, 80)


def test_cos_table_matches_mpmath():
    den, wp = 997, 90
    values, err = ball.cos_table_fixed(den, den // 2 + 1, wp)
    for t in (0, 1, 17, 250, den // 2):
        b = Ball(values[t], -wp, err, -wp)
        assert contains_mpf(b, mpmath.cos(2 * mpmath.pi * t / den))


@pytest.mark.parametrize("x", ["0.05", "0.5", "2", "10", "123.5", "8504.25"])
def test_bessel_i1_contains(x):
    b = ball.bessel_i1(Ball.exact(Fraction(x)) if Fraction(x).denominator in (1, 2, 4) else Ball.from_fraction(Fraction(x), 200), 160)
    assert contains_mpf(b, mpmath.besseli(1, mpmath.mpf(x)))
    assert b.rel_accuracy_bits() > 150


def test_bessel_known_values():
    assert ball.bessel_i1(Ball(2), 64).contains(Fraction("1.5906368546373290633908"))


def test_bessel_domain_and_precision_errors():
    with pytest.raises(DomainError):
        ball.bessel_i1(Ball(-1), 64)
    with pytest.raises(PrecisionError):
        ball.bessel_i1(Ball.from_float(3.0, 0.01), 64, min_rel_bits=60)


def test_bessel_positive_and_increasing():
    prev = Fraction(0)
    for i in range(1, 60):
        b = ball.bessel_i1(Ball.exact(Fraction(i, 4)), 64)
        assert b.lower() > prev
        prev = b.upper()


def test_i1_bounds_random():
    rng = random.Random(11)
    for _ in range(1000):
        x = Fraction(rng.randint(1, 104857), 2**20)
        assert ball.bessel_i1(Ball.exact(x), 64).upper() < Fraction(501, 1000) * x
    for _ in range(1000):
        x = Fraction(rng.randint(104858, 50 * 2**20 - 1), 2**20)
        xb = Ball.exact(x)
        assert ball.bessel_i1(xb, 64).upper() < ball.i1_exp_bound(x, 64)


def test_bessel_i1_upper_examples():
    small = ball.bessel_i1_upper(Ball.exact(Fraction(3277, 2**16))).upper()
    assert Fraction("0.0250078") < small <= Fraction(501, 1000) * Fraction(3277, 2**16)
    ten = ball.bessel_i1_upper(Ball(10)).upper()
    assert ten <= Fraction(math.exp(10) / math.sqrt(20 * math.pi)) and ten > Fraction("2670.98")
    with pytest.raises(DomainError):
        ball.i1_linear_bound(Fraction(1, 10))


finite = st.fractions(min_value=-1000, max_value=1000, max_denominator=2**20)
radius = st.fractions(min_value=0, max_value=1, max_denominator=2**10)


def _ball(center, rad):
    return Ball.from_endpoints(center - rad, center + rad, 80)


@settings(max_examples=150, deadline=None)
@given(finite, radius, finite, radius, st.sampled_from(["add", "sub", "mul"]))
def test_inclusion_monotone_binary(c1, r1, c2, r2, op):
    outer1, inner1 = _ball(c1, r1), _ball(c1, r1 / 2)
    outer2, inner2 = _ball(c2, r2), _ball(c2, r2 / 3)
    big = ball.elementary(op, [outer1, outer2], 80)
    small = ball.elementary(op, [inner1, inner2], 80)
    assert big.contains_ball(small)
    point = {"add": c1 + c2, "sub": c1 - c2, "mul": c1 * c2}[op]
    assert small.contains(point)


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=Fraction(1, 10), max_value=50, max_denominator=2**12), radius)
def test_inclusion_monotone_unary(c, r):
    r = r / 100
    outer, inner = _ball(c, r), _ball(c, r / 4)
    for op in ("sqrt", "exp", "rsqrt"):
        assert ball.elementary(op, [outer], 64).contains_ball(ball.elementary(op, [inner], 64))
    assert ball.bessel_i1(outer, 64).contains_ball(ball.bessel_i1(inner, 64))
    q = ball.div(outer, _ball(c + 1, r), 64)
    assert q.contains(c / (c + 1))


def test_unique_integer():
    assert ball.unique_integer(Ball.from_float(5.0, 0.4)) == 5
    assert ball.unique_integer(Ball.from_float(5.5, 0.6)) is None
    assert ball.unique_integer(Ball.from_float(5.5, 0.25)) is None


def test_elementary_rejects_low_precision():
    with pytest.raises(ValueError):
        ball.elementary("add", [Ball(1), Ball(2)], 8)
    with pytest.raises(DomainError):
        ball.div(Ball(1), Ball.from_float(0.0, 0.5), 64)
