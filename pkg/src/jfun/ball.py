"""Midpoint-radius real balls with rigorous enclosure semantics.

A :class:`Ball` is ``man * 2**exp +/- rman * 2**rexp``.  Midpoints are
arbitrary-precision dyadics; radii carry at most ``RAD_BITS`` bits and are
always rounded away from zero, so every operation returns a ball containing
the exact image of every point of its inputs.

Transcendental kernels (pi, exp, sin/cos, I1) run on fixed-point Python
integers with explicit error counts, then wrap the result once.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Tuple, Union

RAD_BITS = 30
MIN_PREC = 32

Rational = Union[int, Fraction]


class DomainError(ArithmeticError):
    """The input interval meets a singularity or leaves the function domain."""


class PrecisionError(ArithmeticError):
    """Requested accuracy was not reached; ``radius`` holds what was achieved."""

    def __init__(self, message: str, radius: "Ball"):
        super().__init__(message)
        self.radius = radius


# -- radius helpers (nonnegative, rounded up) --------------------------------


def _mag_up(m: int, e: int) -> Tuple[int, int]:
    bl = m.bit_length()
    if bl <= RAD_BITS:
        return m, e
    s = bl - RAD_BITS
    q = m >> s
    if (q << s) != m:
        q += 1
    return q, e + s


def _mag_down(m: int, e: int) -> Tuple[int, int]:
    bl = m.bit_length()
    if bl <= RAD_BITS:
        return m, e
    s = bl - RAD_BITS
    return m >> s, e + s


def _mag_add(m1: int, e1: int, m2: int, e2: int) -> Tuple[int, int]:
    if m1 == 0:
        return m2, e2
    if m2 == 0:
        return m1, e1
    if e1 < e2:
        m1, e1, m2, e2 = m2, e2, m1, e1
    if e1 - e2 > RAD_BITS + 8:
        # the smaller term is below one unit of the larger
        return _mag_up(m1 + 1, e1)
    return _mag_up((m1 << (e1 - e2)) + m2, e2)


def _mag_mul(m1: int, e1: int, m2: int, e2: int) -> Tuple[int, int]:
    if m1 == 0 or m2 == 0:
        return 0, 0
    return _mag_up(m1 * m2, e1 + e2)


def _mag_div(m1: int, e1: int, m2: int, e2: int) -> Tuple[int, int]:
    """Upper bound for (m1 2^e1) / (m2 2^e2); m2 > 0."""
    if m1 == 0:
        return 0, 0
    shift = RAD_BITS + 2
    return _mag_up((m1 << shift) // m2 + 1, e1 - e2 - shift)


def _round(man: int, exp: int, prec: int) -> Tuple[int, int, int, int]:
    """Truncate ``man`` to ``prec`` bits; returns (man, exp, err_man, err_exp)."""
    bl = man.bit_length() if man >= 0 else (-man).bit_length()
    if bl <= prec:
        return man, exp, 0, 0
    s = bl - prec
    q = man >> s
    if (q << s) == man:
        return q, exp + s, 0, 0
    return q, exp + s, 1, exp + s


def _top(man: int, exp: int) -> int:
    """Exponent t with |man 2^exp| < 2^t (meaningless for man == 0)."""
    return (man if man >= 0 else -man).bit_length() + exp


class Ball:
    """Real interval ``[mid - rad, mid + rad]`` with dyadic midpoint."""

    __slots__ = ("man", "exp", "rman", "rexp")

    def __init__(self, man: int = 0, exp: int = 0, rman: int = 0, rexp: int = 0):
        if rman < 0:
            raise ValueError("radius must be nonnegative")
        self.man = int(man)
        self.exp = int(exp)
        if rman:
            self.rman, self.rexp = _mag_up(int(rman), int(rexp))
        else:
            self.rman, self.rexp = 0, 0

    # -- construction -----------------------------------------------------

    @classmethod
    def exact(cls, value: Union[int, float, Fraction]) -> "Ball":
        """Exact ball for an int, float or dyadic fraction."""
        if isinstance(value, int):
            return cls(value, 0)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError("non-finite midpoint")
            num, den = value.as_integer_ratio()
            return cls(num, -(den.bit_length() - 1))
        value = Fraction(value)
        den = value.denominator
        if den & (den - 1):
            raise ValueError(f"{value} is not dyadic; use from_fraction")
        return cls(value.numerator, -(den.bit_length() - 1))

    @classmethod
    def from_float(cls, mid: float, rad: float = 0.0) -> "Ball":
        b = cls.exact(mid)
        if rad:
            r = cls.exact(abs(rad))
            return cls(b.man, b.exp, abs(r.man), r.exp)
        return b

    @classmethod
    def from_fraction(cls, value: Rational, prec: int) -> "Ball":
        value = Fraction(value)
        return div(cls.exact(value.numerator), cls.exact(value.denominator), prec)

    @classmethod
    def from_endpoints(cls, lo: Fraction, hi: Fraction, prec: int) -> "Ball":
        """Smallest-ish ball at ``prec`` bits containing the dyadic interval [lo, hi]."""
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError("lo > hi")
        mid = (lo + hi) / 2
        half = (hi - lo) / 2
        m = Ball.exact(mid) if _is_dyadic(mid) else Ball.from_fraction(mid, prec + 8)
        m = set_prec(m, prec)
        r = _mag_from_fraction_up(half)
        rm, re = _mag_add(m.rman, m.rexp, *r)
        return cls(m.man, m.exp, rm, re)

    # -- inspection -------------------------------------------------------

    def is_exact(self) -> bool:
        return self.rman == 0

    def is_zero(self) -> bool:
        return self.man == 0 and self.rman == 0

    def mid(self) -> Fraction:
        return _dyadic(self.man, self.exp)

    def rad(self) -> Fraction:
        return _dyadic(self.rman, self.rexp)

    def lower(self) -> Fraction:
        return self.mid() - self.rad()

    def upper(self) -> Fraction:
        return self.mid() + self.rad()

    def mid_float(self) -> float:
        return _to_float(self.man, self.exp)

    def rad_float(self) -> float:
        return _to_float(self.rman, self.rexp)

    def __float__(self) -> float:
        return self.mid_float()

    def abs_upper_mag(self) -> Tuple[int, int]:
        """(m, e) with |x| <= m 2^e for every x in the ball."""
        mm, me = _mag_up(abs(self.man), self.exp)
        return _mag_add(mm, me, self.rman, self.rexp)

    def log2_abs_upper(self) -> float:
        """Upper bound for log2|x| (``-inf`` for the zero ball)."""
        m, e = self.abs_upper_mag()
        if m == 0:
            return float("-inf")
        return math.log2(m) + e

    def rel_accuracy_bits(self) -> float:
        """Roughly log2(|mid| / rad); ``inf`` for exact nonzero balls."""
        if self.rman == 0:
            return float("inf")
        if self.man == 0:
            return float("-inf")
        return _top(self.man, self.exp) - _top(self.rman, self.rexp)

    def contains(self, value: Union[Rational, float]) -> bool:
        value = Fraction(value)
        return abs(value - self.mid()) <= self.rad()

    def contains_ball(self, other: "Ball") -> bool:
        return self.lower() <= other.lower() and other.upper() <= self.upper()

    def overlaps(self, other: "Ball") -> bool:
        return abs(self.mid() - other.mid()) <= self.rad() + other.rad()

    def upper_le(self, bound: Rational) -> bool:
        """True if every point of the ball is <= ``bound``."""
        return self.upper() <= Fraction(bound)

    def lower_ge(self, bound: Rational) -> bool:
        return self.lower() >= Fraction(bound)

    def __neg__(self) -> "Ball":
        return Ball(-self.man, self.exp, self.rman, self.rexp)

    def __repr__(self) -> str:
        return f"Ball({self.mid_float()!r} +/- {self.rad_float():.3e})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ball):
            return NotImplemented
        return self.mid() == other.mid() and self.rad() == other.rad()

    def __hash__(self):
        return hash((self.mid(), self.rad()))


def _is_dyadic(q: Fraction) -> bool:
    d = q.denominator
    return d & (d - 1) == 0


def _dyadic(m: int, e: int) -> Fraction:
    return Fraction(m << e) if e >= 0 else Fraction(m, 1 << -e)


def _to_float(m: int, e: int) -> float:
    if m == 0:
        return 0.0
    bl = abs(m).bit_length()
    if bl > 60:
        m >>= bl - 60
        e += bl - 60
    try:
        return math.ldexp(float(m), e)
    except OverflowError:
        return math.copysign(math.inf, m)


def _mag_from_fraction_up(q: Fraction) -> Tuple[int, int]:
    q = abs(q)
    if q == 0:
        return 0, 0
    num, den = q.numerator, q.denominator
    shift = RAD_BITS + 2 + den.bit_length() - num.bit_length()
    if shift >= 0:
        return _mag_up(-((-num << shift) // den), -shift)
    return _mag_up(-(-num // (den << -shift)), -shift)


def _mag_from_fraction_down(q: Fraction) -> Tuple[int, int]:
    q = abs(q)
    if q == 0:
        return 0, 0
    num, den = q.numerator, q.denominator
    shift = RAD_BITS + 2 + den.bit_length() - num.bit_length()
    if shift >= 0:
        return _mag_down((num << shift) // den, -shift)
    return _mag_down(num // (den << -shift), -shift)


# -- elementary operations ---------------------------------------------------


def set_prec(x: Ball, prec: int) -> Ball:
    """Round the midpoint of ``x`` to ``prec`` bits, widening the radius."""
    m, e, em, ee = _round(x.man, x.exp, prec)
    if em == 0:
        if m == x.man and e == x.exp:
            return x
        return Ball(m, e, x.rman, x.rexp)
    rm, re = _mag_add(x.rman, x.rexp, em, ee)
    return Ball(m, e, rm, re)


def mul_2exp(x: Ball, k: int) -> Ball:
    """Exact scaling by ``2**k``."""
    return Ball(x.man, x.exp + k, x.rman, x.rexp + k if x.rman else 0)


def add(x: Ball, y: Ball, prec: int) -> Ball:
    if y.man == 0:
        rm, re = _mag_add(x.rman, x.rexp, y.rman, y.rexp)
        return set_prec(Ball(x.man, x.exp, rm, re), prec)
    if x.man == 0:
        return add(y, x, prec)
    tx, ty = _top(x.man, x.exp), _top(y.man, y.exp)
    if ty < tx - prec - 4:
        # y lies below the last bit kept for x: absorb it into the radius
        rm, re = _mag_add(x.rman, x.rexp, y.rman, y.rexp)
        rm, re = _mag_add(rm, re, 1, ty)
        return set_prec(Ball(x.man, x.exp, rm, re), prec)
    if tx < ty - prec - 4:
        return add(y, x, prec)
    e = min(x.exp, y.exp)
    m = (x.man << (x.exp - e)) + (y.man << (y.exp - e))
    m, e, em, ee = _round(m, e, prec)
    rm, re = _mag_add(x.rman, x.rexp, y.rman, y.rexp)
    rm, re = _mag_add(rm, re, em, ee)
    return Ball(m, e, rm, re)


def sub(x: Ball, y: Ball, prec: int) -> Ball:
    return add(x, -y, prec)


def mul(x: Ball, y: Ball, prec: int) -> Ball:
    m, e, em, ee = _round(x.man * y.man, x.exp + y.exp, prec)
    rm, re = em, ee
    if x.rman or y.rman:
        if y.rman:
            a, b = _mag_up(abs(x.man), x.exp)
            a, b = _mag_add(a, b, x.rman, x.rexp)
            rm, re = _mag_add(rm, re, *_mag_mul(a, b, y.rman, y.rexp))
        if x.rman:
            a, b = _mag_up(abs(y.man), y.exp)
            rm, re = _mag_add(rm, re, *_mag_mul(a, b, x.rman, x.rexp))
    return Ball(m, e, rm, re)


def mul_int(x: Ball, k: int, prec: int) -> Ball:
    m, e, em, ee = _round(x.man * k, x.exp, prec)
    rm, re = _mag_mul(x.rman, x.rexp, *_mag_up(abs(k), 0))
    rm, re = _mag_add(rm, re, em, ee)
    return Ball(m, e, rm, re)


def div_int(x: Ball, k: int, prec: int) -> Ball:
    """``x / k`` for a nonzero integer ``k``."""
    if k == 0:
        raise DomainError("division by zero")
    if k < 0:
        return div_int(-x, -k, prec)
    shift = max(0, prec + 2 + k.bit_length() - abs(x.man).bit_length())
    q = (x.man << shift) // k
    exp = x.exp - shift
    rm, re = (0, 0) if q * k == x.man << shift else (1, exp)
    q, exp, em, ee = _round(q, exp, prec)
    rm, re = _mag_add(rm, re, em, ee)
    if x.rman:
        rm, re = _mag_add(rm, re, *_mag_div(x.rman, x.rexp, k, 0))
    return Ball(q, exp, rm, re)


def _abs_lower_mag(x: Ball) -> Tuple[int, int]:
    """Lower bound (m, e) for min |t| over the ball; (0, 0) if it meets zero."""
    if x.rman == 0:
        return _mag_down(abs(x.man), x.exp)
    e = min(x.exp, x.rexp)
    d = (abs(x.man) << (x.exp - e)) - (x.rman << (x.rexp - e))
    if d <= 0:
        return 0, 0
    return _mag_down(d, e)


def div(x: Ball, y: Ball, prec: int) -> Ball:
    if y.rman == 0 and y.man != 0 and y.exp == 0:
        return div_int(x, y.man, prec)
    lo_m, lo_e = _abs_lower_mag(y)
    if lo_m == 0:
        raise DomainError("divisor interval contains zero")
    shift = max(0, prec + 2 + abs(y.man).bit_length() - abs(x.man).bit_length())
    q = (x.man << shift) // y.man
    exp = x.exp - shift - y.exp
    rm, re = (0, 0) if q * y.man == x.man << shift else (1, exp)
    q, exp, em, ee = _round(q, exp, prec)
    rm, re = _mag_add(rm, re, em, ee)
    if x.rman or y.rman:
        # |x/y - a/b| <= (rx + |a/b| ry) / (|b| - ry)
        qm, qe = _mag_up(abs(q) + 1, exp)
        qm, qe = _mag_add(qm, qe, rm, re)
        num = _mag_add(x.rman, x.rexp, *_mag_mul(qm, qe, y.rman, y.rexp))
        rm, re = _mag_add(rm, re, *_mag_div(*num, lo_m, lo_e))
    return Ball(q, exp, rm, re)


def sqrt(x: Ball, prec: int) -> Ball:
    """Square root; the interval must lie in [0, inf)."""
    if x.man < 0 or (x.rman and x.lower() < 0):
        raise DomainError("sqrt of an interval with negative points")
    if x.man == 0:
        return Ball()
    lo_m, lo_e = _abs_lower_mag(x)
    if x.rman and lo_m == 0:
        # interval [0, hi]: enclose by [0, sqrt(hi)]
        hi = _isqrt_dyadic(*_mag_add(abs(x.man), x.exp, x.rman, x.rexp), RAD_BITS + 4, up=True)
        return Ball(hi[0], hi[1] - 1, hi[0], hi[1] - 1)
    m, e, err = _isqrt_dyadic(x.man, x.exp, prec + 2)
    m, e, em, ee = _round(m, e, prec)
    rm, re = _mag_add(err[0], err[1], em, ee)
    if x.rman:
        # |sqrt(t) - sqrt(mid)| <= r / (2 sqrt(lo))
        sm, se, _ = _isqrt_dyadic(lo_m, lo_e, RAD_BITS + 4)
        sm, se = _mag_down(sm, se)
        rm, re = _mag_add(rm, re, *_mag_div(x.rman, x.rexp, sm, se + 1))
    return Ball(m, e, rm, re)


def _isqrt_dyadic(man: int, exp: int, prec: int, up: bool = False):
    """floor(sqrt(man 2^exp)) to ~prec bits as (m, e, (err_m, err_e)).

    With ``up=True`` returns an upper bound (m, e) instead.
    """
    shift = max(0, 2 * prec + 2 - man.bit_length())
    if (exp - shift) % 2:
        shift += 1
    big = man << shift
    r = math.isqrt(big)
    e = (exp - shift) // 2
    exact = r * r == big
    if up:
        return (r if exact else r + 1), e
    return r, e, ((0, 0) if exact else (1, e))


def rsqrt(x: Ball, prec: int) -> Ball:
    return div(Ball(1), sqrt(x, prec + 8), prec)


# -- constants and transcendental kernels ------------------------------------


def _atan_inv_fixed(q: int, wp: int) -> Tuple[int, int]:
    """atan(1/q) * 2^wp truncated, with an error bound in units."""
    x = (1 << wp) // q
    total = x
    q2 = q * q
    k = 1
    sign = -1
    while x:
        x //= q2
        total += sign * (x // (2 * k + 1))
        sign = -sign
        k += 1
    return total, k + 1


@lru_cache(maxsize=64)
def _pi_fixed(wp: int) -> Tuple[int, int]:
    """(P, err) with |pi 2^wp - P| <= err."""
    # atan(1/5) needs about wp/4.6 terms; keep the summed error below one unit
    extra = (8 * wp + 400).bit_length() + 2
    a, ea = _atan_inv_fixed(5, wp + extra)
    b, eb = _atan_inv_fixed(239, wp + extra)
    err = 16 * ea + 4 * eb
    assert err < 1 << extra
    return (16 * a - 4 * b) >> extra, 2


def const_pi(prec: int) -> Ball:
    """Ball containing pi with radius below ``2**(4 - prec)``."""
    prec = max(prec, 2)
    wp = prec + 20
    p, err = _pi_fixed(wp)
    return set_prec(Ball(p, -wp, err, -wp), prec)


def _exp_dyadic(man: int, exp: int, prec: int) -> Ball:
    """exp(man 2^exp) for an exact argument."""
    if man == 0:
        return Ball(1)
    top = _top(man, exp)
    r = max(0, top + 8) + math.isqrt(prec) // 2
    wp = prec + r + 24
    sh = exp - r + wp
    if sh >= 0:
        y = man << sh
    else:
        y = man >> -sh
    one = 1 << wp
    s = one
    t = one
    j = 1
    while t:
        t = (t * y >> wp) // j
        s += t
        j += 1
    # |y| < 2^-8: each term error < 7 units, tail < 16 units, s > 0.99
    em, ee = _mag_up(2 * (8 * j + 32), -wp)
    m, e = s, -wp
    for _ in range(r):
        m, e, _, _ = _round(m * m, 2 * e, wp)
        # eps' = 2 eps + eps^2 + 2^(1 - wp)
        sq = _mag_mul(em, ee, em, ee)
        em, ee = _mag_add(em, ee + 1, *sq)
        em, ee = _mag_add(em, ee, 1, 1 - wp)
    if em.bit_length() + ee > -1:
        raise PrecisionError("exp: working precision too small", Ball(em, ee))
    # absolute error <= |z| * eps / (1 - eps) <= |z| * 2 eps
    zm, ze = _mag_up(m, e)
    rm, re = _mag_mul(zm, ze, em, ee + 1)
    return set_prec(Ball(m, e, rm, re), prec)


def exp(x: Ball, prec: int) -> Ball:
    if x.rman == 0:
        return _exp_dyadic(x.man, x.exp, prec)
    lo = sub(Ball(x.man, x.exp), Ball(x.rman, x.rexp), 10**9)
    hi = add(Ball(x.man, x.exp), Ball(x.rman, x.rexp), 10**9)
    a = _exp_dyadic(lo.man, lo.exp, prec + 4)
    b = _exp_dyadic(hi.man, hi.exp, prec + 4)
    return Ball.from_endpoints(a.lower(), b.upper(), prec)


def _taylor_cos_sin(phi: int, wp: int, phi_err: int) -> Tuple[int, int, int]:
    """Fixed-point cos and sin of phi * 2^-wp for 0 <= phi*2^-wp <= 0.8."""
    one = 1 << wp
    c, s, t = one, phi, phi
    j = 1
    while t:
        j += 1
        t = (t * phi >> wp) // j
        r = j & 3
        if r == 2:
            c -= t
        elif r == 3:
            s -= t
        elif r == 0:
            c += t
        else:
            s += t
    return c, s, (j + 2) * (3 * phi_err + 6)


def _cos_sin_fixed(num: int, den: int, wp: int) -> Tuple[int, int, int]:
    """(C, S, err): cos and sin of 2 pi num/den scaled by 2^wp, error in units.

    The angle is reduced exactly in integers before any rounding.
    """
    t = num % den
    one = 1 << wp
    q, rem = divmod(4 * t, den)
    if rem == 0:
        return ((one, 0), (0, one), (-one, 0), (0, -one))[q] + (0,)
    # angle = (pi/2) (q + rem/den)
    reflect = 2 * rem > den
    if reflect:
        rem = den - rem
    p, perr = _pi_fixed(wp)
    phi = p * rem // (2 * den)
    c, s, err = _taylor_cos_sin(phi, wp, perr + 1)
    if reflect:
        c, s = s, c
    if q == 1:
        c, s = -s, c
    elif q == 2:
        c, s = -c, -s
    elif q == 3:
        c, s = s, -c
    return c, s, err


def cos_two_pi_frac(num: int, den: int, prec: int) -> Ball:
    """Ball containing cos(2 pi num / den)."""
    if den < 1:
        raise ValueError("den must be >= 1")
    wp = prec + 16
    c, _, err = _cos_sin_fixed(num % den, den, wp)
    return set_prec(Ball(c, -wp, err, -wp), prec)


def sin_two_pi_frac(num: int, den: int, prec: int) -> Ball:
    if den < 1:
        raise ValueError("den must be >= 1")
    wp = prec + 16
    _, s, err = _cos_sin_fixed(num % den, den, wp)
    return set_prec(Ball(s, -wp, err, -wp), prec)


def cos_table_fixed(den: int, count: int, wp: int) -> Tuple[list, int]:
    """Fixed-point cos(2 pi t/den) for t < count, by powering e(1/den).

    Returns (values, err) with every entry within ``err`` units.
    """
    if count <= 0:
        return [], 0
    one = 1 << wp
    c1, s1, ec = _cos_sin_fixed(1, den, wp)
    values = [one]
    a, b = one, 0
    for _ in range(1, count):
        a, b = (a * c1 - b * s1) >> wp, (a * s1 + b * c1) >> wp
        values.append(a)
    # e_t <= 2 t (|w~ - w| + 2 units), |w~ - w| <= 2 ec; valid while t ec << 2^wp
    return values, 2 * count * (2 * ec + 2) + 1


# -- Bessel I1 ---------------------------------------------------------------


def bessel_i1(x: Ball, prec: int, min_rel_bits: Optional[int] = None) -> Ball:
    """Enclosure of I1 over a nonnegative interval via its Taylor series.

    I1(x) = sum_m (x/2)^(2m+1) / (m! (m+1)!).  All terms are positive; once the
    term ratio drops below 1/2 the tail is bounded by twice the first
    omitted term.

    Raises:
        DomainError: if the interval has negative points.
        PrecisionError: if ``min_rel_bits`` is given and not reached.
    """
    if x.man < 0 or (x.rman and x.lower() < 0):
        raise DomainError("bessel_i1 needs a nonnegative interval")
    if x.is_zero():
        return Ball()
    guard = 16 + 2 * max(0, _top(x.man, x.exp))
    wp = prec + guard
    half = mul_2exp(x, -1)
    q = mul(half, half, wp)
    q_up = math.ceil(q.upper())
    term = set_prec(half, wp)
    total = term
    m = 0
    while True:
        m += 1
        term = div_int(mul(term, q, wp), m * (m + 1), wp)
        if 2 * q_up < (m + 1) * (m + 2) and (
            term.man == 0 or _top(term.man, term.exp) + 1 < _top(total.man, total.exp) - wp
        ):
            tm, te = term.abs_upper_mag()
            rm, re = _mag_add(total.rman, total.rexp, tm, te + 1)
            total = Ball(total.man, total.exp, rm, re)
            break
        total = add(total, term, wp)
    result = set_prec(total, prec)
    if min_rel_bits is not None and result.rel_accuracy_bits() < min_rel_bits:
        raise PrecisionError(
            f"bessel_i1 reached {result.rel_accuracy_bits():.1f} of {min_rel_bits} bits",
            Ball(result.rman, result.rexp),
        )
    return result


_LINEAR_LIMIT = Fraction(1, 10)
_LINEAR_SLOPE = Fraction(501, 1000)


def i1_exp_bound(h: Fraction, prec: int = 64) -> Fraction:
    """Upper bound e^h / sqrt(2 pi h) for I1(h), any h > 0."""
    hb = Ball.exact(h)
    wp = prec + 8
    two_pi_h = mul(mul_2exp(const_pi(wp), 1), hb, wp)
    return div(exp(hb, wp), sqrt(two_pi_h, wp), wp).upper()


def i1_linear_bound(h: Fraction) -> Fraction:
    """Upper bound 0.501 h for I1(h), valid for 0 < h < 0.1."""
    if not 0 < h < _LINEAR_LIMIT:
        raise DomainError("the linear I1 bound needs 0 < x < 0.1")
    return _LINEAR_SLOPE * h


def bessel_i1_upper(x_upper: Ball, prec: int = 64) -> Ball:
    """Exact ball holding an upper bound for I1 at the right endpoint of ``x_upper``.

    Minimum of e^h / sqrt(2 pi h) (any h > 0), 0.501 h (h < 0.1) and the
    upper endpoint of the direct series evaluation at h.
    """
    h = x_upper.upper()
    if h <= 0:
        raise DomainError("bessel_i1_upper needs a positive right endpoint")
    candidates = [i1_exp_bound(h, prec), bessel_i1(Ball.exact(h), prec).upper()]
    if h < _LINEAR_LIMIT:
        candidates.append(i1_linear_bound(h))
    return Ball.exact(_round_up_dyadic(min(candidates), prec))


def add_error(x: Ball, err: Ball) -> Ball:
    """Widen ``x`` by the largest absolute value in ``err``."""
    em, ee = err.abs_upper_mag()
    rm, re = _mag_add(x.rman, x.rexp, em, ee)
    return Ball(x.man, x.exp, rm, re)


def _round_up_dyadic(q: Fraction, prec: int) -> Fraction:
    """A dyadic >= q > 0 with at most ``prec`` significant bits."""
    if _is_dyadic(q) and q.numerator.bit_length() <= prec:
        return q
    num, den = q.numerator, q.denominator
    shift = prec + den.bit_length() - num.bit_length()
    if shift >= 0:
        return Fraction(-((-num << shift) // den), 1 << shift)
    return Fraction(-(-num // (den << -shift)) << -shift)


def unique_integer(b: Ball) -> Optional[int]:
    """The integer t if ``[mid - rad, mid + rad]`` contains exactly one integer."""
    lo = math.ceil(b.lower())
    hi = math.floor(b.upper())
    return lo if lo == hi else None


# -- dispatcher --------------------------------------------------------------

_UNARY = {"sqrt": sqrt, "exp": exp, "rsqrt": rsqrt}
_BINARY = {"add": add, "sub": sub, "mul": mul, "div": div}


def elementary(op: str, args: Sequence[Ball], prec: int) -> Ball:
    """Apply a named operation (add, sub, mul, div, sqrt, exp, rsqrt)."""
    if prec < MIN_PREC:
        raise ValueError(f"precision must be >= {MIN_PREC} bits")
    if op in _BINARY:
        if len(args) != 2:
            raise TypeError(f"{op} takes two balls")
        return _BINARY[op](args[0], args[1], prec)
    if op in _UNARY:
        if len(args) != 1:
            raise TypeError(f"{op} takes one ball")
        return _UNARY[op](args[0], prec)
    raise ValueError(f"unknown operation {op!r}")
