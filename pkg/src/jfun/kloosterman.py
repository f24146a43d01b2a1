"""Kloosterman sums S(a, b; k) as rigorous balls.

S(a, b; k) = sum over units x mod k of e((a x + b x^-1) / k).  The sum is
real (pair x with -x), so only cosines are accumulated.
"""

from __future__ import annotations

import math
from collections import Counter

import gmpy2

from . import ball
from .arith import factorize
from .ball import Ball


def _guard_prec(prec: int, k: int) -> int:
    return prec + max(1, (k - 1).bit_length())


def _residue_counts(a: int, b: int, k: int) -> Counter:
    """Multiplicity of each t = a x + b/x mod k, folded so t <= k/2."""
    counts: Counter = Counter()
    a %= k
    b %= k
    half = k // 2
    for x in range(1, k):
        try:
            y = pow(x, -1, k)
        except ValueError:
            continue
        t = (a * x + b * y) % k
        counts[t if t <= half else k - t] += 1
    return counts


def kloosterman_direct(a: int, b: int, k: int, prec: int) -> Ball:
    """S(a, b; k) by summing one cosine per unit x mod k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return Ball(1)
    counts = _residue_counts(a, b, k)
    wp = _guard_prec(prec, k) + 16
    if len(counts) <= 8:
        total = 0
        err = 0
        for t, c in counts.items():
            cos_t, _, e = ball._cos_sin_fixed(t, k, wp)
            total += c * cos_t
            err += c * e
    else:
        wp += 2 * k.bit_length() + 8
        table, e = ball.cos_table_fixed(k, k // 2 + 1, wp)
        total = sum(c * table[t] for t, c in counts.items())
        err = sum(counts.values()) * e
    return ball.set_prec(Ball(total, -wp, err, -wp), _guard_prec(prec, k))


def _sqrt_mod_prime_power(c: int, p: int, e: int) -> int:
    """A square root of the unit c modulo p^e (p odd), assuming one exists."""
    q = p**e
    r = _sqrt_mod_prime(c % p, p)
    # Hensel lift: r <- r - (r^2 - c) / (2r)
    pk = p
    while pk < q:
        pk = min(pk * pk, q)
        r = (r - (r * r - c) * pow(2 * r, -1, pk)) % pk
    return r


def _sqrt_mod_prime(c: int, p: int) -> int:
    """Tonelli-Shanks for an odd prime p and quadratic residue c."""
    c %= p
    if c == 0:
        return 0
    if p % 4 == 3:
        return pow(c, (p + 1) // 4, p)
    s, qq = 0, p - 1
    while qq % 2 == 0:
        s += 1
        qq //= 2
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, cc, t, r = s, pow(z, qq, p), pow(c, qq, p), pow(c, (qq + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        bb = pow(cc, 1 << (m - i - 1), p)
        m, cc = i, bb * bb % p
        t, r = t * cc % p, r * bb % p
    return r


def kloosterman_prime_power(a: int, b: int, p: int, e: int, prec: int) -> Ball:
    """Closed form for S(a, b; p^e), p odd, e >= 2, p not dividing b.

    Zero when p | a or ab is a non-residue mod p.  Otherwise, with
    l^2 = ab (mod p^e),

        S = 2 (l/p)^e p^(e/2) Re(eps e(2l / p^e)),

    where eps = 1 for p^e = 1 (mod 4) and i for p^e = 3 (mod 4).
    """
    if p == 2 or e < 2:
        raise ValueError("closed form needs an odd prime p and e >= 2")
    if b % p == 0:
        raise ValueError("closed form needs gcd(b, p) = 1")
    q = p**e
    if a % p == 0:
        return Ball()
    ab = a * b % q
    if gmpy2.legendre(ab % p, p) == -1:
        return Ball()
    ell = _sqrt_mod_prime_power(ab, p, e)
    sign = 1
    if e % 2 and gmpy2.legendre(ell % p, p) == -1:
        sign = -1
    # Re(i e(theta)) = cos(2 pi (theta + 1/4))
    quarter = 0 if q % 4 == 1 else 1
    wp = _guard_prec(prec, q) + 8
    cos_part = ball.cos_two_pi_frac(8 * ell + quarter * q, 4 * q, wp)
    if e % 2 == 0:
        scale = Ball(2 * sign * p ** (e // 2))
    else:
        scale = ball.mul_int(ball.sqrt(Ball(p), wp), 2 * sign * p ** (e // 2), wp)
    return ball.mul(scale, cos_part, _guard_prec(prec, q))


def kloosterman_eval(a: int, b: int, k: int, prec: int) -> Ball:
    """S(a, b; k) through the prime-power factorization of k.

    Splits k = k1 k2 with coprime parts using
    S(a, b; k1 k2) = S(a k2', b k2'; k1) S(a k1', b k1'; k2),
    k2 k2' = 1 (mod k1), k1 k1' = 1 (mod k2).  Odd prime powers with e >= 2
    use the closed form when b is a unit; everything else is summed directly.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return Ball(1)
    wp = _guard_prec(prec, k) + 4
    result = Ball(1)
    for p, e in factorize(k):
        q = p**e
        other = k // q
        # twist for the factor q: multiply a and b by other^-1 mod q
        inv = pow(other, -1, q) if other > 1 else 1
        aq, bq = a * inv % q, b * inv % q
        if p != 2 and e >= 2 and bq % p:
            part = kloosterman_prime_power(aq, bq, p, e, wp)
        else:
            part = kloosterman_direct(aq, bq, q, wp)
        if part.is_zero():
            return Ball()
        result = ball.mul(result, part, wp)
    return ball.set_prec(result, _guard_prec(prec, k))


def _sigma0(k: int) -> int:
    d = 1
    for _, e in factorize(k):
        d *= e + 1
    return d


def weil_bound(a: int, b: int, k: int) -> float:
    """sigma_0(k) sqrt(gcd(a, b, k)) sqrt(k), the Weil-Estermann bound.

    With sigma_0(k) <= 9 k^(1/4) this gives |S| <= 9 k^(3/4), the estimate
    behind the 72 pi constant of the tail bound.
    """
    return _sigma0(k) * math.sqrt(math.gcd(math.gcd(a, b), k) * k)


def weil_bound_sqrt_tau(a: int, b: int, k: int) -> float:
    """sqrt(sigma_0(k)) sqrt(gcd(a, b, k)) sqrt(k).

    Stronger than ``weil_bound`` and false in general: S(2, 1; 5) = -(1 + sqrt 5)
    exceeds sqrt(10).  Kept so the claim can be tested.
    """
    return math.sqrt(_sigma0(k) * math.gcd(math.gcd(a, b), k) * k)

