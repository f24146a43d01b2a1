import math
import random

import pytest

from jfun.arith import primes_up_to
from jfun.kloosterman import (
    kloosterman_direct,
    kloosterman_eval,
    kloosterman_prime_power,
    weil_bound,
    weil_bound_sqrt_tau,
)


def naive(a, b, k):
    total = 0.0
    for x in range(1, k + 1):
        if math.gcd(x, k) == 1:
            total += math.cos(2 * math.pi * (a * x + b * pow(x, -1, k)) / k)
    return total


def close(ball_value, x, tol=1e-7):
    return abs(ball_value.mid_float() - x) <= tol + ball_value.rad_float()


def test_small_known_values():
    assert kloosterman_eval(1, 1, 1, 64).contains(1)
    assert kloosterman_eval(1, 1, 3, 64).contains(-1)
    assert kloosterman_eval(0, 0, 12, 64).contains(4)  # Ramanujan sum c_12(0) = phi(12)
    assert kloosterman_eval(3, 1, 9, 64).contains(0)


def test_against_naive_floats():
    rng = random.Random(3)
    for k in range(1, 401):
        a, b = rng.randrange(-50, 50), rng.randrange(-50, 50)
        assert close(kloosterman_eval(a, b, k, 64), naive(a, b, k), 1e-9 * k)


def test_closed_form_matches_direct():
    rng = random.Random(9)
    for p in primes_up_to(60)[1:]:
        e = 2
        while p**e <= 4000:
            q = p**e
            for _ in range(4):
                a, b = rng.randrange(q), rng.randrange(1, q)
                if b % p == 0:
                    b += 1
                cf = kloosterman_prime_power(a, b, p, e, 80)
                assert cf.overlaps(kloosterman_direct(a, b, q, 80)), (a, b, p, e)
            e += 1


def test_closed_form_preconditions():
    for bad in [(1, 1, 2, 3), (1, 1, 3, 1), (1, 3, 3, 2)]:
        with pytest.raises(ValueError):
            kloosterman_prime_power(*bad, 64)


def test_symmetry_and_twist():
    rng = random.Random(17)
    for _ in range(300):
        k = rng.randint(1, 500)
        a, b = rng.randrange(k * 3), rng.randrange(k * 3)
        s = kloosterman_eval(a, b, k, 64)
        assert s.overlaps(kloosterman_eval(b, a, k, 64))
        c = rng.randrange(1, k + 1)
        if math.gcd(c, k) == 1:
            assert s.overlaps(kloosterman_eval(a * c, b * pow(c, -1, k), k, 64))


def test_weil_bound_sample():
    rng = random.Random(23)
    for k in range(1, 301):
        for _ in range(5):
            a, b = rng.randrange(1000), rng.randrange(1000)
            s = kloosterman_eval(a, b, k, 64)
            assert max(abs(s.lower()), abs(s.upper())) <= weil_bound(a, b, k) * (1 + 1e-12)


def test_radius_is_small():
    for k in (1, 997, 1024, 3**7, 2 * 3 * 5 * 7 * 11):
        assert kloosterman_eval(457871, -1, k, 64).rad_float() < 2**-40


def test_sqrt_tau_form_is_false():
    s = kloosterman_eval(2, 1, 5, 64)
    assert s.overlaps(kloosterman_direct(2, 1, 5, 64))
    assert abs(s.mid_float() + 1 + math.sqrt(5)) < 1e-12
    assert abs(s.lower()) > weil_bound_sqrt_tau(2, 1, 5)
    assert abs(s.lower()) <= weil_bound(2, 1, 5)
