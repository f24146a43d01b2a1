"""Integer utilities: residues, CRT, factorization, divisor sums and BPSW."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache, reduce
from operator import mul
from typing import Iterable, List, Sequence, Tuple

import gmpy2
import numpy as np

TRIAL_DIVISION_BOUND = 10**4
FACTOR_TRIAL_BOUND = 10**6

Factorization = List[Tuple[int, int]]


class NotCoprimeError(ValueError):
    """Raised when CRT is asked to combine moduli sharing a factor."""

    def __init__(self, m1: int, m2: int):
        super().__init__(f"moduli {m1} and {m2} are not coprime (gcd {math.gcd(m1, m2)})")
        self.pair = (m1, m2)


@dataclass(frozen=True)
class Residue:
    """An integer class ``value mod modulus`` with ``0 <= value < modulus``."""

    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {self.modulus}")
        if not 0 <= self.value < self.modulus:
            object.__setattr__(self, "value", self.value % self.modulus)

    def __str__(self) -> str:
        return f"{self.value} mod {self.modulus}"


@lru_cache(maxsize=8)
def _sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return flags


@lru_cache(maxsize=8)
def primes_up_to(limit: int) -> Tuple[int, ...]:
    """All primes ``p <= limit`` (sieve of Eratosthenes)."""
    if limit < 2:
        return ()
    return tuple(int(p) for p in np.flatnonzero(_sieve(limit)))


def crt_combine(parts: Sequence[Residue]) -> Residue:
    """Combine residues modulo pairwise coprime moduli into one residue.

    The result is independent of the order of ``parts``.

    Raises:
        NotCoprimeError: if two moduli share a factor.
        ValueError: if ``parts`` is empty.
    """
    if not parts:
        raise ValueError("crt_combine needs at least one residue")
    moduli = [p.modulus for p in parts]
    for i, mi in enumerate(moduli):
        for mj in moduli[i + 1 :]:
            if math.gcd(mi, mj) != 1:
                raise NotCoprimeError(mi, mj)
    value, modulus = parts[0].value, parts[0].modulus
    for part in parts[1:]:
        # value + modulus * t == part.value (mod part.modulus)
        t = (part.value - value) * pow(modulus, -1, part.modulus) % part.modulus
        value += modulus * t
        modulus *= part.modulus
    return Residue(value, modulus)


def is_probable_prime(n: int, trial_bound: int = TRIAL_DIVISION_BOUND) -> bool:
    """Trial division, then BPSW (strong base-2 test plus strong Lucas test).

    Primes below ``trial_bound`` are answered exactly by the trial stage.
    """
    if n < 2:
        return False
    for p in primes_up_to(trial_bound):
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < trial_bound * trial_bound:
        return True
    n = gmpy2.mpz(n)
    return _strong_fermat_base2(n) and _strong_lucas_selfridge(n)


def _strong_fermat_base2(n) -> bool:
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(gmpy2.mpz(2), d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _selfridge_parameters(n) -> Tuple[int, int, int] | None:
    """First D in 5, -7, 9, -11, ... with (D/n) = -1; returns (D, P, Q).

    Returns None when some D shares a factor with n (n is then composite).
    """
    d = 5
    while True:
        j = gmpy2.jacobi(d, n)
        if j == -1:
            return d, 1, (1 - d) // 4
        if j == 0 and abs(d) != n:
            return None
        d = -d - 2 if d > 0 else -d + 2


def _strong_lucas_selfridge(n) -> bool:
    if gmpy2.is_square(n):
        return False
    params = _selfridge_parameters(n)
    if params is None:
        return False
    D, P, Q = params
    d = n + 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # Left-to-right binary ladder on (U_k, V_k, Q^k) with P = 1.
    inv2 = (n + 1) // 2
    U, V, Qk = gmpy2.mpz(1), gmpy2.mpz(P), gmpy2.mpz(Q % n)
    for bit in bin(d)[3:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = (P * U + V) * inv2 % n, (D * U + P * V) * inv2 % n
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        if V == 0:
            return True
        Qk = Qk * Qk % n
    return False


def _pollard_brent(n: int, rng: random.Random) -> int:
    """A nontrivial factor of the odd composite ``n``."""
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _split(n: int, rng: random.Random) -> List[int]:
    if n == 1:
        return []
    if is_probable_prime(n):
        return [n]
    d = _pollard_brent(n, rng)
    return _split(d, rng) + _split(n // d, rng)


@lru_cache(maxsize=65536)
def _factor_cached(k: int) -> Tuple[Tuple[int, int], ...]:
    factors = {}
    rest = k
    for p in primes_up_to(FACTOR_TRIAL_BOUND):
        if p * p > rest:
            break
        if rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            factors[p] = e
    if rest > 1:
        for p in _split(rest, random.Random(rest)):
            factors[p] = factors.get(p, 0) + 1
    return tuple(sorted(factors.items()))


def factorize(k: int) -> Factorization:
    """Prime factorization of ``k >= 1`` as increasing ``(prime, exponent)`` pairs.

    Trial division up to 10**6 handles everything this package meets in
    practice; cofactors beyond that go to Pollard-Brent rho.
    """
    if k < 1:
        raise ValueError(f"factorize requires k >= 1, got {k}")
    return list(_factor_cached(k))


def divisor_sigma(x: int, m: int) -> int:
    """Sum of ``d**x`` over the divisors ``d`` of ``m``."""
    if m < 1:
        raise ValueError(f"divisor_sigma requires m >= 1, got {m}")
    if x < 0:
        raise ValueError("divisor_sigma requires x >= 0")
    total = 1
    for p, e in factorize(m):
        if x == 0:
            total *= e + 1
        else:
            px = p**x
            total *= (px ** (e + 1) - 1) // (px - 1)
    return total


def primorial(bound: int) -> int:
    """Product of all primes ``<= bound``."""
    if bound < 2:
        raise ValueError("primorial requires bound >= 2")
    return reduce(mul, primes_up_to(bound), 1)


def euler_phi(k: int) -> int:
    result = k
    for p, _ in factorize(k):
        result -= result // p
    return result


def product(values: Iterable[int]) -> int:
    return reduce(mul, values, 1)
