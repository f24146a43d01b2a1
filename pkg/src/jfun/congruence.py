"""Residues of c_n from the 2-, 3-, 5- and 7-adic congruence families.

With n = p^a m, p not dividing m, a >= 1:

    c_n = -2^(3a+8) 3^(a-1) sigma_7(m)            mod 2^(3a+13)
    c_n = -+3^(2a+3) 10^(a-1) sigma(m) / m        mod 3^(2a+6), m = +-1 mod 3
    c_n = -5^(a+1) 3^(a-1) m sigma(m)             mod 5^(a+2)
    c_n = -7^a 5^(a-1) m sigma_3(m)               mod 7^(a+1)

Every family is checked against exact coefficients by ``validate_families``;
the exponent range a >= 1 (including a = 1) passes for all n <= 2000.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import gmpy2

from .arith import Residue, crt_combine, divisor_sigma
from .qseries import coeff_mod

FAMILY_PRIMES = (2, 3, 5, 7)

# (p, a) pairs found to disagree with exact coefficients; empty after the sweep.
DISABLED: frozenset = frozenset()


@dataclass(frozen=True)
class CongruenceResult:
    residue: Residue
    sources: List[Tuple[int, int, int]]  # (p, a, p-power modulus)


@dataclass
class OperationCounter:
    """Counts power-series passes made by ``residue_strategy``."""

    series_passes: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def bump(self) -> None:
        with self._lock:
            self.series_passes += 1


COUNTER = OperationCounter()


def _split_power(n: int, p: int) -> Tuple[int, int]:
    a = 0
    while n % p == 0:
        n //= p
        a += 1
    return a, n


def _family_2(a: int, m: int) -> Residue:
    return Residue(-(2 ** (3 * a + 8)) * 3 ** (a - 1) * divisor_sigma(7, m), 2 ** (3 * a + 13))


def _family_3(a: int, m: int) -> Residue:
    mod = 3 ** (2 * a + 6)
    sign = -1 if m % 3 == 1 else 1
    return Residue(sign * 3 ** (2 * a + 3) * 10 ** (a - 1) * divisor_sigma(1, m) * pow(m, -1, mod), mod)


def _family_5(a: int, m: int) -> Residue:
    return Residue(-(5 ** (a + 1)) * 3 ** (a - 1) * m * divisor_sigma(1, m), 5 ** (a + 2))


def _family_7(a: int, m: int) -> Residue:
    return Residue(-(7**a) * 5 ** (a - 1) * m * divisor_sigma(3, m), 7 ** (a + 1))


FAMILIES: Dict[int, Callable[[int, int], Residue]] = {
    2: _family_2,
    3: _family_3,
    5: _family_5,
    7: _family_7,
}


def family_residues(n: int) -> List[Tuple[int, int, Residue]]:
    """Every applicable (p, a, residue) for n, before CRT."""
    if n < 1:
        raise ValueError("congruence families need n >= 1")
    out = []
    for p in FAMILY_PRIMES:
        a, m = _split_power(n, p)
        if a >= 1 and (p, a) not in DISABLED:
            out.append((p, a, FAMILIES[p](a, m)))
    return out


def special_residue(n: int) -> Optional[CongruenceResult]:
    """c_n modulo the product of all applicable family moduli, or None."""
    parts = family_residues(n)
    if not parts:
        return None
    residue = crt_combine([r for _, _, r in parts])
    return CongruenceResult(residue, [(p, a, r.modulus) for p, a, r in parts])


def _next_prime_coprime(start: int, modulus: int) -> int:
    p = int(gmpy2.next_prime(start - 1)) if start > 2 else 2
    while modulus % p == 0:
        p = int(gmpy2.next_prime(p))
    return p


def residue_strategy(n: int, M_min: int, counter: OperationCounter = COUNTER) -> Residue:
    """A residue of c_n with modulus >= M_min, preferring congruences.

    Falls back to (or amends with) one mod-p power-series pass, p the
    smallest suitable prime.
    """
    if M_min < 2:
        raise ValueError("M_min must be >= 2")
    special = special_residue(n)
    if special is None:
        p = _next_prime_coprime(M_min, 1)
        counter.bump()
        return coeff_mod(n, p)
    res = special.residue
    if res.modulus >= M_min:
        return res
    need = -(-M_min // res.modulus)
    p = _next_prime_coprime(max(2, need), res.modulus)
    counter.bump()
    return crt_combine([res, coeff_mod(n, p)])


def validate_families(exact: List[int]) -> Dict[Tuple[int, int], Tuple[int, int]]:
    """Sweep every family against exact coefficients.

    ``exact[k + 1]`` holds c_k (the layout of ``coeffs_exact_range``).
    Returns {(p, a): (agree, disagree)}.
    """
    tally: Dict[Tuple[int, int], List[int]] = {}
    for n in range(1, len(exact) - 1):
        c = exact[n + 1]
        for p in FAMILY_PRIMES:
            a, m = _split_power(n, p)
            if a == 0:
                continue
            r = FAMILIES[p](a, m)
            slot = tally.setdefault((p, a), [0, 0])
            slot[0 if c % r.modulus == r.value else 1] += 1
    return {k: (v[0], v[1]) for k, v in sorted(tally.items())}
