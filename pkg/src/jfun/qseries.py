"""Truncated power series over Z/MZ and the q-expansion of j.

j = (1/q) (E4 / phi^8)^3, where phi is the eta product without its q^(1/24)
factor.  The 1/q is an index shift: c_k sits at index k + 1 of
(E4/phi^8)^3, so no negative exponents are ever stored.

Multiplication uses Kronecker substitution: residues are packed into one big
integer per operand, multiplied with GMP, and unpacked.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple

import gmpy2
import numpy as np

from .arith import Residue, crt_combine, is_probable_prime

WORD_BITS = 64


class ModulusMismatch(ValueError):
    pass


@dataclass(frozen=True)
class SeriesModM:
    """Coefficients ``coeffs[i]`` of q^i, reduced into ``[0, modulus)``.

    The coefficient list is not copied; treat it as read-only.
    """

    modulus: int
    coeffs: List[int]

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("modulus must be >= 2")
        if not self.coeffs:
            raise ValueError("series length must be >= 1")

    @property
    def length(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i]

    def truncate(self, length: int) -> "SeriesModM":
        return SeriesModM(self.modulus, self.coeffs[:length])

    @classmethod
    def from_ints(cls, values: Sequence[int], modulus: int) -> "SeriesModM":
        return cls(modulus, [v % modulus for v in values])


# -- Kronecker substitution --------------------------------------------------


def _pack(coeffs: List[int], slot: int, modulus: int) -> int:
    if modulus <= 1 << 64 and len(coeffs) > 64:
        words = np.array(coeffs, dtype="<u8").view(np.uint8).reshape(-1, 8)
        if slot >= 8:
            grid = np.zeros((len(coeffs), slot), dtype=np.uint8)
            grid[:, :8] = words
            return int.from_bytes(grid.tobytes(), "little")
    return int.from_bytes(b"".join(c.to_bytes(slot, "little") for c in coeffs), "little")


def _unpack(value, slot: int, length: int, modulus: int) -> List[int]:
    value = int(value)
    nbytes = max(slot * length, (value.bit_length() + 7) // 8)
    raw = value.to_bytes(nbytes, "little")[: slot * length]
    if modulus < 1 << 31 and slot <= 16 and length > 64:
        grid = np.zeros((length, 16), dtype=np.uint8)
        grid[:, :slot] = np.frombuffer(raw, dtype=np.uint8).reshape(length, slot)
        words = grid.view("<u8")
        m = np.uint64(modulus)
        r64 = np.uint64(pow(2, 64, modulus))
        lo = words[:, 0] % m
        hi = words[:, 1] % m
        return ((lo + hi * r64 % m) % m).tolist()
    frm = int.from_bytes
    return [frm(raw[i : i + slot], "little") % modulus for i in range(0, slot * length, slot)]


def _mul_raw(a: List[int], b: List[int], modulus: int, length: int) -> List[int]:
    """Truncated product of two residue lists."""
    square = a is b
    a = a[:length]
    b = b[:length]
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return [0] * length
    out_len = min(length, la + lb - 1)
    if min(la, lb) <= 8:
        out = [0] * out_len
        for i, x in enumerate(a):
            if x:
                for j in range(min(lb, out_len - i)):
                    out[i + j] += x * b[j]
        return [v % modulus for v in out] + [0] * (length - out_len)
    bits = 2 * (modulus - 1).bit_length() + min(la, lb).bit_length() + 1
    slot = (bits + 7) // 8
    pa = gmpy2.mpz(_pack(a, slot, modulus))
    if square:
        prod = pa * pa
    else:
        prod = pa * gmpy2.mpz(_pack(b, slot, modulus))
    out = _unpack(prod, slot, out_len, modulus)
    if out_len < length:
        out.extend([0] * (length - out_len))
    return out


def series_mul(a: SeriesModM, b: SeriesModM, length: int) -> SeriesModM:
    """Product ``a * b`` truncated to ``length`` coefficients."""
    if a.modulus != b.modulus:
        raise ModulusMismatch(f"moduli differ: {a.modulus} vs {b.modulus}")
    if length < 1:
        raise ValueError("length must be >= 1")
    return SeriesModM(a.modulus, _mul_raw(a.coeffs, b.coeffs, a.modulus, length))


def _inv_raw(a: List[int], modulus: int, length: int) -> List[int]:
    b = [1]
    k = 1
    while k < length:
        k2 = min(2 * k, length)
        # a b = 1 + q^k h (mod q^k2); b <- b - q^k b h
        t = _mul_raw(a, b, modulus, k2)
        h = t[k:k2]
        c = _mul_raw(b, h, modulus, k2 - k)
        b = b + [(-v) % modulus for v in c]
        k = k2
    return b


def series_inv(a: SeriesModM, length: int) -> SeriesModM:
    """Newton inverse of a series with constant term 1, to ``length`` terms.

    Raises:
        ValueError: if the constant term is not 1.
    """
    if a.coeffs[0] % a.modulus != 1:
        raise ValueError("series_inv requires constant term 1")
    if length < 1:
        raise ValueError("length must be >= 1")
    return SeriesModM(a.modulus, _inv_raw(a.coeffs, a.modulus, length))


# -- building blocks of j ----------------------------------------------------


def _pentagonal_terms(length: int) -> List[Tuple[int, int]]:
    """Nonzero terms (exponent, sign) of phi = sum (-1)^k q^(k(3k-1)/2)."""
    terms = [(0, 1)]
    k = 1
    while True:
        e1 = k * (3 * k - 1) // 2
        if e1 >= length:
            break
        sign = -1 if k % 2 else 1
        terms.append((e1, sign))
        e2 = k * (3 * k + 1) // 2
        if e2 < length:
            terms.append((e2, sign))
        k += 1
    return terms


def _triangular_terms(length: int) -> List[Tuple[int, int]]:
    """Nonzero terms of phi^3 = sum_{n>=0} (-1)^n (2n+1) q^(n(n+1)/2)."""
    terms = []
    n = 0
    while n * (n + 1) // 2 < length:
        terms.append((n * (n + 1) // 2, (2 * n + 1) if n % 2 == 0 else -(2 * n + 1)))
        n += 1
    return terms


@lru_cache(maxsize=4)
def _phi4_integer(length: int) -> np.ndarray:
    """phi^4 over Z as the sparse product phi^3 * phi."""
    p3 = _triangular_terms(length)
    p1 = _pentagonal_terms(length)
    e3 = np.array([e for e, _ in p3], dtype=np.int64)
    c3 = np.array([c for _, c in p3], dtype=np.int64)
    e1 = np.array([e for e, _ in p1], dtype=np.int64)
    c1 = np.array([c for _, c in p1], dtype=np.int64)
    out = np.zeros(length, dtype=np.int64)
    # row by row keeps memory at O(#terms) per step
    for e, c in zip(e1.tolist(), c1.tolist()):
        keep = e3 < length - e
        np.add.at(out, e3[keep] + e, c3[keep] * c)
    return out


def phi_power(e: int, length: int, modulus: int) -> SeriesModM:
    """phi^e mod M to ``length`` terms for e in {1, 3, 4, 8}."""
    if length < 1:
        raise ValueError("length must be >= 1")
    if e == 1:
        out = [0] * length
        for k, s in _pentagonal_terms(length):
            out[k] = s % modulus
        return SeriesModM(modulus, out)
    if e == 3:
        out = [0] * length
        for k, s in _triangular_terms(length):
            out[k] = s % modulus
        return SeriesModM(modulus, out)
    if e == 4:
        return SeriesModM(modulus, [int(v) % modulus for v in _phi4_integer(length).tolist()])
    if e == 8:
        p4 = phi_power(4, length, modulus)
        return series_mul(p4, p4, length)
    raise ValueError(f"phi_power supports e in {{1, 3, 4, 8}}, got {e}")


_NUMPY_SIGMA_LIMIT = 2 * 10**6  # sigma_3(n) < 1.21 n^3 stays below 2^64


@lru_cache(maxsize=4)
def _sigma3_table(length: int):
    if length <= _NUMPY_SIGMA_LIMIT:
        sig = np.zeros(length, dtype=np.uint64)
        for d in range(1, length):
            sig[d::d] += np.uint64(d * d * d)
        return sig.tolist()
    sig = [0] * length
    for d in range(1, length):
        c = d * d * d
        for k in range(d, length, d):
            sig[k] += c
    return sig


def eisenstein_e4(length: int, modulus: int) -> SeriesModM:
    """E4 = 1 + 240 sum sigma_3(n) q^n mod M, from an additive divisor sieve."""
    if length < 1:
        raise ValueError("length must be >= 1")
    sig = _sigma3_table(length)
    out = [240 * s % modulus for s in sig]
    out[0] = 1 % modulus
    return SeriesModM(modulus, out)


def _e4_over_phi8(length: int, modulus: int) -> List[int]:
    p4 = phi_power(4, length, modulus).coeffs
    p8 = _mul_raw(p4, p4, modulus, length)
    inv = _inv_raw(p8, modulus, length)
    e4 = eisenstein_e4(length, modulus).coeffs
    return _mul_raw(e4, inv, modulus, length)


def j_series_mod(n: int, modulus: int) -> SeriesModM:
    """(E4/phi^8)^3 mod M to length n + 2; index k + 1 holds c_k mod M."""
    if n < -1:
        raise ValueError("n must be >= -1")
    length = n + 2
    u = _e4_over_phi8(length, modulus)
    u2 = _mul_raw(u, u, modulus, length)
    return SeriesModM(modulus, _mul_raw(u2, u, modulus, length))


def coeff_mod(n: int, modulus: int) -> Residue:
    """c_n mod M via one series pass; the last product is a single dot product."""
    if n < -1:
        raise ValueError("n must be >= -1")
    if modulus < 2:
        raise ValueError("modulus must be >= 2")
    length = n + 2
    u = _e4_over_phi8(length, modulus)
    u2 = _mul_raw(u, u, modulus, length)
    top = length - 1
    if modulus < 1 << 31 and length > 256:
        a = np.array(u2, dtype=np.uint64)
        b = np.array(u[::-1], dtype=np.uint64)
        value = _chunked_dot(a, b, modulus)
    else:
        value = sum(u2[i] * u[top - i] for i in range(length)) % modulus
    return Residue(value, modulus)


def _chunked_dot(a: np.ndarray, b: np.ndarray, modulus: int) -> int:
    m = np.uint64(modulus)
    # operands < 2^31, so products fit and chunk sums of reduced products do too
    prods = (a * b) % m
    total = 0
    for start in range(0, len(prods), 1 << 20):
        total += int(prods[start : start + (1 << 20)].sum(dtype=np.uint64))
    return total % modulus


# -- multimodular reconstruction ---------------------------------------------


def log2_magnitude_upper(n: int) -> float:
    """Float upper estimate of log2 c_n with a generous relative safety factor."""
    if n < 1:
        return 10.0
    r = math.sqrt(n)
    factor = 1 + 3 / (32 * math.pi * r) + 0.055 / n
    return (4 * math.pi * r) / math.log(2) - 0.5 - 0.75 * math.log2(n) + math.log2(factor)


@lru_cache(maxsize=None)
def word_primes(count: int) -> Tuple[int, ...]:
    """The ``count`` largest primes below 2^64, in descending order."""
    primes = []
    p = (1 << WORD_BITS) - 1
    while len(primes) < count:
        if is_probable_prime(p):
            primes.append(p)
        p -= 2
    return tuple(primes)


def multimodular_primes(n: int) -> Tuple[int, ...]:
    """Word-size primes whose product exceeds the upper bound for c_n."""
    need = log2_magnitude_upper(n) + 8
    count = max(1, math.ceil(need / (WORD_BITS - 1)))
    return word_primes(count)


def _coeff_mod_value(args):
    n, p = args
    return coeff_mod(n, p).value


def coeff_exact_multimodular(n: int, jobs: int = 1) -> int:
    """Exact c_n from independent word-size prime passes combined by CRT."""
    if n < 1:
        raise ValueError("coeff_exact_multimodular requires n >= 1")
    primes = multimodular_primes(n)
    if jobs > 1 and len(primes) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(_coeff_mod_value, [(n, p) for p in primes]))
    else:
        values = [coeff_mod(n, p).value for p in primes]
    combined = crt_combine([Residue(v, p) for v, p in zip(values, primes)])
    return combined.value


def coeffs_exact_range(n_max: int) -> List[int]:
    """Exact c_{-1}, ..., c_{n_max} from one multimodular series run.

    Index k + 1 of the returned list holds c_k.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    primes = multimodular_primes(n_max)
    columns = [j_series_mod(n_max, p).coeffs for p in primes]
    out = []
    for idx in range(n_max + 2):
        out.append(crt_combine([Residue(col[idx], p) for col, p in zip(columns, primes)]).value)
    return out
