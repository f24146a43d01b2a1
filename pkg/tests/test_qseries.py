import random

import pytest
from hypothesis import given, settings, strategies as st

from jfun.arith import divisor_sigma
from jfun.qseries import (
    ModulusMismatch,
    SeriesModM,
    coeff_exact_multimodular,
    coeff_mod,
    coeffs_exact_range,
    eisenstein_e4,
    j_series_mod,
    log2_magnitude_upper,
    multimodular_primes,
    phi_power,
    series_inv,
    series_mul,
    word_primes,
)
from jfun.rademacher import magnitude_estimate

from conftest import naive_j_coefficients

C100 = 83798831110707476912751950384757452703801918339072000


def test_first_coefficients():
    s = j_series_mod(5, 10**30)
    assert s.coeffs == [1, 744, 196884, 21493760, 864299970, 20245856256, 333202640600]
    assert coeff_mod(1, 10**6).value == 196884
    assert coeff_mod(2, 2**16).value == 63488


def test_range_against_naive_convolution():
    naive = naive_j_coefficients(122)
    assert coeffs_exact_range(120) == naive
    assert naive[101] == C100


def brute_mul(a, b, m, length):
    out = [0] * length
    for i, x in enumerate(a[:length]):
        for j, y in enumerate(b[: length - i]):
            out[i + j] = (out[i + j] + x * y) % m
    return out


@settings(max_examples=60, deadline=None)
@given(
    st.integers(2, 2**130),
    st.lists(st.integers(0, 2**140), min_size=1, max_size=40),
    st.lists(st.integers(0, 2**140), min_size=1, max_size=40),
    st.integers(1, 60),
)
def test_series_mul_matches_schoolbook(m, a, b, length):
    sa, sb = SeriesModM.from_ints(a, m), SeriesModM.from_ints(b, m)
    got = series_mul(sa, sb, length).coeffs
    want = brute_mul(sa.coeffs, sb.coeffs, m, length)
    assert got == want


def test_series_mul_squaring_and_mismatch():
    rng = random.Random(1)
    m = 1000003
    a = SeriesModM.from_ints([rng.randrange(m) for _ in range(300)], m)
    assert series_mul(a, a, 300).coeffs == brute_mul(a.coeffs, a.coeffs, m, 300)
    with pytest.raises(ModulusMismatch):
        series_mul(a, SeriesModM.from_ints([1], 7), 5)


@pytest.mark.parametrize("m", [2**16, 1000003, 2**64 - 59, 10**40 + 1])
def test_inverse_gives_unit(m):
    rng = random.Random(m)
    a = SeriesModM.from_ints([1] + [rng.randrange(m) for _ in range(499)], m)
    prod = series_mul(a, series_inv(a, 500), 500)
    assert prod.coeffs == [1] + [0] * 499
    with pytest.raises(ValueError):
        series_inv(SeriesModM.from_ints([2, 1], m), 4)


def test_sparse_phi4_equals_dense_product():
    m = 998244353
    dense = series_mul(phi_power(3, 1000, m), phi_power(1, 1000, m), 1000)
    assert phi_power(4, 1000, m).coeffs == dense.coeffs
    assert phi_power(1, 8, 10**6).coeffs == [1, 10**6 - 1, 10**6 - 1, 0, 0, 1, 0, 1]


def test_e4_coefficients():
    m = 2**61 - 1
    e4 = eisenstein_e4(1001, m)
    assert e4[0] == 1
    assert all(e4[n] == 240 * divisor_sigma(3, n) % m for n in range(1, 1001))


def test_two_moduli_agree_with_exact(exact_2000):
    rng = random.Random(5)
    for n in list(range(-1, 301)):
        m1, m2 = 2053, rng.choice([2**16, 10**12 + 39, 3**40])
        exact = exact_2000[n + 1]
        assert coeff_mod(n, m1).value == exact % m1
        assert coeff_mod(n, m2).value == exact % m2


def test_multimodular_matches_range(exact_2000):
    for n in (1, 2, 50, 777, 2000):
        assert coeff_exact_multimodular(n) == exact_2000[n + 1]
    assert coeff_exact_multimodular(100) == C100


def test_parallel_multimodular_is_deterministic(exact_2000):
    assert coeff_exact_multimodular(1500, jobs=2) == exact_2000[1501]


@pytest.mark.parametrize("n,digits", [(100, 53), (1000, 171), (10**4, 543)])
def test_digit_count_matches_estimate(n, digits):
    c = coeff_exact_multimodular(n)
    assert c > 0
    assert abs(len(str(c)) - magnitude_estimate(n)[0]) <= 1
    assert len(str(c)) == digits
    assert c.bit_length() <= log2_magnitude_upper(n) + 1


def test_word_primes():
    ps = word_primes(4)
    assert ps[0] == 2**64 - 59 and list(ps) == sorted(ps, reverse=True)
    assert len(multimodular_primes(10**4)) * 64 > log2_magnitude_upper(10**4)
