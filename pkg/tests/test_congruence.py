import pytest

from jfun.arith import Residue
from jfun.congruence import (
    DISABLED,
    OperationCounter,
    residue_strategy,
    special_residue,
    validate_families,
)
from jfun.qseries import coeff_mod


def test_n2_example():
    r = special_residue(2)
    assert r.residue == Residue(63488, 65536)
    assert r.sources == [(2, 1, 65536)]
    assert 21493760 % 65536 == 63488


def test_no_family_for_coprime_index():
    assert special_residue(457871) is None
    assert special_residue(1) is None


def test_n100_combines_two_families():
    r = special_residue(100)
    assert r.residue.modulus == 2**19 * 5**4
    assert [s[:2] for s in r.sources] == [(2, 2), (5, 2)]
    assert coeff_mod(100, 2**19 * 5**4).value == r.residue.value


def test_every_family_agrees_up_to_2000(exact_2000):
    tally = validate_families(exact_2000)
    assert not DISABLED
    failures = {k: v for k, v in tally.items() if v[1]}
    assert failures == {}
    # a = 1 is exercised for every prime
    for p in (2, 3, 5, 7):
        assert tally[(p, 1)][0] > 200


def test_special_residue_matches_exact(exact_2000):
    for n in range(1, 2001):
        r = special_residue(n)
        if r is not None:
            assert exact_2000[n + 1] % r.residue.modulus == r.residue.value


@pytest.mark.parametrize("n", [2, 4, 10, 98, 1000, 123456])
def test_even_index_needs_no_series(n):
    counter = OperationCounter()
    r = residue_strategy(n, 65536, counter)
    assert counter.series_passes == 0
    assert r.modulus >= 65536


def test_amended_and_fallback(exact_2000):
    counter = OperationCounter()
    r = residue_strategy(7, 1024, counter)
    assert counter.series_passes == 1 and r.modulus >= 1024 and r.modulus % 49 == 0
    assert exact_2000[8] % r.modulus == r.value
    r = residue_strategy(1999, 2048, counter)
    assert r.modulus == 2053 and counter.series_passes == 2
    assert exact_2000[2000] % 2053 == r.value


def test_modulus_floor_always_met(exact_2000):
    for n in range(1, 300):
        for m_min in (2, 100, 5000, 10**7):
            r = residue_strategy(n, m_min, OperationCounter())
            assert r.modulus >= m_min
            assert exact_2000[n + 1] % r.modulus == r.value
