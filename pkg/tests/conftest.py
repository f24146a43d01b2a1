import sys

import pytest

from jfun.qseries import coeffs_exact_range

if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)


def naive_j_coefficients(count):
    """c_{-1}, ..., c_{count-2} from E4^3 / Delta with schoolbook products over Z."""
    length = count

    def mul(a, b):
        out = [0] * length
        for i, x in enumerate(a):
            if x:
                for j in range(length - i):
                    out[i + j] += x * b[j]
        return out

    e4 = [1] + [240 * sum(d**3 for d in range(1, k + 1) if k % d == 0) for k in range(1, length)]
    # Delta / q = prod (1 - q^k)^24
    eta = [1] + [0] * (length - 1)
    for k in range(1, length):
        factor = [0] * length
        factor[0] = 1
        factor[k] = -1
        for _ in range(24):
            eta = mul(eta, factor)
    inv = [0] * length
    inv[0] = 1
    for i in range(1, length):
        inv[i] = -sum(eta[j] * inv[i - j] for j in range(1, i + 1))
    return mul(mul(mul(e4, e4), e4), inv)


@pytest.fixture(scope="session")
def exact_2000():
    """Exact c_k at index k + 1 for -1 <= k <= 2000."""
    return coeffs_exact_range(2000)
