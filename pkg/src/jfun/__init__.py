"""Exact coefficients of the modular j-function.

c_n is available from a multimodular power series, from the
Petersson-Rademacher series with rigorous ball arithmetic, and from the
hybrid of the two (a residue mod M plus a certified numerical quotient).
"""

__version__ = "0.1.0"

from .arith import Residue, crt_combine, factorize, is_probable_prime
from .ball import Ball
from .engine import ComputeConfig, SearchRecord, compute_cn, search_primes
from .qseries import coeff_exact_multimodular, coeff_mod, j_series_mod
from .rademacher import hybrid_coefficient, partial_sum, remainder_bound

__all__ = [
    "Ball",
    "ComputeConfig",
    "Residue",
    "SearchRecord",
    "coeff_exact_multimodular",
    "coeff_mod",
    "compute_cn",
    "crt_combine",
    "factorize",
    "hybrid_coefficient",
    "is_probable_prime",
    "j_series_mod",
    "partial_sum",
    "remainder_bound",
    "search_primes",
]
