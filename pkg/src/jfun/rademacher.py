"""The Petersson-Rademacher series for c_n with rigorous truncation control.

    c_n = (2 pi / sqrt(n)) sum_{k=1}^{N} S(n, -1; k)/k I1(4 pi sqrt(n) / k) + R_N(n)
    |R_N(n)| <= (72 pi / sqrt(n)) N^(3/4) I1(4 pi sqrt(n) / N)

The hybrid method takes a residue r = c_n mod M, sums until the tail bound
drops below 0.499 M and certifies (c_n - r)/M as the unique integer in the
resulting ball.
"""

from __future__ import annotations

import csv
import decimal
import io
import logging
import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterator, List, Optional, TextIO, Tuple, Union

from . import ball
from .ball import Ball
from .kloosterman import kloosterman_eval

log = logging.getLogger(__name__)

DEFAULT_GUARD_BITS = 32
TRUNCATION_CEILING = 10**9
PROFILE_MAX_N = 10**5
CUTOFF = Fraction(499, 1000)
_LN2 = math.log(2)


class TruncationError(ValueError):
    """No admissible truncation point below the configured ceiling."""


class CertificationError(ArithmeticError):
    """The hybrid ball did not isolate a single integer."""


@dataclass(frozen=True)
class HybridPlan:
    n: int
    modulus: int
    residue: int
    N: int
    guard_bits: int


@dataclass(frozen=True)
class ErrorProfilePoint:
    N: int
    actual_error: Decimal
    bound: Decimal


def _two_pi_sqrt_terms(n: int, prec: int) -> Tuple[Ball, Ball]:
    """(4 pi sqrt(n), 2 pi / sqrt(n)) at ``prec`` bits."""
    pi = ball.const_pi(prec + 8)
    sn = ball.sqrt(Ball(n), prec + 8)
    x = ball.mul_2exp(ball.mul(pi, sn, prec), 2)
    pre = ball.div(ball.mul_2exp(pi, 1), sn, prec)
    return x, pre


def _pow_three_quarters(N: int, prec: int) -> Ball:
    r = ball.sqrt(Ball(N), prec + 4)
    return ball.sqrt(ball.mul_int(r, N, prec + 4), prec)


def remainder_bound(n: int, N: int, pathway: str = "best", prec: Optional[int] = None) -> Ball:
    """Upper bound for |R_N(n)| as an exact ball (its value is the bound).

    ``pathway`` selects the I1 estimate: ``"best"`` (minimum of both estimates and
    direct evaluation), ``"exp"`` (e^x / sqrt(2 pi x)) or ``"linear"``
    (0.501 x, only for x < 0.1).
    """
    if n < 1 or N < 1:
        raise ValueError("remainder_bound needs n >= 1 and N >= 1")
    if prec is None:
        prec = 64 + n.bit_length() + N.bit_length()
    x, _ = _two_pi_sqrt_terms(n, prec)
    x = ball.div_int(x, N, prec)
    h = x.upper()
    if pathway == "best":
        i1 = ball.bessel_i1_upper(x, prec).upper()
    elif pathway == "exp":
        i1 = ball.i1_exp_bound(h, prec)
    elif pathway == "linear":
        i1 = ball.i1_linear_bound(h)
    else:
        raise ValueError(f"unknown pathway {pathway!r}")
    pi = ball.const_pi(prec)
    front = ball.div(ball.mul_int(pi, 72, prec), ball.sqrt(Ball(n), prec), prec)
    total = ball.mul(front, _pow_three_quarters(N, prec), prec)
    total = ball.mul(total, Ball.exact(i1) if _dyadic(i1) else Ball.from_fraction(i1, prec), prec)
    return Ball.exact(total.upper())


def _dyadic(q: Fraction) -> bool:
    d = q.denominator
    return d & (d - 1) == 0


def choose_truncation(n: int, modulus: int, ceiling: int = TRUNCATION_CEILING) -> int:
    """Smallest N on a doubling-then-bisection lattice with bound <= 0.499 M.

    Raises:
        TruncationError: if even N = ceiling does not satisfy the bound.
    """
    if modulus < 2:
        raise ValueError("modulus must be >= 2")
    target = CUTOFF * modulus

    def ok(N: int) -> bool:
        return remainder_bound(n, N).upper() <= target

    N = 1
    while not ok(N):
        if N >= ceiling:
            raise TruncationError(
                f"truncation for n={n} with M={modulus} exceeds {ceiling} terms; use a larger modulus"
            )
        N = min(2 * N, ceiling)
    if N == 1:
        return 1
    lo, hi = N // 2, N
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def term_precision(n: int, k: int, N: int, guard_bits: int) -> int:
    """Working precision for term k: its magnitude in bits plus guards."""
    x = 4 * math.pi * math.sqrt(n) / k
    return max(64, math.ceil(x / _LN2) + guard_bits + max(1, (N - 1).bit_length()))


def _terms(n: int, N: int, guard_bits: int) -> Iterator[Tuple[int, Ball]]:
    """Yield (k, S(n,-1;k)/k * I1(4 pi sqrt(n)/k)) for k = 1..N."""
    top = term_precision(n, 1, N, guard_bits) + 16
    x0, _ = _two_pi_sqrt_terms(n, top)
    for k in range(1, N + 1):
        pk = term_precision(n, k, N, guard_bits)
        s = kloosterman_eval(n, -1, k, pk)
        if s.is_zero():
            yield k, Ball()
            continue
        xk = ball.div_int(ball.set_prec(x0, pk + 16), k, pk + 16)
        i1 = ball.bessel_i1(xk, pk)
        yield k, ball.div_int(ball.mul(s, i1, pk), k, pk)


def partial_sums(n: int, N: int, guard_bits: int = DEFAULT_GUARD_BITS) -> Iterator[Tuple[int, Ball]]:
    """Yield (K, partial sum through K terms) for K = 1..N, scheduled for N terms."""
    if n < 1 or N < 1:
        raise ValueError("partial sums need n >= 1 and N >= 1")
    wp = term_precision(n, 1, N, guard_bits) + 16
    _, pre = _two_pi_sqrt_terms(n, wp)
    acc = Ball()
    for k, term in _terms(n, N, guard_bits):
        acc = ball.add(acc, term, wp)
        yield k, ball.mul(pre, acc, wp)


def partial_sum(n: int, N: int, guard_bits: int = DEFAULT_GUARD_BITS) -> Ball:
    """Ball containing the first N terms of the series for c_n."""
    if n < 1 or N < 1:
        raise ValueError("partial_sum needs n >= 1 and N >= 1")
    wp = term_precision(n, 1, N, guard_bits) + 16
    _, pre = _two_pi_sqrt_terms(n, wp)
    acc = Ball()
    for _, term in _terms(n, N, guard_bits):
        acc = ball.add(acc, term, wp)
    return ball.mul(pre, acc, wp)


def plan_hybrid(n: int, residue: int, modulus: int, guard_bits: int = DEFAULT_GUARD_BITS) -> HybridPlan:
    if not 0 <= residue < modulus:
        raise ValueError("residue must satisfy 0 <= r < M")
    return HybridPlan(n, modulus, residue, choose_truncation(n, modulus), guard_bits)


def hybrid_coefficient(
    n: int,
    residue: int,
    modulus: int,
    guard_bits: int = DEFAULT_GUARD_BITS,
    retries: int = 3,
) -> int:
    """c_n from its residue mod M plus a certified numerical quotient.

    Raises:
        CertificationError: if no unique integer is found after ``retries``
            guard doublings (wrong residue or violated bound).
    """
    plan = plan_hybrid(n, residue, modulus, guard_bits)
    bound = remainder_bound(n, plan.N)
    guard = plan.guard_bits
    for attempt in range(retries + 1):
        s = partial_sum(n, plan.N, guard)
        wp = max(64, math.ceil(s.log2_abs_upper()) - modulus.bit_length() + guard + 32)
        q = ball.div_int(ball.sub(s, Ball(residue), wp + modulus.bit_length()), modulus, wp)
        q = ball.add_error(q, ball.div_int(bound, modulus, 64))
        t = ball.unique_integer(q)
        if t is not None:
            log.debug("n=%d N=%d M=%d certified on attempt %d", n, plan.N, modulus, attempt)
            return modulus * t + residue
        log.info("n=%d: certification failed with %d guard bits, retrying", n, guard)
        guard *= 2
    raise CertificationError(
        f"could not certify c_{n} with residue {residue} mod {modulus} (N={plan.N})"
    )


# -- magnitude ----------------------------------------------------------------


def magnitude_bounds(n: int, prec: int = 64) -> Tuple[Ball, Ball]:
    """Balls enclosing the explicit lower and upper bounds for c_n, n >= 1.

    c_n = e^(4 pi sqrt n) / (sqrt 2 n^(3/4)) (1 - 3/(32 pi sqrt n) + eps), |eps| <= 0.055/n.
    """
    if n < 1:
        raise ValueError("magnitude bounds need n >= 1")
    wp = prec + 16
    x, _ = _two_pi_sqrt_terms(n, wp + n.bit_length())
    main = ball.exp(x, wp)
    denom = ball.mul(ball.sqrt(Ball(2), wp), _pow_three_quarters(n, wp), wp)
    main = ball.div(main, denom, wp)
    pi = ball.const_pi(wp)
    corr_den = ball.mul(ball.mul_int(pi, 32, wp), ball.sqrt(Ball(n), wp), wp)
    corr = ball.sub(Ball(1), ball.div(Ball(3), corr_den, wp), wp)
    eps = Ball.from_fraction(Fraction(55, 1000 * n), wp)
    upper = ball.mul(main, ball.add(corr, eps, wp), prec)
    lower = ball.mul(main, ball.sub(corr, eps, wp), prec)
    return lower, upper


def _decimal_digits_of_real(b: Ball) -> Optional[int]:
    """Digit count of floor(v) shared by every v in a positive ball, if unique."""
    lg = b.log2_abs_upper()
    est = int(lg * math.log10(2)) + 1
    lo, hi = b.lower(), b.upper()
    for d in (est - 1, est, est + 1):
        if d >= 1 and lo >= 10 ** (d - 1) and hi < 10**d:
            return d
    return None


def magnitude_estimate(n: int) -> Tuple[int, float]:
    """(decimal digits, log2) of the upper bound for c_n."""
    prec = 64
    for _ in range(6):
        _, upper = magnitude_bounds(n, prec)
        digits = _decimal_digits_of_real(upper)
        if digits is not None:
            return digits, float(upper.log2_abs_upper())
        prec *= 2
    raise ArithmeticError(f"could not resolve the digit count of the bound for n={n}")


# -- error profile ------------------------------------------------------------


def _to_decimal(value: Fraction, digits: int = 17) -> Decimal:
    ctx = decimal.Context(prec=digits + 4, Emax=decimal.MAX_EMAX, Emin=decimal.MIN_EMIN)
    return ctx.divide(Decimal(value.numerator), Decimal(value.denominator))


def error_profile(n: int, N_max: int, exact: Optional[int] = None) -> List[ErrorProfilePoint]:
    """Actual error c_n - partial sum next to the tail bound, for N = 1..N_max.

    Midpoints are diagnostic only.  ``exact`` may be passed to skip the
    power-series computation of c_n.
    """
    if n < 1 or n > PROFILE_MAX_N:
        raise ValueError(f"error_profile supports 1 <= n <= {PROFILE_MAX_N}")
    if N_max < 1:
        raise ValueError("N_max must be >= 1")
    if exact is None:
        from .qseries import coeff_exact_multimodular

        exact = coeff_exact_multimodular(n)
    points = []
    for N, s in partial_sums(n, N_max):
        err = exact - s.mid()
        bound = remainder_bound(n, N).upper()
        points.append(ErrorProfilePoint(N, _to_decimal(err), _to_decimal(bound)))
    return points


def write_profile_csv(points: List[ErrorProfilePoint], out: Union[str, TextIO]) -> None:
    """CSV with header ``N,actual_error,bound``; reals at 17 significant digits."""
    if isinstance(out, str):
        with open(out, "w", newline="") as fh:
            write_profile_csv(points, fh)
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["N", "actual_error", "bound"])
    for p in points:
        writer.writerow([p.N, f"{p.actual_error:.16e}", f"{p.bound:.16e}"])


def profile_csv_text(points: List[ErrorProfilePoint]) -> str:
    buf = io.StringIO()
    write_profile_csv(points, buf)
    return buf.getvalue()
