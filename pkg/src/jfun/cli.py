"""Command-line front end.  Results go to stdout; logs and errors to stderr."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import List, Optional

import gmpy2

from . import __version__
from .ball import DomainError, PrecisionError
from .congruence import special_residue
from .engine import METHODS, CheckpointError, ComputeConfig, VerificationError, compute_cn, search_primes
from .kloosterman import kloosterman_eval
from .qseries import coeff_mod, j_series_mod
from .rademacher import (
    CertificationError,
    TruncationError,
    error_profile,
    remainder_bound,
    write_profile_csv,
)

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE = 0, 1, 2
COMPUTE_ERRORS = (
    ArithmeticError,
    CertificationError,
    TruncationError,
    VerificationError,
    CheckpointError,
    DomainError,
    PrecisionError,
    OSError,
)

log = logging.getLogger("jfun")


def _int_at_least(lo: int):
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if value < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {value}")
        return value

    parse.__name__ = f"integer>={lo}"
    return parse


def _default_jobs() -> int:
    env = os.environ.get("JFUN_THREADS")
    if env:
        try:
            jobs = int(env)
        except ValueError:
            jobs = 0
        if jobs >= 1:
            return jobs
        log.warning("ignoring invalid JFUN_THREADS=%r", env)
    return os.cpu_count() or 1


def _fraction_text(q: Fraction, digits: int) -> str:
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(q.numerator) / Decimal(q.denominator))


def _format_int(value: int, hex_out: bool) -> str:
    v = gmpy2.mpz(value)
    return v.digits(16) if hex_out else str(v)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jfun", description="Coefficients of the modular j-function.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("coeff", help="exact c_N")
    p.add_argument("n", type=_int_at_least(-1), metavar="N")
    p.add_argument("--method", choices=METHODS, default="auto")
    p.add_argument("--mmin", type=_int_at_least(2), default=2048, help="minimum hybrid modulus")
    p.add_argument("--verify", action="store_true", help="cross-check with an independent computation")
    p.add_argument("--hex", action="store_true", help="print the value in hexadecimal")
    p.add_argument("--json", action="store_true", help="print a JSON object")
    p.add_argument("--jobs", type=_int_at_least(1), default=None)

    p = sub.add_parser("series", help="c_-1 .. c_N modulo M")
    p.add_argument("n", type=_int_at_least(-1), metavar="N")
    p.add_argument("--mod", type=_int_at_least(2), required=True, metavar="M")
    p.add_argument("--out", metavar="PATH", help="write to a file instead of stdout")

    p = sub.add_parser("residue", help="c_N modulo M")
    p.add_argument("n", type=_int_at_least(-1), metavar="N")
    p.add_argument("--mod", type=_int_at_least(2), required=True, metavar="M")

    p = sub.add_parser("congruence", help="residue of c_N from the small-prime congruences")
    p.add_argument("n", type=_int_at_least(1), metavar="N")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("kloosterman", help="S(A, B; K) as midpoint and radius")
    p.add_argument("a", type=int, metavar="A")
    p.add_argument("b", type=int, metavar="B")
    p.add_argument("k", type=_int_at_least(1), metavar="K")
    p.add_argument("--prec", type=_int_at_least(32), default=64, metavar="P")

    p = sub.add_parser("bound", help="tail bound after N_TERMS terms of the series for c_N_INDEX")
    p.add_argument("n", type=_int_at_least(1), metavar="N_INDEX")
    p.add_argument("terms", type=_int_at_least(1), metavar="N_TERMS")

    p = sub.add_parser("profile", help="CSV of actual truncation error against the bound")
    p.add_argument("n", type=_int_at_least(1), metavar="N")
    p.add_argument("--nmax", type=_int_at_least(1), required=True, metavar="T")
    p.add_argument("--out", required=True, metavar="PATH")

    p = sub.add_parser("search", help="scan LO..HI for probable-prime coefficients")
    p.add_argument("lo", type=_int_at_least(0), metavar="LO")
    p.add_argument("hi", type=_int_at_least(0), metavar="HI")
    p.add_argument("--jobs", type=_int_at_least(1), default=None)
    p.add_argument("--resume", metavar="PATH", help="JSON Lines checkpoint to append to and resume from")

    p = sub.add_parser("verify", help="c_N computed twice by independent routes")
    p.add_argument("n", type=_int_at_least(-1), metavar="N")
    p.add_argument("--mmin", type=_int_at_least(2), default=2048)
    p.add_argument("--jobs", type=_int_at_least(1), default=None)
    return parser


def _cmd_coeff(args, out) -> int:
    config = ComputeConfig(method=args.method, M_min=args.mmin, verify=args.verify, thread_count=args.jobs or _default_jobs())
    started = time.perf_counter()
    value = compute_cn(args.n, config)
    elapsed = int((time.perf_counter() - started) * 1000)
    text = _format_int(value, args.hex)
    if args.json:
        digits = len(str(gmpy2.mpz(abs(value))))
        method = args.method
        if method == "auto":
            method = "series" if args.n < config.crossover else "hybrid"
        payload = {"n": args.n, "digits": digits, "value": text, "method": method, "elapsed_ms": elapsed}
        print(json.dumps(payload), file=out)
    else:
        print(text, file=out)
    return EXIT_OK


def _cmd_series(args, out) -> int:
    series = j_series_mod(args.n, args.mod)
    sink = open(args.out, "w", encoding="utf-8") if args.out else out
    try:
        for i, c in enumerate(series.coeffs):
            sink.write(f"{i - 1} {c}\n")
    finally:
        if args.out:
            sink.close()
    return EXIT_OK


def _cmd_residue(args, out) -> int:
    print(coeff_mod(args.n, args.mod).value, file=out)
    return EXIT_OK


def _cmd_congruence(args, out) -> int:
    result = special_residue(args.n)
    if args.json:
        payload = None
        if result is not None:
            payload = {
                "residue": str(result.residue.value),
                "modulus": str(result.residue.modulus),
                "sources": [{"p": p, "a": a, "modulus": str(m)} for p, a, m in result.sources],
            }
        print(json.dumps(payload), file=out)
    elif result is None:
        print("none", file=out)
    else:
        families = ", ".join(f"{p}^{a} (mod {m})" for p, a, m in result.sources)
        print(f"{result.residue.value} mod {result.residue.modulus} from {families}", file=out)
    return EXIT_OK


def _cmd_kloosterman(args, out) -> int:
    s = kloosterman_eval(args.a, args.b, args.k, args.prec)
    digits = max(20, int(args.prec * 0.30103) + 2)
    print(f"{_fraction_text(s.mid(), digits)} {_fraction_text(s.rad(), 6)}", file=out)
    return EXIT_OK


def _cmd_bound(args, out) -> int:
    print(_fraction_text(remainder_bound(args.n, args.terms).upper(), 17), file=out)
    return EXIT_OK


def _cmd_profile(args, out) -> int:
    write_profile_csv(error_profile(args.n, args.nmax), args.out)
    return EXIT_OK


def _cmd_search(args, out) -> int:
    if args.hi < args.lo:
        raise _UsageError("HI must be >= LO")
    config = ComputeConfig(thread_count=args.jobs or _default_jobs())
    records = search_primes(args.lo, args.hi, config, args.resume)
    hits = [r for r in records if r.status != "filtered"]
    log.info("%d records, %d candidates, %d probable primes", len(records), len(hits), sum(r.status == "probable_prime" for r in hits))
    for rec in hits:
        print(rec.to_json(), file=out)
    return EXIT_OK


def _cmd_verify(args, out) -> int:
    config = ComputeConfig(M_min=args.mmin, verify=True, thread_count=args.jobs or _default_jobs())
    print(_format_int(compute_cn(args.n, config), False), file=out)
    return EXIT_OK


class _UsageError(Exception):
    pass


COMMANDS = {
    "coeff": _cmd_coeff,
    "series": _cmd_series,
    "residue": _cmd_residue,
    "congruence": _cmd_congruence,
    "kloosterman": _cmd_kloosterman,
    "bound": _cmd_bound,
    "profile": _cmd_profile,
    "search": _cmd_search,
    "verify": _cmd_verify,
}


def run(argv: Optional[List[str]] = None, out=None) -> int:
    """Parse ``argv`` and execute; returns the process exit code."""
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args, out)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"jfun: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except COMPUTE_ERRORS as exc:
        print(f"jfun: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except ValueError as exc:
        print(f"jfun: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


def main() -> None:
    sys.exit(run())
