"""Method selection for c_n and the prime-search pipeline."""

from __future__ import annotations

import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Dict, Iterable, List, Optional, Tuple

import gmpy2

from .arith import Residue, is_probable_prime, primorial
from .congruence import _next_prime_coprime, residue_strategy
from .qseries import coeff_exact_multimodular, coeff_mod, j_series_mod
from .rademacher import hybrid_coefficient

log = logging.getLogger(__name__)

METHODS = ("auto", "series", "hybrid")
SEARCH_PRIMORIAL_BOUND = 47
VERIFY_SERIES_LIMIT = 10**5
STATUSES = ("filtered", "composite", "probable_prime")


class VerificationError(ArithmeticError):
    """Two independent computations of c_n disagreed."""


class CheckpointError(ValueError):
    """The checkpoint file could not be parsed; nothing is overwritten."""


@dataclass(frozen=True)
class ComputeConfig:
    method: str = "auto"
    M_min: int = 2048
    verify: bool = False
    thread_count: int = 1
    crossover: int = 500

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.M_min < 2:
            raise ValueError("M_min must be >= 2")
        if self.thread_count < 1:
            raise ValueError("thread_count must be positive")


@dataclass(frozen=True)
class SearchRecord:
    n: int
    status: str
    digits: Optional[int] = None
    leading: Optional[str] = None
    trailing: Optional[str] = None
    elapsed_ms: Optional[int] = None

    def to_json(self) -> str:
        return json.dumps({k: v for k, v in asdict(self).items() if v is not None})

    @classmethod
    def from_json(cls, line: str) -> "SearchRecord":
        data = json.loads(line)
        if not isinstance(data, dict) or data.get("status") not in STATUSES or not isinstance(data.get("n"), int):
            raise ValueError("missing or invalid n/status")
        rec = cls(**data)
        if (rec.status == "filtered") != (rec.leading is None):
            raise ValueError("leading/trailing must be present exactly for non-filtered records")
        return rec


def _series(n: int, config: ComputeConfig) -> int:
    return coeff_exact_multimodular(n, jobs=config.thread_count)


def _hybrid(n: int, config: ComputeConfig, residue: Optional[Residue] = None) -> Tuple[int, Residue]:
    if residue is None:
        residue = residue_strategy(n, config.M_min)
    return hybrid_coefficient(n, residue.value, residue.modulus), residue


def compute_cn(n: int, config: ComputeConfig = ComputeConfig(), residue: Optional[Residue] = None) -> int:
    """Exact c_n.

    ``residue`` (a known c_n mod M with M >= 2) bypasses the residue
    strategy on the hybrid path.

    Raises:
        VerificationError: if ``config.verify`` and the cross-check disagrees.
    """
    if n == -1:
        return 1
    if n == 0:
        return 744
    if n < -1:
        raise ValueError(f"c_n vanishes or is undefined for n = {n}; need n >= -1")
    use_series = config.method == "series" or (config.method == "auto" and n < config.crossover)
    if use_series:
        value = _series(n, config)
    else:
        value, residue = _hybrid(n, config, residue)
    if config.verify:
        if n <= VERIFY_SERIES_LIMIT:
            other = _hybrid(n, config)[0] if use_series else _series(n, config)
        else:
            p = _next_prime_coprime(2 * config.M_min + 1, residue.modulus)
            other = hybrid_coefficient(n, coeff_mod(n, p).value, p)
        if other != value:
            raise VerificationError(f"c_{n}: independent computations disagree")
    return value


# -- search -------------------------------------------------------------------


def load_checkpoint(path: str) -> Dict[int, SearchRecord]:
    """Records already in ``path`` keyed by n; missing file means none."""
    done: Dict[int, SearchRecord] = {}
    if not os.path.exists(path):
        return done
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    rec = SearchRecord.from_json(line)
                except (ValueError, TypeError) as exc:
                    raise CheckpointError(f"{path}:{lineno}: corrupt record ({exc})") from None
                done[rec.n] = rec
    except (OSError, UnicodeDecodeError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from None
    return done


def _describe(n: int, value: int, started: float) -> SearchRecord:
    text = str(gmpy2.mpz(value))
    status = "probable_prime" if is_probable_prime(value) else "composite"
    return SearchRecord(
        n=n,
        status=status,
        digits=len(text),
        leading=text[:10],
        trailing=text[-10:],
        elapsed_ms=int((time.perf_counter() - started) * 1000),
    )


def _candidate_task(args) -> SearchRecord:
    n, value, modulus = args
    started = time.perf_counter()
    if n == -1 or n == 0:
        return _describe(n, compute_cn(n), started)
    c = hybrid_coefficient(n, value, modulus)
    return _describe(n, c, started)


def stage_one(n_lo: int, n_hi: int) -> Tuple[int, List[int]]:
    """(M, [c_n mod M for n in n_lo..n_hi]) with M = primorial(47), one pass."""
    modulus = primorial(SEARCH_PRIMORIAL_BOUND)
    series = j_series_mod(n_hi, modulus)
    return modulus, [series[n + 1] for n in range(n_lo, n_hi + 1)]


def search_primes(
    n_lo: int,
    n_hi: int,
    config: ComputeConfig = ComputeConfig(),
    checkpoint_path: Optional[str] = None,
) -> List[SearchRecord]:
    """Classify c_n for n_lo <= n <= n_hi as filtered, composite or probable prime.

    Records are appended to ``checkpoint_path`` (JSON Lines) as they finish;
    n already present there are skipped.  Returns all records sorted by n.
    """
    if n_lo < 0 or n_hi < n_lo:
        raise ValueError("need 0 <= n_lo <= n_hi")
    done = load_checkpoint(checkpoint_path) if checkpoint_path else {}
    t0 = time.perf_counter()
    modulus, residues = stage_one(n_lo, n_hi)
    log.info("stage 1: %d residues mod primorial(%d) in %.2fs", len(residues), SEARCH_PRIMORIAL_BOUND, time.perf_counter() - t0)

    records = dict(done)
    fresh: List[SearchRecord] = []
    candidates = []
    for n, r in zip(range(n_lo, n_hi + 1), residues):
        if n in done:
            continue
        if math.gcd(r, modulus) != 1:
            fresh.append(SearchRecord(n=n, status="filtered"))
        else:
            candidates.append((n, r, modulus))
    log.info("stage 2: %d candidates", len(candidates))

    sink = open(checkpoint_path, "a", encoding="utf-8") if checkpoint_path else None
    try:
        def emit(rec: SearchRecord) -> None:
            records[rec.n] = rec
            if sink:
                sink.write(rec.to_json() + "\n")
                sink.flush()

        for rec in fresh:
            emit(rec)
        for rec in _run_candidates(candidates, config.thread_count):
            log.info("n=%d: %s (%s digits)", rec.n, rec.status, rec.digits)
            emit(rec)
    finally:
        if sink:
            sink.close()
    return [records[n] for n in sorted(records) if n_lo <= n <= n_hi]


def _run_candidates(candidates, jobs: int) -> Iterable[SearchRecord]:
    if jobs <= 1 or len(candidates) <= 1:
        for task in candidates:
            yield _candidate_task(task)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(_candidate_task, candidates)
