"""Enumeration of candidate q = m + 1 with omega(m) = w and m < M, and the
screening pipeline that resolves each candidate.

The walk is the backtracking enumeration over sorted odd prime powers
(u, v) = (p^k, p): the power of two is fixed by an outer loop, odd prime
powers with pairwise distinct bases are multiplied in increasing order of
u, and a branch is abandoned once even the smallest completion
m_{d-1} * u^(w+1-d) reaches M.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Optional

from .criteria import FastSieve, best_worst_case_rhs
from .finite_field import FieldSpec, build_field
from .numtheory import factorization_from_primes, is_prime_power, primorial, sieve_primes
from .search import find_run

log = logging.getLogger(__name__)

SENTINEL = (math.inf, 0)


@dataclass
class EnumRecord:
    w: int
    M: int
    candidates: int = 0
    survivors: int = 0
    prime_tests: int = 0
    prime_power_tests: int = 0
    exceptions: list[int] = field(default_factory=list)

    def merge(self, other: "EnumRecord") -> "EnumRecord":
        if (self.w, self.M) != (other.w, other.M):
            raise ValueError("cannot merge records for different (w, M)")
        return EnumRecord(
            self.w,
            self.M,
            self.candidates + other.candidates,
            self.survivors + other.survivors,
            self.prime_tests + other.prime_tests,
            self.prime_power_tests + other.prime_power_tests,
            sorted(self.exceptions + other.exceptions),
        )

    def counts(self) -> tuple[int, int, int, int]:
        return self.candidates, self.survivors, self.prime_tests, self.prime_power_tests


def gen_tuples(L: int) -> list[tuple[float, int]]:
    """All (p^k, p), p odd prime, p^k <= L, sorted by p^k, then the sentinel."""
    out = []
    for p in sieve_primes(L + 1):
        p = int(p)
        if p == 2:
            continue
        u = p
        while u <= L:
            out.append((u, p))
            u *= p
    out.sort()
    out.append(SENTINEL)
    return out


def tuple_limit(w: int, M: int) -> int:
    return (M - 1) // primorial(w - 1)


def _walk(w: int, M: int, k: int, us: list, vs: list) -> Iterator[tuple[int, tuple[int, ...]]]:
    """Yield (m, odd bases) for m = 2^k * (w-1 odd prime powers), m < M."""
    m1 = 1 << k
    if w == 1:
        if m1 < M:
            yield m1, ()
        return
    idx = [0] * (w + 1)
    ms = [0] * (w + 1)
    bases = [0] * (w + 1)
    ms[1] = m1
    idx[2] = -1  # before the first tuple
    d = 2
    while d > 1:
        i = idx[d] + 1
        used = bases[2:d]
        while vs[i] in used:
            i += 1
        idx[d] = i
        u = us[i]
        if ms[d - 1] * u ** (w + 1 - d) >= M:
            d -= 1
            continue
        m = ms[d - 1] * u
        ms[d] = m
        bases[d] = vs[i]
        if d == w:
            yield m, tuple(bases[2:])
        else:
            d += 1
            idx[d] = i


def power_range(M: int) -> range:
    """Outer loop k = 1 .. floor(log2(M - 1))."""
    return range(1, (M - 1).bit_length())


def enumerate_candidates(w: int, M: int, visitor: Callable[[int], None]) -> int:
    """Call ``visitor(m)`` once for each even m < M with omega(m) = w."""
    if w < 1 or M < 4:
        raise ValueError("need w >= 1 and M >= 4")
    tuples = gen_tuples(max(tuple_limit(w, M), 0))
    us = [t[0] for t in tuples]
    vs = [t[1] for t in tuples]
    count = 0
    for k in power_range(M):
        for m, _ in _walk(w, M, k, us, vs):
            visitor(m)
            count += 1
    return count


@dataclass(frozen=True)
class PipelineConfig:
    n: int = 3
    criteria_first: bool = True
    use_mod4: bool = False
    search_method: str = "auto"


def run_unit(w: int, M: int, k: int, cfg: PipelineConfig = PipelineConfig()) -> EnumRecord:
    """Screen every candidate with the given power-of-two exponent k."""
    tuples = gen_tuples(max(tuple_limit(w, M), 0))
    us = [t[0] for t in tuples]
    vs = [t[1] for t in tuples]
    sieve = FastSieve(cfg.n, use_mod4=cfg.use_mod4)
    rec = EnumRecord(w, M)
    for m, bases in _walk(w, M, k, us, vs):
        rec.candidates += 1
        q = m + 1
        primes = (2,) + tuple(sorted(bases))
        if cfg.criteria_first:
            if sieve.guaranteed(q, primes):
                continue
            pk = is_prime_power(q)
        else:
            pk = is_prime_power(q)
            if pk is None or sieve.guaranteed(q, primes):
                continue
        rec.survivors += 1
        if pk is None:
            continue
        p, e = pk
        if e == 1:
            rec.prime_tests += 1
            spec = FieldSpec(p=q, k=1, q=q, modulus=None, q_minus_1=factorization_from_primes(m, primes))
        else:
            rec.prime_power_tests += 1
            spec = build_field(p, e)
        if cfg.n > p:
            continue
        if not find_run(spec, cfg.n, cfg.search_method).found:
            rec.exceptions.append(q)
    return rec


def sieve_bound_M(w: int, n: int = 3) -> int:
    """floor of the smallest sieve right-hand side for the first-w-primes worst case.

    Every q with omega(q-1) = w and q > this value is resolved by the sieve
    criterion, so candidates need m = q - 1 < M.
    """
    rhs, _ = best_worst_case_rhs(n, w)
    return rhs.numerator // rhs.denominator


class JournalError(RuntimeError):
    pass


class Journal:
    """Append-only JSONL checkpoint: one line per completed (w, k) unit."""

    def __init__(self, path: Optional[os.PathLike]):
        self.path = Path(path) if path else None
        self.done: dict[tuple, dict] = {}
        if self.path and self.path.exists():
            for line in self.path.read_text().splitlines():
                if not line.strip():
                    continue
                rec = json.loads(line)
                key = (rec["n"], rec["w"], rec["M"], rec["k"])
                if key in self.done and self.done[key] != rec:
                    raise JournalError(f"conflicting journal entries for unit {key}")
                self.done[key] = rec

    def get(self, n: int, w: int, M: int, k: int) -> Optional[EnumRecord]:
        rec = self.done.get((n, w, M, k))
        if rec is None:
            return None
        if _exc_hash(rec["exceptions"]) != rec["exceptions_sha256"]:
            raise JournalError(f"exception hash mismatch for unit {(n, w, M, k)}")
        return EnumRecord(
            w, M, rec["candidates"], rec["survivors"], rec["prime_tests"],
            rec["prime_power_tests"], list(rec["exceptions"]),
        )

    def add(self, n: int, k: int, unit: EnumRecord) -> None:
        rec = {"n": n, "k": k, **asdict(unit)}
        rec["exceptions_sha256"] = _exc_hash(unit.exceptions)
        key = (n, unit.w, unit.M, k)
        if key in self.done and self.done[key] != rec:
            raise JournalError(f"conflicting result for unit {key}")
        self.done[key] = rec
        if self.path:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")


def _exc_hash(exceptions: list[int]) -> str:
    return hashlib.sha256(",".join(map(str, sorted(exceptions))).encode()).hexdigest()


def _unit_task(args):
    w, M, k, cfg = args
    return k, run_unit(w, M, k, cfg)


def run_pipeline(
    n: int,
    w: int,
    M: Optional[int] = None,
    workers: int = 1,
    journal: Optional[Journal] = None,
    cfg: Optional[PipelineConfig] = None,
) -> EnumRecord:
    """Enumerate, screen and test every candidate for one value of w."""
    if M is None:
        M = sieve_bound_M(w, n)
    cfg = cfg or PipelineConfig(n=n)
    journal = journal or Journal(None)
    total = EnumRecord(w, M)
    todo = []
    for k in power_range(M):
        prev = journal.get(n, w, M, k)
        if prev is not None:
            total = total.merge(prev)
        else:
            todo.append((w, M, k, cfg))
    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_unit_task, todo)
            for k, unit in results:
                journal.add(n, k, unit)
                total = total.merge(unit)
    else:
        for task in todo:
            k, unit = _unit_task(task)
            journal.add(n, k, unit)
            total = total.merge(unit)
            log.debug("w=%d k=%d: %s", w, k, unit.counts())
    return total
