"""Direct search for n consecutive primitive elements, and exception scans."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, TextIO

import numpy as np

from .finite_field import FieldSpec, build_field, primitive_bitmap
from .numtheory import sieve_primes

log = logging.getLogger(__name__)

#: fields up to this size are searched with a precomputed primitivity bitmap
BITMAP_LIMIT = 1 << 16


@dataclass(frozen=True)
class RunResult:
    q: int
    n: int
    found: bool
    witness: Optional[int] = None

    def window(self, spec: FieldSpec) -> list[int]:
        """The n elements g, g+1, ..., g+n-1 of the witness window."""
        if self.witness is None:
            return []
        return [spec.add_int(self.witness, j) for j in range(self.n)]


def _check_n(spec: FieldSpec, n: int) -> None:
    if n < 3:
        raise ValueError("runs shorter than 3 are not supported")
    if n > spec.p:
        raise ValueError(f"n={n} exceeds the characteristic {spec.p}; window elements would repeat")


def _bitmap_witness(spec: FieldSpec, n: int) -> Optional[int]:
    prim = primitive_bitmap(spec).reshape(spec.q // spec.p, spec.p)
    ok = prim.copy()
    for j in range(1, n):
        ok &= np.roll(prim, -j, axis=1)
    flat = ok.ravel()
    idx = int(np.argmax(flat))
    return idx if flat[idx] else None


def _stream_witness(spec: FieldSpec, n: int) -> Optional[int]:
    p = spec.p
    is_prim = spec.is_primitive
    for base in range(0, spec.q, p):
        head: list[bool] = []
        run = 0
        for t in range(p + n - 1):
            if t < p:
                v = is_prim(base + t)
                if t < n - 1:
                    head.append(v)
            else:
                v = head[t - p]
            if v:
                run += 1
                if run >= n:
                    return base + (t - n + 1) % p
            else:
                run = 0
    return None


def find_run(spec: FieldSpec, n: int, method: str = "auto") -> RunResult:
    """First g in odometer order with g, g+1, ..., g+n-1 all primitive.

    ``method`` is "bitmap", "stream" or "auto" (bitmap when q <= BITMAP_LIMIT).
    """
    _check_n(spec, n)
    if method == "auto":
        method = "bitmap" if spec.q <= BITMAP_LIMIT else "stream"
    if method == "bitmap":
        w = _bitmap_witness(spec, n)
    elif method == "stream":
        w = _stream_witness(spec, n)
    else:
        raise ValueError(f"unknown search method {method!r}")
    return RunResult(spec.q, n, w is not None, w)


def odd_prime_powers(q_min: int, q_max: int, min_char: int = 3) -> Iterator[tuple[int, int, int]]:
    """(q, p, k) for odd prime powers q in [q_min, q_max], sorted by q."""
    out = []
    for p in sieve_primes(q_max + 1):
        p = int(p)
        if p < max(3, min_char):
            continue
        q, k = p, 1
        while q <= q_max:
            if q >= q_min:
                out.append((q, p, k))
            q *= p
            k += 1
    out.sort()
    return iter(out)


def _scan_chunk(args: tuple[int, int, int]) -> list[dict]:
    n, lo, hi = args
    records = []
    for q, p, k in odd_prime_powers(lo, hi, min_char=n):
        res = find_run(build_field(p, k), n)
        records.append({"q": q, "p": p, "k": k, "found": res.found, "witness": res.witness})
    return records


def scan_records(
    n: int,
    q_min: int,
    q_max: int,
    workers: int = 1,
    chunk: int = 20000,
    progress: Optional[Callable[[int, int], None]] = None,
) -> list[dict]:
    """Per-field records for every odd prime power in range with characteristic >= n."""
    if q_max < q_min or q_min < 3:
        raise ValueError("need q_max >= q_min >= 3")
    bounds = [(n, lo, min(lo + chunk - 1, q_max)) for lo in range(q_min, q_max + 1, chunk)]
    records: list[dict] = []
    if workers <= 1:
        parts = map(_scan_chunk, bounds)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        parts = pool.map(_scan_chunk, bounds)
    try:
        for (_, lo, hi), part in zip(bounds, parts):
            records.extend(part)
            log.info("n=%d scanned q in [%d, %d]: %d fields", n, lo, hi, len(part))
            if progress is not None:
                progress(hi, len(records))
    finally:
        if workers > 1:
            pool.shutdown()
    records.sort(key=lambda r: r["q"])
    return records


def scan_exceptions(n: int, q_min: int, q_max: int, workers: int = 1, **kw) -> list[int]:
    """Odd prime powers q in range, characteristic >= n, with no run of n primitives."""
    return [r["q"] for r in scan_records(n, q_min, q_max, workers=workers, **kw) if not r["found"]]


def write_jsonl(records: list[dict], out: TextIO, n: int) -> None:
    for r in records:
        out.write(json.dumps(r) + "\n")
    summary = {
        "summary": True,
        "n": n,
        "fields": len(records),
        "exceptions": [r["q"] for r in records if not r["found"]],
    }
    out.write(json.dumps(summary) + "\n")
