"""Command-line entry point: every verification as a batch command.

Exit codes: 0 success, 1 mathematical mismatch with the reference data,
2 operational error (bad arguments, journal conflicts, I/O).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional, TextIO

from . import __version__, reference_data
from .bounds import Table1Row, render_csv, render_latex, table1
from .criteria import any_criterion
from .enumerator import EnumRecord, Journal, JournalError, PipelineConfig, sieve_bound_M, run_pipeline
from .finite_field import field_from_q
from .numtheory import factorize
from .oracle import oracle_sweep
from .search import find_run, scan_records, write_jsonl

JOURNAL_DIR_ENV = "CONSECPRIM_JOURNAL_DIR"
OUTPUT_DIR_ENV = "CONSECPRIM_OUTPUT_DIR"

EXIT_OK, EXIT_MISMATCH, EXIT_ERROR = 0, 1, 2

log = logging.getLogger("consecprim")


class UsageError(Exception):
    pass


def _resolve_out(path: Optional[str]) -> Optional[Path]:
    if path is None:
        return None
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


@contextmanager
def _output(path: Optional[str]) -> Iterator[TextIO]:
    p = _resolve_out(path)
    if p is None:
        yield sys.stdout
        return
    with p.open("w", encoding="utf-8", newline="") as fh:
        yield fh


def _emit(text: str, path: Optional[str]) -> None:
    with _output(path) as fh:
        fh.write(text if text.endswith("\n") else text + "\n")


# -- theorem1 ------------------------------------------------------------


def cmd_theorem1(args) -> int:
    if args.q_max < 169:
        raise UsageError("--q-max must be at least 169")
    records = scan_records(3, 3, args.q_max, workers=args.workers)
    found = [r["q"] for r in records if not r["found"]]
    if args.format == "jsonl":
        with _output(args.out) as fh:
            write_jsonl(records, fh, 3)
    else:
        _emit("q\n" + "\n".join(map(str, found)), args.out)
    expected = list(reference_data.N3_EXCEPTIONS)
    if found != expected:
        _report_diff("n=3 exceptions", expected, found)
        return EXIT_MISMATCH
    return EXIT_OK


def _report_diff(what: str, expected, found) -> None:
    e, f = set(expected), set(found)
    print(f"MISMATCH in {what}", file=sys.stderr)
    print(f"  expected but not found: {sorted(e - f)}", file=sys.stderr)
    print(f"  found but not expected: {sorted(f - e)}", file=sys.stderr)


# -- table1 --------------------------------------------------------------


def _table1_matches(row: Table1Row) -> bool:
    ref = reference_data.RANGE_BOUNDS.get(row.n)
    if ref is None:
        return True
    omega, mant, expo = ref
    return row.omega_bound == omega and row.q0_exponent == expo and abs(row.q0_mantissa - mant) <= 0.005 * mant


def cmd_table1(args) -> int:
    if args.n_min < 3 or args.n_max < args.n_min:
        raise UsageError("need 3 <= n-min <= n-max")
    rows = table1(range(args.n_min, args.n_max + 1))
    _emit(render_latex(rows) if args.format == "latex" else render_csv(rows), args.out)
    bad = [r.n for r in rows if not _table1_matches(r)]
    if bad:
        print(f"MISMATCH in range table for n = {bad}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


# -- table2 --------------------------------------------------------------


def _journal_path(args) -> Optional[str]:
    if args.journal:
        return args.journal
    base = os.environ.get(JOURNAL_DIR_ENV)
    if base:
        Path(base).mkdir(parents=True, exist_ok=True)
        return str(Path(base) / f"table2_n{args.n}.jsonl")
    return None


def _table2_csv(rows: list[EnumRecord]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["w", "M", "candidates", "survivors", "prime_tests", "prime_power_tests", "exceptions"])
    for r in rows:
        wr.writerow([r.w, r.M, *r.counts(), " ".join(map(str, r.exceptions))])
    return buf.getvalue()


def cmd_table2(args) -> int:
    if not args.w or any(not 1 <= w <= 13 for w in args.w):
        raise UsageError("w values must lie in 1..13")
    journal = Journal(_journal_path(args))
    cfg = PipelineConfig(n=args.n, use_mod4=args.mod4)
    rows = []
    mismatch = []
    for w in args.w:
        M = reference_data.N3_SEARCH_COUNTS[w][0] if args.published_M else sieve_bound_M(w, args.n)
        t0 = time.perf_counter()
        rec = run_pipeline(args.n, w, M, workers=args.workers, journal=journal, cfg=cfg)
        log.info("w=%d done in %.1f s", w, time.perf_counter() - t0)
        rows.append(rec)
        if args.published_M and args.n == 3 and not args.mod4 and rec.counts() != reference_data.N3_SEARCH_COUNTS[w][1:]:
            mismatch.append((w, reference_data.N3_SEARCH_COUNTS[w][1:], rec.counts()))
    if args.format == "jsonl":
        _emit("\n".join(json.dumps({"n": args.n, **r.__dict__}) for r in rows), args.out)
    else:
        _emit(_table2_csv(rows), args.out)
    for w, want, got in mismatch:
        print(f"MISMATCH at w={w}: expected {want}, got {got}", file=sys.stderr)
    return EXIT_MISMATCH if mismatch else EXIT_OK


# -- conjectures ---------------------------------------------------------


def cmd_conjectures(args) -> int:
    n = args.n
    if not 4 <= n <= 8:
        raise UsageError("n must lie in 4..8")
    records = scan_records(n, args.q_min, args.q_max, workers=args.workers)
    found = [r["q"] for r in records if not r["found"]]
    if args.format == "csv":
        _emit("q\n" + "\n".join(map(str, found)), args.out)
    else:
        with _output(args.out) as fh:
            write_jsonl([r for r in records if args.all_records or not r["found"]], fh, n)
    news = "this would contradict the published computations and be worth reporting"
    if n in reference_data.EXCEPTION_LISTS:
        expected = [q for q in reference_data.EXCEPTION_LISTS[n] if args.q_min <= q <= args.q_max]
        if found != expected:
            _report_diff(f"n={n} exceptions", expected, found)
            print(f"  ({news})", file=sys.stderr)
            return EXIT_MISMATCH
        return EXIT_OK
    last = reference_data.LAST_EXCEPTION[n]
    if args.q_max >= last and args.q_min <= last:
        got = found[-1] if found else None
        if got != last:
            print(f"MISMATCH for n={n}: last exception {got}, expected {last} ({news})", file=sys.stderr)
            return EXIT_MISMATCH
    else:
        print(f"note: range does not reach the reference last exception {last}", file=sys.stderr)
    return EXIT_OK


# -- oracle --------------------------------------------------------------


def cmd_oracle(args) -> int:
    t0 = time.perf_counter()
    reports = oracle_sweep(args.q_max, args.n)
    failures = [f for r in reports for f in r["failures"]]
    summary = {
        "q_max": args.q_max,
        "n": args.n,
        "fields": len(reports),
        "checks_run": sum(r["checks_run"] for r in reports),
        "failures": failures,
        "seconds": round(time.perf_counter() - t0, 3),
    }
    _emit(json.dumps(summary), args.out)
    return EXIT_MISMATCH if failures else EXIT_OK


# -- ad-hoc queries ------------------------------------------------------


def cmd_search(args) -> int:
    spec = field_from_q(args.q)
    res = find_run(spec, args.n, args.method)
    rec = {"q": spec.q, "p": spec.p, "k": spec.k, "n": args.n, "found": res.found, "witness": res.witness}
    if res.found:
        rec["window"] = res.window(spec)
    _emit(json.dumps(rec), args.out)
    return EXIT_OK


def cmd_criteria(args) -> int:
    out = any_criterion(args.n, args.q, factorize(args.q - 1))
    rec = json.loads(out.to_json())
    rec = {"q": args.q, "n": args.n, **rec}
    _emit(json.dumps(rec), args.out)
    return EXIT_OK


def cmd_factor(args) -> int:
    f = factorize(args.m)
    rec = {"m": f.value, "factors": [[p, e] for p, e in f.factors], "omega": f.omega}
    _emit(json.dumps(rec), args.out)
    return EXIT_OK


# -- parser --------------------------------------------------------------


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="consecprim", description="Consecutive primitive elements in finite fields.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, formats, default):
        p.add_argument("--out", help=f"output file (relative paths resolve under ${OUTPUT_DIR_ENV})")
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("--workers", type=_positive, default=os.cpu_count() or 1)

    p = sub.add_parser("theorem1", help="all q with no 3 consecutive primitives")
    p.add_argument("--q-max", type=int, default=3000)
    common(p, ["csv", "jsonl"], "csv")
    p.set_defaults(func=cmd_theorem1)

    p = sub.add_parser("table1", help="omega and q bounds for 3 <= n <= 10")
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=10)
    common(p, ["csv", "latex"], "csv")
    p.add_argument("--latex", dest="format", action="store_const", const="latex")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("table2", help="enumerate and test candidates for given omega(q-1)")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--w", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--published-M", dest="published_M", action="store_true", default=True)
    p.add_argument("--no-published-M", dest="published_M", action="store_false", help="recompute M from the bound")
    p.add_argument("--mod4", action="store_true", help="also screen with the q = 3 mod 4 variant")
    p.add_argument("--journal", help=f"checkpoint file (default under ${JOURNAL_DIR_ENV})")
    common(p, ["csv", "jsonl"], "csv")
    p.set_defaults(func=cmd_table2)

    p = sub.add_parser("conjectures", help="scan for fields without n consecutive primitives")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q-min", type=int, default=3)
    p.add_argument("--q-max", type=int, required=True)
    p.add_argument("--all-records", action="store_true", help="emit every field, not only exceptions")
    common(p, ["jsonl", "csv"], "jsonl")
    p.set_defaults(func=cmd_conjectures)

    p = sub.add_parser("oracle", help="character-sum cross-checks over small fields")
    p.add_argument("--q-max", type=int, default=200)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("search", help="look for n consecutive primitives in one field")
    p.add_argument("q", type=int)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--method", choices=["auto", "bitmap", "stream"], default="auto")
    p.add_argument("--out")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("criteria", help="evaluate the sufficiency criteria for one q")
    p.add_argument("q", type=int)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_criteria)

    p = sub.add_parser("factor", help="factor an integer")
    p.add_argument("m", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_factor)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    try:
        return args.func(args)
    except (UsageError, ValueError, OverflowError, JournalError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
