import json

import numpy as np
import pytest

from consecprim import reference_data
from consecprim.criteria import FastSieve
from consecprim.enumerator import (
    SENTINEL,
    EnumRecord,
    Journal,
    JournalError,
    PipelineConfig,
    enumerate_candidates,
    gen_tuples,
    sieve_bound_M,
    run_pipeline,
    run_unit,
)
from consecprim.numtheory import factorize, is_prime, omega_table


def test_gen_tuples():
    assert gen_tuples(10) == [(3, 3), (5, 5), (7, 7), (9, 3), SENTINEL]
    assert gen_tuples(3) == [(3, 3), SENTINEL]
    t = gen_tuples(27)
    assert t.index((25, 5)) < t.index((27, 3))


def test_small_rows():
    seen = []
    assert enumerate_candidates(1, 256, seen.append) == 7
    assert sorted(seen) == [2, 4, 8, 16, 32, 64, 128]
    assert enumerate_candidates(2, 16384, lambda m: None) == 2425
    with pytest.raises(ValueError):
        enumerate_candidates(0, 100, lambda m: None)


def test_enumeration_complete_and_unique():
    M = 10**6
    om = omega_table(M)
    even = np.arange(0, M, 2)
    for w in range(1, 8):
        visited = []
        enumerate_candidates(w, M, visited.append)
        assert len(visited) == len(set(visited))
        truth = set(int(m) for m in even[om[even] == w] if m > 0)
        assert set(visited) == truth, w


def test_row3_count():
    assert enumerate_candidates(3, 802816, lambda m: None) == 172827


def test_published_M_values():
    for w, row in reference_data.N3_SEARCH_COUNTS.items():
        assert sieve_bound_M(w) == row[0]


@pytest.mark.parametrize("w", [1, 2, 3])
def test_pipeline_rows(w):
    M, *counts = reference_data.N3_SEARCH_COUNTS[w]
    rec = run_pipeline(3, w, M, workers=1)
    assert rec.counts() == tuple(counts)
    assert set(rec.exceptions) <= set(reference_data.N3_EXCEPTIONS)


def test_pipeline_exceptions_small_q():
    found = []
    for w in range(1, 6):
        M = min(reference_data.N3_SEARCH_COUNTS[w][0], 3000)
        found += run_pipeline(3, w, M).exceptions
    assert sorted(found) == list(reference_data.N3_EXCEPTIONS)


def test_prime_tests_match_direct_sweep():
    cap = 10**6
    total = 0
    for w in range(1, 8):
        M = min(reference_data.N3_SEARCH_COUNTS[w][0], cap)
        total += run_pipeline(3, w, M).prime_tests
    sieve = FastSieve(3)
    direct = 0
    for q in range(3, cap + 1, 2):
        if not is_prime(q):
            continue
        f = factorize(q - 1)
        if q - 1 < min(reference_data.N3_SEARCH_COUNTS[f.omega][0], cap) and not sieve.guaranteed(q, f.primes):
            direct += 1
    assert total == direct


def test_criteria_order_does_not_change_result():
    a = run_pipeline(3, 2, 16384)
    b = run_pipeline(3, 2, 16384, cfg=PipelineConfig(n=3, criteria_first=False))
    assert a.exceptions == b.exceptions and a.prime_tests == b.prime_tests


def test_merge():
    a = EnumRecord(2, 100, 1, 1, 1, 0, [7])
    b = EnumRecord(2, 100, 2, 1, 0, 1, [3])
    assert a.merge(b) == EnumRecord(2, 100, 3, 2, 1, 1, [3, 7])
    with pytest.raises(ValueError):
        a.merge(EnumRecord(3, 100))


def test_parallel_matches_serial():
    assert run_pipeline(3, 2, 16384, workers=2) == run_pipeline(3, 2, 16384, workers=1)


def test_journal_resume(tmp_path):
    path = tmp_path / "j.jsonl"
    full = run_pipeline(3, 2, 16384, journal=Journal(path))
    lines = path.read_text().splitlines()
    assert len(lines) == 13  # k = 1..13
    # drop half the units and resume: same totals, no double counting
    path.write_text("\n".join(lines[:6]) + "\n")
    again = run_pipeline(3, 2, 16384, journal=Journal(path))
    assert again == full
    assert len(path.read_text().splitlines()) == 13
    # a finished journal is reused without recomputation
    j = Journal(path)
    assert run_pipeline(3, 2, 16384, journal=j) == full
    assert len(path.read_text().splitlines()) == 13


def test_journal_conflict(tmp_path):
    path = tmp_path / "j.jsonl"
    run_pipeline(3, 1, 256, journal=Journal(path))
    rec = json.loads(path.read_text().splitlines()[0])
    rec["candidates"] += 1
    with path.open("a") as fh:
        fh.write(json.dumps(rec) + "\n")
    with pytest.raises(JournalError):
        Journal(path)


def test_journal_hash_check(tmp_path):
    path = tmp_path / "j.jsonl"
    run_pipeline(3, 1, 256, journal=Journal(path))
    lines = [json.loads(x) for x in path.read_text().splitlines()]
    for rec in lines:
        if rec["exceptions"]:
            rec["exceptions"] = rec["exceptions"] + [999]
    path.write_text("".join(json.dumps(r) + "\n" for r in lines))
    with pytest.raises(JournalError):
        run_pipeline(3, 1, 256, journal=Journal(path))


def test_unit_partition():
    # the k units partition the candidates
    total = sum(run_unit(2, 16384, k).candidates for k in range(1, 14))
    assert total == 2425
