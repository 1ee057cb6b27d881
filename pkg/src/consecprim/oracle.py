"""Brute-force character-sum checks on small fields.

Characters are realised through a discrete-log table: for a generator g
and j in [0, q-1), chi_j(g^t) = exp(2 pi i j t / (q-1)), with chi_j(0) = 0.
chi_j has exact order (q-1)/gcd(j, q-1).

Everything here is exhaustive and meant for q up to a few thousand.
Window counts are exact integers; character sums are complex doubles and
compared with a 1e-6 tolerance.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .criteria import lower_bound_Nn
from .finite_field import FieldSpec, build_field
from .numtheory import factorize, multiplicative_stats, theta_of

ORACLE_LIMIT = 4000
TOL = 1e-6
_TENSOR_LIMIT = 4_000_000


@dataclass(frozen=True)
class DlogTable:
    spec: FieldSpec
    generator: int
    index: np.ndarray  # index[x] = discrete log of x; index[0] = -1

    @property
    def q(self) -> int:
        return self.spec.q


@dataclass(frozen=True)
class CharIndex:
    d: int
    j: int


def build_dlog(spec: FieldSpec) -> DlogTable:
    if spec.q > ORACLE_LIMIT:
        raise ValueError(f"q={spec.q} is above the oracle ceiling {ORACLE_LIMIT}")
    gen = spec.first_primitive()
    index = np.full(spec.q, -1, dtype=np.int64)
    x = 1
    for t in range(spec.q - 1):
        index[x] = t
        x = spec.mul(x, gen)
    return DlogTable(spec, gen, index)


def squarefree_divisors(primes: Iterable[int]) -> list[int]:
    ps = sorted(set(primes))
    return sorted(math.prod(c) for r in range(len(ps) + 1) for c in itertools.combinations(ps, r))


def characters_of_order(q: int, d: int) -> list[CharIndex]:
    """The phi(d) characters of exact order d."""
    if (q - 1) % d:
        raise ValueError(f"{d} does not divide q-1")
    step = (q - 1) // d
    return [CharIndex(d, step * t) for t in range(d) if math.gcd(t, d) == 1]


def squarefree_characters(q: int, primes: Iterable[int]) -> list[CharIndex]:
    """All characters whose order is a squarefree divisor built from ``primes``."""
    return [c for d in squarefree_divisors(primes) for c in characters_of_order(q, d)]


def char_matrix(table: DlogTable, chars: Sequence[CharIndex]) -> np.ndarray:
    """X[c, x] = chi_c(x) over the encoded field, chi(0) = 0."""
    q = table.q
    js = np.array([c.j for c in chars], dtype=np.int64)
    t = table.index
    phase = np.outer(js, np.where(t < 0, 0, t)) % (q - 1)
    X = np.exp(2j * np.pi * phase / (q - 1))
    X[:, t < 0] = 0
    return X


def shift_index(spec: FieldSpec, j: int) -> np.ndarray:
    """shift[g] = g + j for every encoded g."""
    g = np.arange(spec.q, dtype=np.int64)
    c = g % spec.p
    return g - c + (c + j) % spec.p


def s_sum(table: DlogTable, chars: Sequence[CharIndex]) -> complex:
    """sum over g of chi_1(g) chi_2(g+1) ... chi_n(g+n-1)."""
    n = len(chars)
    if n > table.spec.p:
        raise ValueError("n exceeds the characteristic")
    X = char_matrix(table, chars)
    prod = np.ones(table.q, dtype=complex)
    for k in range(n):
        prod *= X[k, shift_index(table.spec, k)]
    return complex(prod.sum())


def s_tensor(table: DlogTable, char_lists: Sequence[Sequence[CharIndex]]) -> np.ndarray:
    """S for every tuple (c_1, ..., c_n) with c_k drawn from char_lists[k]."""
    spec = table.spec
    Xs = [char_matrix(table, cl)[:, shift_index(spec, k)] for k, cl in enumerate(char_lists)]
    Y = Xs[0]
    for X in Xs[1:-1]:
        Y = (Y[:, None, :] * X[None, :, :]).reshape(-1, spec.q)
    S = Y @ Xs[-1].T
    return S.reshape([len(cl) for cl in char_lists])


def _weights(chars: Sequence[CharIndex]) -> np.ndarray:
    out = []
    for c in chars:
        st = multiplicative_stats(factorize(c.d))
        out.append(st.mu / st.phi)
    return np.array(out)


def e_free_table(spec: FieldSpec, e_primes: Iterable[int]) -> np.ndarray:
    primes = set(e_primes)
    return np.array([spec.is_e_free(g, primes) for g in range(spec.q)], dtype=bool)


def count_windows(spec: FieldSpec, free: Sequence[np.ndarray]) -> int:
    """Number of g with g+k-1 in free[k-1] for all k."""
    ok = np.ones(spec.q, dtype=bool)
    for k, f in enumerate(free):
        ok &= f[shift_index(spec, k)]
    return int(ok.sum())


def n_direct(spec: FieldSpec, e_sets: Sequence[Iterable[int]]) -> int:
    """N(e_1, ..., e_n) by exhaustion with the power-test definition of e-free."""
    if len(e_sets) > spec.p:
        raise ValueError("n exceeds the characteristic")
    return count_windows(spec, [e_free_table(spec, e) for e in e_sets])


def n_via_characters(table: DlogTable, e_sets: Sequence[Iterable[int]]) -> float:
    """N(e_1, ..., e_n) from the Moebius-weighted sum of character sums S."""
    q = table.q
    sets = [set(e) for e in e_sets]
    char_lists = [squarefree_characters(q, e) for e in sets]
    theta = math.prod(float(theta_of(e)) for e in sets)
    ws = [_weights(cl) for cl in char_lists]
    if math.prod(len(cl) for cl in char_lists[:-1]) * q <= _TENSOR_LIMIT:
        S = s_tensor(table, char_lists)
        total = S
        for w in reversed(ws):
            total = total @ w
        return float(theta * complex(total).real)
    # too many tuples to hold at once: sum over the last slot for each prefix tuple
    total = 0j
    for prefix in itertools.product(*[range(len(cl)) for cl in char_lists[:-1]]):
        wp = math.prod(ws[k][i] for k, i in enumerate(prefix))
        if wp == 0:
            continue
        head = [[char_lists[k][i]] for k, i in enumerate(prefix)]
        S = s_tensor(table, head + [char_lists[-1]]).reshape(-1)
        total += wp * (S @ ws[-1])
    return float(theta * total.real)


def _parity_classes(chars: Sequence[CharIndex]) -> np.ndarray:
    return np.array([c.d % 2 == 0 for c in chars])


def parity_partial_sum(table: DlogTable, n: int, e: Iterable[int]) -> complex:
    """Part of the N_n(e) character expansion from tuples with an odd number of even orders."""
    e = set(e)
    chars = squarefree_characters(table.q, e)
    w = _weights(chars)
    even = _parity_classes(chars)
    spec = table.spec
    X = char_matrix(table, chars)
    # per slot and parity class: sum_c w_c chi_c(g + k)
    parts = []
    for k in range(n):
        Xk = X[:, shift_index(spec, k)]
        parts.append(((w * even) @ Xk, (w * ~even) @ Xk))
    total = 0j
    for pattern in itertools.product((0, 1), repeat=n):
        if sum(pattern) % 2 == 1:  # pattern[k] = 1 marks an even order at slot k
            prod = np.ones(table.q, dtype=complex)
            for k, bit in enumerate(pattern):
                prod *= parts[k][0] if bit else parts[k][1]
            total += prod.sum()
    return total


def verify_parity_cancellation(table: DlogTable, n: int, e: Iterable[int]) -> bool:
    e = set(e)
    if table.q % 4 != 3:
        raise ValueError("parity cancellation needs q = 3 mod 4")
    if 2 not in e:
        raise ValueError("parity cancellation needs an even e")
    return abs(parity_partial_sum(table, n, e)) < TOL


def _slot_sets(e: set, l: int, j: int, n: int) -> list[set]:
    return [e | {l} if k == j else set(e) for k in range(1, n + 1)]


def verify_lemma4(table: DlogTable, n: int, e: Iterable[int], l: int, j: int) -> bool:
    """|N(e,..,le at slot j,..,e) - theta(l) N_n(e)| <= (1-1/l) theta(e)^n (n-1) W(e)^n sqrt(q)."""
    e = set(e)
    spec = table.spec
    q = spec.q
    if (q - 1) % l or l in e:
        raise ValueError("l must divide q-1 and lie outside e")
    lhs = abs(n_direct(spec, _slot_sets(e, l, j, n)) - Fraction(l - 1, l) * n_direct(spec, [e] * n))
    bound = (1 - 1 / l) * float(theta_of(e)) ** n * (n - 1) * 2 ** (n * len(e)) * math.sqrt(q)
    return float(lhs) <= bound + TOL


def sieve_inequality_sides(spec: FieldSpec, n: int, kept: Iterable[int]) -> tuple[int, int]:
    """(N_n(q-1), sum_j sum_i N(p_i at slot j) - (ns-1) N_n(e)) as exact integers."""
    kept = set(kept)
    all_primes = set(spec.q_minus_1.primes)
    if not kept <= all_primes:
        raise ValueError("kept primes must divide q-1")
    sieved = sorted(all_primes - kept)
    s = len(sieved)
    tables = {}

    def free(primes: frozenset) -> np.ndarray:
        if primes not in tables:
            tables[primes] = e_free_table(spec, primes)
        return tables[primes]

    full = count_windows(spec, [free(frozenset(all_primes))] * n)
    base = count_windows(spec, [free(frozenset(kept))] * n)
    total = 0
    for p in sieved:
        for j in range(n):
            slots = [free(frozenset(kept | {p})) if k == j else free(frozenset(kept)) for k in range(n)]
            total += count_windows(spec, slots)
    return full, total - (n * s - 1) * base


def verify_sieve_inequality(spec: FieldSpec, n: int, kept: Iterable[int]) -> bool:
    lhs, rhs = sieve_inequality_sides(spec, n, kept)
    return lhs >= rhs


def weil_check(table: DlogTable, n: int, max_tuples: Optional[int] = None, seed: int = 0) -> list[str]:
    """Check S = q - n at the principal tuple and |S| <= (n-1) sqrt q elsewhere.

    All tuples of squarefree-order characters are checked when there are at
    most ``max_tuples`` of them; otherwise a seeded random sample of that size
    plus the principal tuple.
    """
    q = table.q
    chars = squarefree_characters(q, table.spec.q_minus_1.primes)
    R = len(chars)
    bound = (n - 1) * math.sqrt(q) + TOL
    failures = []
    if max_tuples is None or R**n <= max_tuples:
        # chunk over the first slot to bound memory
        rest = [chars] * (n - 1)
        for a, ca in enumerate(chars):
            S = s_tensor(table, [[ca]] + rest).reshape(-1)
            if a == 0:
                principal = S[0]
                S = S[1:]
            if np.abs(S).max(initial=0) > bound:
                failures.append(f"q={q} n={n}: Weil bound exceeded at first index {a}")
    else:
        rng = np.random.default_rng(seed)
        principal = s_sum(table, [chars[0]] * n)
        for _ in range(max_tuples):
            pick = rng.integers(0, R, size=n)
            if not pick.any():
                continue
            if abs(s_sum(table, [chars[i] for i in pick])) > bound:
                failures.append(f"q={q} n={n}: Weil bound exceeded at {pick.tolist()}")
    if abs(principal - (q - n)) > TOL:
        failures.append(f"q={q} n={n}: principal sum {principal} != {q - n}")
    return failures


def field_report(spec: FieldSpec, n: int = 3) -> dict:
    """Run every oracle check on one field; returns {q, checks_run, failures}."""
    table = build_dlog(spec)
    q = spec.q
    primes = list(spec.q_minus_1.primes)
    subsets = [frozenset(c) for r in range(len(primes) + 1) for c in itertools.combinations(primes, r)]
    failures: list[str] = []
    checks = 0

    # characters: phi(d) of exact order d for each squarefree d
    for d in squarefree_divisors(primes):
        cs = characters_of_order(q, d)
        checks += 1
        if len(cs) != multiplicative_stats(factorize(d)).phi or any(
            (q - 1) // math.gcd(c.j, q - 1) != d for c in cs
        ):
            failures.append(f"q={q}: wrong character count or order for d={d}")

    # one pass over S(chi_1, ..., chi_n) for all squarefree-order tuples:
    # the Weil bound per tuple, and the weighted sums for every e-combination
    chars = squarefree_characters(q, primes)
    S_rest = [chars] * (n - 1)
    wall = _weights(chars)
    masks = np.array([[c.d in set(squarefree_divisors(e)) for c in chars] for e in subsets])
    W = masks * wall  # weight row per subset
    bound = (n - 1) * math.sqrt(q) + TOL
    acc = np.zeros([len(subsets)] * n, dtype=complex)
    checks += 1
    for a, ca in enumerate(chars):
        S = s_tensor(table, [[ca]] + S_rest)[0]
        flat = S.reshape(-1)
        if a == 0:
            if abs(flat[0] - (q - n)) > TOL:
                failures.append(f"q={q}: principal sum {flat[0]} != {q - n}")
            flat = flat[1:]
        if np.abs(flat).max(initial=0) > bound:
            failures.append(f"q={q} n={n}: Weil bound exceeded with first character index {a}")
        term = S
        for _ in range(n - 1):
            term = np.tensordot(term, W, axes=([0], [1]))
        acc += np.multiply.outer(W[:, a], term)
    free = {e: e_free_table(spec, e) for e in subsets}
    thetas = {e: float(theta_of(e)) for e in subsets}
    for combo in itertools.product(range(len(subsets)), repeat=n):
        es = [subsets[i] for i in combo]
        direct = count_windows(spec, [free[e] for e in es])
        via = math.prod(thetas[e] for e in es) * acc[combo].real
        checks += 1
        if abs(direct - via) >= TOL:
            failures.append(f"q={q}: character expansion disagrees with direct count for {[sorted(e) for e in es]}: {direct} vs {via}")

    for e in subsets:
        nn_e = count_windows(spec, [free[e]] * n)
        checks += 1
        if nn_e < lower_bound_Nn(n, q, e):
            failures.append(f"q={q}: N_n lower bound fails for e={sorted(e)}")
        if q % 4 == 3 and 2 in e:
            checks += 1
            if not verify_parity_cancellation(table, n, e):
                failures.append(f"q={q}: parity cancellation fails for e={sorted(e)}")
        for l in primes:
            if l in e:
                continue
            for j in range(1, n + 1):
                checks += 1
                if not verify_lemma4(table, n, e, l, j):
                    failures.append(f"q={q}: slot refinement bound fails for e={sorted(e)} l={l} j={j}")
        checks += 1
        if not verify_sieve_inequality(spec, n, e):
            failures.append(f"q={q}: sieve inequality fails for kept={sorted(e)}")
    return {"q": q, "checks_run": checks, "failures": failures}


def oracle_sweep(q_max: int = 200, n: int = 3) -> list[dict]:
    from .search import odd_prime_powers

    return [field_report(build_field(p, k), n) for q, p, k in odd_prime_powers(3, q_max, min_char=n)]
