"""Exact integer number theory.

Deterministic factorization (trial division, then Miller-Rabin/BPSW, then a
Brent rho splitter with a fixed increment schedule), prime-power detection,
primorials and the multiplicative functions omega, W, theta, Rad, mu, phi.

Factorization is supported up to ``FACTOR_LIMIT`` (2**96).  Primorials and
the other helpers work on arbitrary-size integers.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

FACTOR_LIMIT = 1 << 96

#: environment key overriding the size of the shared prime table
PRIME_LIMIT_ENV = "CONSECPRIM_PRIME_LIMIT"
DEFAULT_PRIME_LIMIT = 10**7

_TRIAL_BOUND = 1000
_MR_BASES_64 = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_table_lock = threading.Lock()
_prime_table: Optional[np.ndarray] = None


def sieve_primes(limit: int) -> np.ndarray:
    """All primes strictly below ``limit`` as an int64 array."""
    if limit <= 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit - 1) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def prime_table() -> np.ndarray:
    """Shared table of primes below the configured limit, built once."""
    global _prime_table
    if _prime_table is None:
        with _table_lock:
            if _prime_table is None:
                limit = int(os.environ.get(PRIME_LIMIT_ENV, DEFAULT_PRIME_LIMIT))
                table = sieve_primes(limit)
                table.setflags(write=False)
                _prime_table = table
    return _prime_table


def first_primes(m: int) -> list[int]:
    """The first ``m`` primes, in increasing order."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    table = prime_table()
    if m <= len(table):
        return [int(p) for p in table[:m]]
    # table too small; keep extending by trial primality
    out = [int(p) for p in table]
    c = out[-1] + 2 if out else 2
    while len(out) < m:
        if is_prime(c):
            out.append(c)
        c += 1 if c == 2 else 2
    return out


_SMALL_PRIMES = [int(p) for p in sieve_primes(_TRIAL_BOUND)]


def _strong_probable_prime(n: int, a: int) -> bool:
    d = n - 1
    r = (d & -d).bit_length() - 1
    d >>= r
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _strong_lucas_probable_prime(n: int) -> bool:
    if math.isqrt(n) ** 2 == n:
        return False
    # Selfridge parameters: first D in 5, -7, 9, -11, ... with (D/n) = -1
    D = 5
    while True:
        j = _jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    P, Q = 1, (1 - D) // 4
    d = n + 1
    s = (d & -d).bit_length() - 1
    d >>= s
    U, V, Qk = 1, P, Q % n
    inv2 = (n + 1) // 2
    for bit in bin(d)[3:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = (P * U + V) * inv2 % n, (D * U + P * V) * inv2 % n
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if V == 0:
            return True
    return False


def is_prime(n: int) -> bool:
    """Deterministic primality verdict.

    Below 2**64 the fixed witness set of the first twelve primes is a proof.
    Above that the same strong tests are combined with a strong Lucas test
    (Baillie-PSW), for which no counterexample is known.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < _TRIAL_BOUND * _TRIAL_BOUND:
        return True
    if not all(_strong_probable_prime(n, a) for a in _MR_BASES_64):
        return False
    if n < 1 << 64:
        return True
    return _strong_lucas_probable_prime(n)


def _brent_split(n: int) -> int:
    """A nontrivial factor of the odd composite ``n``.

    The polynomial increment runs through c = 1, 2, 3, ... with starting
    point 2, so every run produces the same splitting sequence.
    """
    c = 1
    while True:
        y, r, prod, g = 2, 1, 1, 1
        batch = 128
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(batch, r - k)):
                    y = (y * y + c) % n
                    prod = prod * abs(x - y) % n
                g = math.gcd(prod, n)
                k += batch
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
        c += 1


def _factor_into(n: int, out: dict[int, int]) -> None:
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        root = math.isqrt(m)
        if root * root == m:
            stack.extend((root, root))
            continue
        d = _brent_split(m)
        stack.extend((d, m // d))


@dataclass(frozen=True)
class Factorization:
    """A positive integer with its prime factorization, primes ascending."""

    value: int
    factors: tuple[tuple[int, int], ...]

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def radical(self) -> int:
        return math.prod(self.primes)

    def __iter__(self):
        return iter(self.factors)

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors)


def factorize(m: int) -> Factorization:
    """Complete deterministic factorization of ``1 <= m <= 2**96``."""
    if m < 1:
        raise ValueError(f"cannot factor {m}: need a positive integer")
    if m > FACTOR_LIMIT:
        raise ValueError(f"{m} exceeds the factorization ceiling 2**96")
    found: dict[int, int] = {}
    rest = m
    for p in _SMALL_PRIMES:
        if p * p > rest:
            break
        if rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            found[p] = e
    if rest > 1:
        _factor_into(rest, found)
    return Factorization(m, tuple(sorted(found.items())))


def factorization_from_primes(value: int, primes: Iterable[int]) -> Factorization:
    """Build a Factorization when the prime support of ``value`` is known."""
    rest = value
    factors = []
    for p in sorted(set(primes)):
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        if e == 0:
            raise ValueError(f"{p} does not divide {value}")
        factors.append((p, e))
    if rest != 1:
        raise ValueError(f"primes {sorted(primes)} do not cover {value}")
    return Factorization(value, tuple(factors))


def iroot(n: int, k: int) -> int:
    """Floor of the k-th root of ``n >= 0``."""
    if n < 2 or k == 1:
        return n
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def is_prime_power(m: int) -> Optional[tuple[int, int]]:
    """Return ``(p, k)`` with ``p**k == m`` and p prime, or None."""
    if m < 2:
        return None
    if m % 2 == 0:
        if m & (m - 1) == 0:
            return 2, m.bit_length() - 1
        return None
    if is_prime(m):
        return m, 1
    # the largest k with an exact k-th root leaves a base that is not itself a
    # perfect power; m is a prime power iff that base is prime
    for k in range(m.bit_length(), 1, -1):
        r = iroot(m, k)
        if r > 1 and r**k == m:
            return (r, k) if is_prime(r) else None
    return None


def primorial(m: int) -> int:
    """Product of the first ``m`` primes (P_0 = 1)."""
    return product_tree(first_primes(m))


def product_tree(values: list[int]) -> int:
    """Exact product of ``values`` by balanced splitting."""
    if not values:
        return 1
    vals = list(values)
    while len(vals) > 1:
        paired = [vals[i] * vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            paired.append(vals[-1])
        vals = paired
    return vals[0]


@dataclass(frozen=True)
class MultiplicativeStats:
    omega: int
    bigW: int
    theta: Fraction
    radical: int
    mu: int
    phi: int


def multiplicative_stats(f: Factorization) -> MultiplicativeStats:
    theta = Fraction(1)
    phi = 1
    for p, e in f.factors:
        theta *= Fraction(p - 1, p)
        phi *= (p - 1) * p ** (e - 1)
    if any(e > 1 for _, e in f.factors):
        mu = 0
    else:
        mu = -1 if f.omega % 2 else 1
    return MultiplicativeStats(
        omega=f.omega,
        bigW=2**f.omega,
        theta=theta,
        radical=f.radical,
        mu=mu,
        phi=phi,
    )


def theta_of(primes: Iterable[int]) -> Fraction:
    """theta over an explicit prime set: prod(1 - 1/p)."""
    out = Fraction(1)
    for p in set(primes):
        out *= Fraction(p - 1, p)
    return out


_ROBIN_CONSTANT = 1.38402


def robin_omega_bound(q: int) -> float:
    """Upper bound 1.38402 ln q / ln ln q on omega(q - 1), padded upward."""
    if q < 3:
        raise ValueError("the omega bound needs q >= 3")
    lq = math.log(q)
    return _ROBIN_CONSTANT * lq / math.log(lq) * (1 + 1e-12)


def omega_table(limit: int) -> np.ndarray:
    """omega(m) for 0 <= m < limit via a prime sieve (omega(0) reported as 0)."""
    counts = np.zeros(limit, dtype=np.int16)
    for p in sieve_primes(limit):
        counts[p::p] += 1
    return counts
