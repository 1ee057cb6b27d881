"""Arithmetic in F_q for odd prime powers q = p**k.

Elements are plain ints: the coefficient vector (c_0, ..., c_{k-1}) of a
polynomial in x modulo the defining polynomial is encoded as
sum(c_i * p**i).  Counting 0, 1, ..., q-1 therefore walks the field in
odometer order with the constant term fastest, and ``g + j`` for a small
integer j only touches the constant digit.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .numtheory import Factorization, factorize, is_prime

FIELD_LIMIT = 1 << 63


# -- polynomials over F_p, lists of coefficients constant term first ---------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mulmod(a: Sequence[int], b: Sequence[int], f: Sequence[int], p: int) -> list[int]:
    """a*b mod (monic f) over F_p; a, b have length < deg f."""
    k = len(f) - 1
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    for top in range(len(prod) - 1, k - 1, -1):
        c = prod[top] % p
        if c:
            base = top - k
            for i in range(k):
                prod[base + i] -= c * f[i]
    out = [c % p for c in prod[:k]]
    out.extend([0] * (k - len(out)))
    return out


def _poly_powmod(a: Sequence[int], e: int, f: Sequence[int], p: int) -> list[int]:
    k = len(f) - 1
    result = [1] + [0] * (k - 1)
    base = list(a)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, f, p)
        e >>= 1
        if e:
            base = _poly_mulmod(base, base, f, p)
    return result


def _poly_rem(a: list[int], b: list[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    b = _trim(list(b))
    inv = pow(b[-1], -1, p)
    while len(a) >= len(b):
        c = a[-1] * inv % p
        shift = len(a) - len(b)
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        _trim(a)
    return a


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_rem(a, b, p)
    return a


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Ben-Or test for a monic polynomial f over F_p (coefficients low first).

    f of degree k is irreducible iff gcd(x^(p^i) - x, f) = 1 for i <= k/2;
    reducible candidates usually fail at a small i.
    """
    k = len(f) - 1
    if k == 1:
        return True
    if f[0] % p == 0:
        return False
    x = [0, 1] + [0] * (k - 2)
    h = x
    for _ in range(k // 2):
        h = _poly_powmod(h, p, f, p)
        diff = [(a - b) % p for a, b in zip(h, x)]
        if len(_poly_gcd(list(f), diff, p)) != 1:
            return False
    return True


def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree k, low degree first."""
    # a zero constant term means x | f, so those candidates are skipped wholesale
    for low in itertools.product(range(1, p), *[range(p)] * (k - 1)):
        f = list(low) + [1]
        if is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


@dataclass(frozen=True)
class FieldSpec:
    """The field F_q, q = p**k, with its defining polynomial and q-1 factored."""

    p: int
    k: int
    q: int
    modulus: Optional[tuple[int, ...]]
    q_minus_1: Factorization
    _cofactors: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_cofactors", tuple((self.q - 1) // l for l in self.q_minus_1.primes)
        )

    # -- element encoding ----------------------------------------------------

    def coeffs(self, a: int) -> list[int]:
        """Coefficient list of the element ``a``, constant term first."""
        self.check(a)
        out = []
        for _ in range(self.k):
            a, c = divmod(a, self.p)
            out.append(c)
        return out

    def element(self, coeffs: Iterable[int]) -> int:
        cs = list(coeffs)
        if len(cs) != self.k or any(not 0 <= c < self.p for c in cs):
            raise ValueError(f"{cs} is not a coefficient vector for F_{self.q}")
        return sum(c * self.p**i for i, c in enumerate(cs))

    def check(self, a: int) -> None:
        if not 0 <= a < self.q:
            raise ValueError(f"{a} is not an element of F_{self.q}")

    # -- arithmetic ----------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        self.check(a)
        self.check(b)
        if self.k == 1:
            return (a + b) % self.p
        return self.element([(x + y) % self.p for x, y in zip(self.coeffs(a), self.coeffs(b))])

    def add_int(self, a: int, j: int) -> int:
        """a + j, i.e. the field identity added j times."""
        self.check(a)
        c = a % self.p
        return a - c + (c + j) % self.p

    def mul(self, a: int, b: int) -> int:
        self.check(a)
        self.check(b)
        if self.k == 1:
            return a * b % self.p
        return self.element(_poly_mulmod(self.coeffs(a), self.coeffs(b), self.modulus, self.p))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            raise ValueError("negative exponents are not supported")
        self.check(a)
        if self.k == 1:
            return pow(a, e, self.p)
        return self.element(_poly_powmod(self.coeffs(a), e, self.modulus, self.p))

    # -- freeness ------------------------------------------------------------

    def is_e_free(self, g: int, e_primes: Iterable[int]) -> bool:
        """True iff g != 0 and g is not an l-th power for any l in e_primes."""
        primes = set(e_primes)
        for l in primes:
            if (self.q - 1) % l:
                raise ValueError(f"{l} does not divide q-1 = {self.q - 1}")
        if g == 0:
            self.check(g)
            return False
        return all(self.pow(g, (self.q - 1) // l) != 1 for l in primes)

    def is_primitive(self, g: int) -> bool:
        self.check(g)
        if g == 0:
            return False
        if self.k == 1:
            return all(pow(g, c, self.p) != 1 for c in self._cofactors)
        cs = self.coeffs(g)
        one = [1] + [0] * (self.k - 1)
        return all(_poly_powmod(cs, c, self.modulus, self.p) != one for c in self._cofactors)

    def first_primitive(self) -> int:
        for g in range(1, self.q):
            if self.is_primitive(g):
                return g
        raise AssertionError("cyclic group without generator")  # pragma: no cover

    def to_json(self) -> str:
        return json.dumps({"p": self.p, "k": self.k, "modulus": list(self.modulus or [])})


def build_field(p: int, k: int = 1) -> FieldSpec:
    """Construct F_{p^k}; the modulus is the lexicographically smallest irreducible."""
    if p % 2 == 0 or not is_prime(p):
        raise ValueError(f"characteristic {p} must be an odd prime")
    if k < 1:
        raise ValueError("extension degree must be positive")
    q = p**k
    if q > FIELD_LIMIT:
        raise OverflowError(f"{p}^{k} exceeds the field size limit 2**63")
    modulus = smallest_irreducible(p, k) if k > 1 else None
    return FieldSpec(p=p, k=k, q=q, modulus=modulus, q_minus_1=factorize(q - 1))


def field_from_q(q: int) -> FieldSpec:
    from .numtheory import is_prime_power

    pk = is_prime_power(q)
    if pk is None:
        raise ValueError(f"{q} is not a prime power")
    return build_field(*pk)


def _mat_pow(mat: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.eye(len(mat), dtype=np.int64)
    base = mat.copy()
    while e:
        if e & 1:
            out = out @ base % p
        base = base @ base % p
        e >>= 1
    return out


def _coprime_mask(spec: FieldSpec) -> np.ndarray:
    """mask[i] is True iff gcd(i, q-1) = 1, for 0 <= i < q-1."""
    mask = np.ones(spec.q - 1, dtype=bool)
    for l in spec.q_minus_1.primes:
        mask[::l] = False
    return mask


def primitive_bitmap(spec: FieldSpec) -> np.ndarray:
    """Boolean array over the encoded field marking the primitive elements.

    One generator is found by direct testing; every other primitive element
    is a power of it with exponent coprime to q-1.  Powers are produced a
    block at a time as coefficient vectors, using the matrix of
    multiplication by the generator.
    """
    p, k, q = spec.p, spec.k, spec.q
    if q > 1 << 40:
        raise ValueError("field too large for a bitmap")
    gen = spec.first_primitive()
    order = q - 1
    block = math.isqrt(order) + 1
    bitmap = np.zeros(q, dtype=bool)
    if k == 1:
        small = np.empty(block, dtype=np.int64)
        big = np.empty(block, dtype=np.int64)
        x = 1
        for i in range(block):
            small[i] = x
            x = x * gen % p
        y = 1
        for j in range(block):
            big[j] = y
            y = y * x % p
        # gen^(j*block + i) for all i, j; exponents beyond q-2 are dropped
        powers = (big[:, None] * small[None, :] % p).ravel()[:order]
        bitmap[powers[_coprime_mask(spec)]] = True
        return bitmap

    # column j: coefficients of gen * x^j
    mat = np.zeros((k, k), dtype=np.int64)
    for j in range(k):
        xj = spec.element([1 if i == j else 0 for i in range(k)])
        mat[:, j] = spec.coeffs(spec.mul(gen, xj))
    first = np.zeros((block, k), dtype=np.int64)
    vec = np.zeros(k, dtype=np.int64)
    vec[0] = 1
    for i in range(block):
        first[i] = vec
        vec = mat @ vec % p
    step = _mat_pow(mat, block, p)
    digits = np.array([p**i for i in range(k)], dtype=np.int64)
    coprime = _coprime_mask(spec)
    cur = np.eye(k, dtype=np.int64)
    for start in range(0, order, block):
        vecs = first @ cur.T % p
        n = min(block, order - start)
        bitmap[(vecs[:n] @ digits)[coprime[start : start + n]]] = True
        cur = step @ cur % p
    return bitmap
