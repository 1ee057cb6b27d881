"""Sufficiency criteria for n consecutive primitive elements, in exact arithmetic.

Four tests are implemented:

* ``Basic``: q >= (n-1)^2 W(q-1)^(2n)
* ``Basic3mod4``: for q = 3 mod 4, q >= (n-1)^2 2^(2(n omega - 1))
* ``Sieve``: for a kept prime set e with the s largest primes of q-1 sieved
  out and delta = 1 - n sum 1/p_i > 0,
  q > ((n-1) ((ns-1)/delta + 2) W(e)^n)^2
* ``Sieve3mod4``: the same with (n-1) halved, when q = 3 mod 4 and e is even.

No floating point decides a verdict.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .numtheory import Factorization, first_primes, theta_of

GUARANTEED = "Guaranteed"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class SievePlan:
    n: int
    kept_primes: frozenset[int]
    sieved_primes: tuple[int, ...]
    delta: Fraction

    @property
    def s(self) -> int:
        return len(self.sieved_primes)


@dataclass(frozen=True)
class CriterionOutcome:
    verdict: str
    theorem: Optional[str] = None
    plan: Optional[SievePlan] = None
    rhs: Optional[Fraction] = None

    @property
    def guaranteed(self) -> bool:
        return self.verdict == GUARANTEED

    def to_json(self) -> str:
        rec = {
            "verdict": self.verdict,
            "theorem": self.theorem,
            "s": self.plan.s if self.plan else None,
            "delta": f"{self.plan.delta.numerator}/{self.plan.delta.denominator}" if self.plan else None,
            "rhs": decimal_string(self.rhs) if self.rhs is not None else None,
        }
        return json.dumps(rec)


def decimal_string(x: Fraction, digits: int = 6) -> str:
    """Fixed-point rendering of a nonnegative rational, truncated to ``digits`` places."""
    whole, frac = divmod(x.numerator * 10**digits // x.denominator, 10**digits)
    return f"{whole}.{frac:0{digits}d}"


def delta_of(n: int, sieved: Iterable[int]) -> Fraction:
    return 1 - n * sum((Fraction(1, p) for p in sieved), Fraction(0))


def _sieve_rhs(n: int, s: int, delta: Fraction, w_kept: int, halve: bool) -> Fraction:
    lead = Fraction(n - 1, 2) if halve else Fraction(n - 1)
    return (lead * (Fraction(n * s - 1) / delta + 2) * 2 ** (n * w_kept)) ** 2


def basic_criterion(n: int, q: int, omega: int, q_mod4: int) -> CriterionOutcome:
    if n < 3:
        raise ValueError("n must be at least 3")
    rhs = (n - 1) ** 2 * 2 ** (2 * n * omega)
    if q >= rhs:
        return CriterionOutcome(GUARANTEED, "Basic", rhs=Fraction(rhs))
    if q_mod4 % 4 == 3:
        rhs4 = (n - 1) ** 2 * 2 ** (2 * (n * omega - 1))
        if q >= rhs4:
            return CriterionOutcome(GUARANTEED, "Basic3mod4", rhs=Fraction(rhs4))
    return CriterionOutcome(INCONCLUSIVE)


def make_plan(n: int, q_minus_1: Factorization, s: int) -> SievePlan:
    """Sieve the s largest primes of q-1, keep the rest."""
    primes = q_minus_1.primes
    if not 0 <= s <= len(primes):
        raise ValueError(f"s={s} outside [0, {len(primes)}]")
    cut = len(primes) - s
    sieved = tuple(primes[cut:])
    return SievePlan(n, frozenset(primes[:cut]), sieved, delta_of(n, sieved))


def plan_rhs(plan: SievePlan, halve: bool = False) -> Optional[Fraction]:
    """Right-hand side of the sieve criterion, or None when delta <= 0."""
    if plan.delta <= 0:
        return None
    return _sieve_rhs(plan.n, plan.s, plan.delta, len(plan.kept_primes), halve)


def sieve_criterion(
    n: int, q: int, q_minus_1: Factorization, q_mod4: Optional[int] = None
) -> CriterionOutcome:
    """Try every s; Guaranteed iff q > rhs for some feasible plan.

    The reported plan is the one with the smallest rhs (ties to smaller s).
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    if q_mod4 is None:
        q_mod4 = q % 4
    w = q_minus_1.omega
    best: Optional[tuple[Fraction, int, str, SievePlan]] = None
    for s in range(w + 1):
        plan = make_plan(n, q_minus_1, s)
        rhs = plan_rhs(plan)
        if rhs is None:
            continue
        cands = [(rhs, "Sieve")]
        # halving needs e even: 2 is kept unless every prime is sieved
        if q_mod4 % 4 == 3 and s < w:
            cands.append((plan_rhs(plan, halve=True), "Sieve3mod4"))
        for r, tag in cands:
            if best is None or r < best[0]:
                best = (r, s, tag, plan)
    if best is not None and q > best[0]:
        return CriterionOutcome(GUARANTEED, best[2], best[3], best[0])
    return CriterionOutcome(INCONCLUSIVE, None, best[3] if best else None, best[0] if best else None)


def any_criterion(n: int, q: int, q_minus_1: Factorization) -> CriterionOutcome:
    out = basic_criterion(n, q, q_minus_1.omega, q % 4)
    if out.guaranteed:
        return out
    return sieve_criterion(n, q, q_minus_1, q % 4)


def sqrt_upper(q: int, rel: int = 10**10) -> Fraction:
    """A rational r with r**2 >= q and r - sqrt(q) <= sqrt(q)/10**9.

    r = ceil(sqrt(q) * S) / S with S = 10**10: the excess is at most 1/S,
    which is below 10**-9 sqrt(q) for every q >= 1.
    """
    t = q * rel * rel
    root = math.isqrt(t)
    if root * root < t:
        root += 1
    return Fraction(root, rel)


def lower_bound_Nn(n: int, q: int, kept_primes: Iterable[int]) -> Fraction:
    """theta(e)^n (q - (n-1) W(e)^n sqrt(q)), with sqrt(q) rounded up."""
    kept = set(kept_primes)
    for l in kept:
        if (q - 1) % l:
            raise ValueError(f"{l} does not divide q-1")
    th = theta_of(kept)
    return th**n * (q - (n - 1) * 2 ** (n * len(kept)) * sqrt_upper(q))


def worst_case_rhs(n: int, w: int, s: int, mod4_variant: bool = False) -> Optional[Fraction]:
    """Sieve rhs when q-1 has the first w primes as prime set and the s largest are sieved."""
    if not 0 <= s <= w:
        raise ValueError(f"s={s} outside [0, {w}]")
    primes = first_primes(w)
    delta = delta_of(n, primes[w - s :])
    if delta <= 0:
        return None
    return _sieve_rhs(n, s, delta, w - s, mod4_variant)


def best_worst_case_rhs(n: int, w: int) -> tuple[Fraction, int]:
    """Minimum of worst_case_rhs over feasible s, with the minimizing s."""
    best: Optional[tuple[Fraction, int]] = None
    for s in range(w + 1):
        r = worst_case_rhs(n, w, s)
        if r is not None and (best is None or r < best[0]):
            best = (r, s)
    assert best is not None  # s = 0 is always feasible
    return best


class FastSieve:
    """Sieve criterion over prime sets, specialised for bulk screening.

    For a fixed prime set of q-1 the criterion holds for some s iff
    q > min_s rhs(s), and for integer q that is q > floor(min_s rhs(s)).
    The floor is computed exactly once per prime set and cached.
    """

    def __init__(self, n: int, use_mod4: bool = False, cache_size: int = 1 << 21):
        self.n = n
        self.use_mod4 = use_mod4
        self._cache: dict[tuple[int, ...], tuple[int, int]] = {}
        self._cache_size = cache_size

    def thresholds(self, primes: tuple[int, ...]) -> tuple[int, int]:
        """(T, T4): floors of the smallest plain rhs and halved rhs (s < w)."""
        got = self._cache.get(primes)
        if got is not None:
            return got
        n = self.n
        w = len(primes)
        best_a = best_d = None  # smallest sqrt(rhs) = a / d over all s
        best4_a = best4_d = None  # same, restricted to s < w
        num, den = 0, 1  # sum of 1/p over the sieved primes
        for s in range(w + 1):
            if s:
                p = primes[w - s]
                num, den = num * p + den, den * p
            dnum = den - n * num  # delta = dnum / den
            if dnum <= 0:
                break
            # sqrt(rhs) = (n-1)((ns-1) den + 2 dnum) 2^(n(w-s)) / dnum
            a = (n - 1) * ((n * s - 1) * den + 2 * dnum) << (n * (w - s))
            if best_a is None or a * best_d < best_a * dnum:
                best_a, best_d = a, dnum
            if s < w and (best4_a is None or a * best4_d < best4_a * dnum):
                best4_a, best4_d = a, dnum
        t = best_a * best_a // (best_d * best_d)
        t4 = best4_a * best4_a // (4 * best4_d * best4_d) if best4_a is not None else t
        if len(self._cache) >= self._cache_size:
            self._cache.clear()
        self._cache[primes] = (t, t4)
        return t, t4

    def guaranteed(self, q: int, primes: Sequence[int]) -> bool:
        """primes: the distinct primes of q-1, ascending."""
        t, t4 = self.thresholds(tuple(primes))
        if q > t:
            return True
        return self.use_mod4 and q % 4 == 3 and q > t4
