"""Bounds on omega(q-1) and on q beyond which runs of n primitives are guaranteed.

For each n the basic criterion first gives a level w* from which every q with
omega(q-1) >= w* is settled, because q - 1 >= P_w (the primorial).  Each level
below w* is then tested against the sieve criterion in its worst case (q - 1
built from the first w primes); the levels no s can settle remain, and the
largest of their best right-hand sides is the bound on q.

Large primorials are handled through logarithms, with exact big-integer or
rational comparisons whenever a decision is within rounding distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .criteria import best_worst_case_rhs, worst_case_rhs
from .numtheory import prime_table, primorial

ROBIN_TWICE = 2.76804  # twice the constant in omega(m) <= 1.38402 ln m / ln ln m
DEFAULT_D = 0.0001
_LOG_TOL = 1e-9


@dataclass(frozen=True)
class Table1Row:
    n: int
    omega_bound: int
    q0_mantissa: float
    q0_exponent: int
    q0_exact: Optional[int] = None  # ceiling of the bound, when computed exactly

    @property
    def q0(self) -> str:
        return f"{self.q0_mantissa:.2f}e{self.q0_exponent}"

    def q0_latex(self) -> str:
        return f"{self.q0_mantissa:.2f}\\times 10^{{{self.q0_exponent}}}"


@dataclass(frozen=True)
class LogBound:
    log_value: float
    description: str


class _PrimeLogs:
    """Prefix sums of ln p and 1/p over the shared prime table (1-based w)."""

    def __init__(self) -> None:
        primes = prime_table().astype(np.float64)
        self.primes = prime_table()
        self.log_primorial = np.concatenate([[0.0], np.cumsum(np.log(primes))])
        self.recip = np.concatenate([[0.0], np.cumsum(1.0 / primes)])

    def ensure(self, w: int) -> None:
        if w >= len(self.primes):
            raise ValueError(f"prime table too small for w={w}; raise CONSECPRIM_PRIME_LIMIT")


_logs: Optional[_PrimeLogs] = None


def _prime_logs() -> _PrimeLogs:
    global _logs
    if _logs is None:
        _logs = _PrimeLogs()
    return _logs


def _basic_holds_exact(n: int, w: int) -> bool:
    return primorial(w) + 1 >= (n - 1) ** 2 * 2 ** (2 * n * w)


def initial_omega_bound(n: int) -> int:
    """Smallest w* with P_w + 1 >= (n-1)^2 2^(2nw) for every w >= w*.

    ln P_w - 2nw ln 2 falls while p_{w+1} < 4^n and rises afterwards, so
    the condition, once true beyond that turning point, stays true.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    pl = _prime_logs()
    turn = int(np.searchsorted(pl.primes, 4**n))  # p_{w+1} >= 4^n for w >= turn
    c = 2 * math.log(n - 1)
    step = 2 * n * math.log(2)
    w = max(turn, 1)
    while True:
        pl.ensure(w)
        f = pl.log_primorial[w] - c - step * w
        if f > _LOG_TOL * pl.log_primorial[w] or (
            f > -_LOG_TOL * pl.log_primorial[w] and _basic_holds_exact(n, w)
        ):
            break
        w += 1
    # walk back to the first level of the final run of successes
    while w > 1:
        f = pl.log_primorial[w - 1] - c - step * (w - 1)
        tol = _LOG_TOL * max(pl.log_primorial[w - 1], 1.0)
        if f < -tol or (f <= tol and not _basic_holds_exact(n, w - 1)):
            break
        w -= 1
    return w


def _log_rhs(n: int, w: int, s: int) -> float:
    """ln of the worst-case sieve rhs, or +inf when delta <= 0."""
    pl = _prime_logs()
    delta = 1.0 - n * (pl.recip[w] - pl.recip[w - s])
    if delta <= 0:
        return math.inf
    return 2.0 * (math.log(n - 1) + math.log((n * s - 1) / delta + 2) + n * (w - s) * math.log(2))


def _min_log_rhs_scan(n: int, w: int) -> tuple[float, int]:
    best = (math.inf, 0)
    for s in range(w + 1):
        v = _log_rhs(n, w, s)
        if v == math.inf:
            break
        best = min(best, (v, s))
    return best


def _resolved(n: int, w: int, s_hint: int) -> tuple[bool, int]:
    """Whether some s settles level w; also returns the best s seen."""
    pl = _prime_logs()
    lp = pl.log_primorial[w]
    tol = _LOG_TOL * max(lp, 1.0)
    # local descent from the hint, then a full scan if that fails
    s = min(max(s_hint, 0), w)
    cur = _log_rhs(n, w, s)
    while True:
        moved = False
        for t in (s - 1, s + 1):
            if 0 <= t <= w:
                v = _log_rhs(n, w, t)
                if v < cur:
                    s, cur, moved = t, v, True
        if not moved:
            break
    if lp - cur > tol:
        return True, s
    cur, s = _min_log_rhs_scan(n, w)
    if lp - cur > tol:
        return True, s
    if lp - cur < -tol:
        return False, s
    # too close to call in floating point
    pw = primorial(w) + 1
    for t in range(w + 1):
        r = worst_case_rhs(n, w, t)
        if r is not None and pw > r:
            return True, t
    return False, s


def refine_omega_bound(n: int, w_start: Optional[int] = None) -> Table1Row:
    """Largest level the sieve criterion cannot settle, and the bound on q there."""
    if w_start is None:
        w_start = initial_omega_bound(n)
    unresolved: list[int] = []
    s_hint = 0
    for w in range(w_start - 1, 0, -1):
        ok, s_hint = _resolved(n, w, s_hint)
        if not ok:
            unresolved.append(w)
    if not unresolved:
        return Table1Row(n, 0, 0.0, 0)
    # the bound is the largest of the per-level minima; pick it in logs, confirm exactly
    logs = {w: _min_log_rhs_scan(n, w) for w in unresolved}
    top = max(v for v, _ in logs.values())
    close = [w for w, (v, _) in logs.items() if v >= top - 1e-6 * max(abs(top), 1.0)]
    exact = max(_exact_min_near(n, w, logs[w][1]) for w in close)
    ceil = -(-exact.numerator // exact.denominator)
    mant, expo = _mantissa_exponent(exact)
    return Table1Row(n, max(unresolved), mant, expo, ceil)


def _exact_min_near(n: int, w: int, s_best: int, radius: int = 3) -> Fraction:
    """Exact minimum over s within ``radius`` of the floating-point optimum.

    Small levels are scanned in full.
    """
    if w <= 64:
        return best_worst_case_rhs(n, w)[0]
    vals = [worst_case_rhs(n, w, s) for s in range(max(0, s_best - radius), min(w, s_best + radius) + 1)]
    return min(v for v in vals if v is not None)


def _mantissa_exponent(x: Fraction) -> tuple[float, int]:
    """x <= mant * 10^expo with 1 <= mant <= 10, mant rounded up to 3 significant digits."""
    whole = x.numerator // x.denominator
    expo = len(str(whole)) - 1
    scaled = x / Fraction(10) ** (expo - 2)  # three leading digits before the point
    lead = -(-scaled.numerator // scaled.denominator)
    if lead >= 1000:
        lead //= 10
        expo += 1
    return lead / 100, expo


def table1(n_values) -> list[Table1Row]:
    return [refine_omega_bound(n) for n in n_values]


def generic_q0(n: int, d: float = DEFAULT_D) -> LogBound:
    """ln of max((n-1)^(2/d), exp(2^(2.76804 n / (1-d))))."""
    if not 0 < d < 1:
        raise ValueError("d must lie in (0, 1)")
    if n < 3:
        raise ValueError("n must be at least 3")
    poly = 2 / d * math.log(n - 1)
    dexp = 2 ** (ROBIN_TWICE * n / (1 - d))
    if poly >= dexp:
        return LogBound(poly, "(n-1)^(2/d)")
    return LogBound(dexp, "exp(2^(2.76804 n/(1-d)))")


def check_bitter(n: int, log_q: float) -> bool:
    """ln q (1 - 2.76804 n ln 2 / ln ln q) >= 2 ln(n-1)."""
    if log_q <= math.e:
        raise ValueError("need ln q > e")
    return log_q * (1 - ROBIN_TWICE * n * math.log(2) / math.log(log_q)) >= 2 * math.log(n - 1)


def split_condition(n: int, log_q: float, d: float) -> bool:
    """The two-part sufficient condition: braces term >= d and d ln q >= 2 ln(n-1).

    At the generic bound the braces term equals d exactly, so that side is
    compared with a relative slack of 1e-9 to absorb rounding.
    """
    braces = 1 - ROBIN_TWICE * n * math.log(2) / math.log(log_q)
    return braces >= d * (1 - 1e-9) and d * log_q >= 2 * math.log(n - 1)


def render_csv(rows: list[Table1Row]) -> str:
    lines = ["n,omega_bound,q0"]
    lines += [f"{r.n},{r.omega_bound},{r.q0}" for r in rows]
    return "\n".join(lines) + "\n"


def render_latex(rows: list[Table1Row]) -> str:
    return "".join(f"  ${r.n}$ & ${r.omega_bound}$ & ${r.q0_latex()}$ \\\\\n" for r in rows)
