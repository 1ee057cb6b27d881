import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from consecprim.numtheory import (
    FACTOR_LIMIT,
    factorization_from_primes,
    factorize,
    first_primes,
    iroot,
    is_prime,
    is_prime_power,
    multiplicative_stats,
    omega_table,
    primorial,
    product_tree,
    robin_omega_bound,
    sieve_primes,
    theta_of,
)


def trial_is_prime(n):
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def test_sieve_matches_trial_division():
    assert list(sieve_primes(500)) == [n for n in range(500) if trial_is_prime(n)]


def test_is_prime_small_range():
    assert all(is_prime(n) == trial_is_prime(n) for n in range(-5, 5000))


@pytest.mark.parametrize(
    "n",
    [
        561, 1105, 1729, 2465, 2821, 6601, 8911,  # Carmichael numbers
        3215031751,  # strong pseudoprime to bases 2, 3, 5, 7
        3825123056546413051,  # strong pseudoprime to bases 2..23
        318665857834031151167461,  # strong pseudoprime to bases 2..37
        (2**61 - 1) * (2**31 - 1),
        (2**89 - 1) ** 2,
    ],
)
def test_composites_rejected(n):
    assert not is_prime(n)


@pytest.mark.parametrize("n", [2**31 - 1, 2**61 - 1, 2**89 - 1, 2**107 - 1, 2**127 - 1, 10**18 + 9])
def test_known_primes(n):
    assert is_prime(n)


def test_factorize_known():
    f = factorize(2**64 + 1)
    assert f.factors == ((274177, 1), (67280421310721, 1))
    assert factorize(1).factors == ()
    assert factorize(2**10 * 3**4).factors == ((2, 10), (3, 4))
    assert str(factorize(360)) == "2^3 * 3^2 * 5"


def test_factorize_90_bit_semiprime():
    p, q = 35184372088763, 35184372088777  # both prime, just below 2^45
    assert is_prime(p) and is_prime(q)
    assert factorize(p * q).factors == ((p, 1), (q, 1))


def test_factorize_limits():
    with pytest.raises(ValueError):
        factorize(0)
    with pytest.raises(ValueError):
        factorize(FACTOR_LIMIT + 1)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(2, 10**6), min_size=1, max_size=5))
def test_factorize_roundtrip(parts):
    m = math.prod(parts)
    f = factorize(m)
    assert math.prod(p**e for p, e in f.factors) == m
    assert all(is_prime(p) for p in f.primes)
    assert list(f.primes) == sorted(set(f.primes))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 2**64))
def test_factorize_random_64_bit(m):
    f = factorize(m)
    assert math.prod(p**e for p, e in f.factors) == m
    assert all(is_prime(p) for p in f.primes)


def test_factorization_from_primes():
    f = factorization_from_primes(720, [5, 2, 3])
    assert f.factors == ((2, 4), (3, 2), (5, 1))
    with pytest.raises(ValueError):
        factorization_from_primes(720, [2, 3])
    with pytest.raises(ValueError):
        factorization_from_primes(720, [2, 3, 5, 7])


def test_multiplicative_stats():
    s = multiplicative_stats(factorize(12))
    assert (s.omega, s.bigW, s.theta, s.radical, s.mu, s.phi) == (2, 4, Fraction(1, 3), 6, 0, 4)
    s = multiplicative_stats(factorize(30))
    assert s.mu == -1 and s.phi == 8
    assert multiplicative_stats(factorize(1)).mu == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10**7))
def test_phi_equals_theta_times_m(m):
    s = multiplicative_stats(factorize(m))
    assert s.theta * m == s.phi
    assert s.theta == theta_of(factorize(m).primes)


def test_iroot_and_prime_power():
    assert iroot(10**30, 3) == 10**10
    assert iroot(10**30 - 1, 3) == 10**10 - 1
    assert is_prime_power(3**20) == (3, 20)
    assert is_prime_power(2**7) == (2, 7)
    assert is_prime_power(15625) == (5, 6)
    assert is_prime_power(1) is None
    assert is_prime_power(36) is None
    assert is_prime_power((2**61 - 1) ** 2) == (2**61 - 1, 2)


def test_prime_power_small_range():
    truth = {}
    for p in range(2, 3000):
        if trial_is_prime(p):
            k, q = 1, p
            while q < 3000:
                truth[q] = (p, k)
                q *= p
                k += 1
    assert all(is_prime_power(m) == truth.get(m) for m in range(3000))


def test_primorial():
    assert first_primes(6) == [2, 3, 5, 7, 11, 13]
    assert primorial(0) == 1
    assert primorial(6) == 30030
    assert product_tree(first_primes(200)) == math.prod(first_primes(200))


def test_omega_table_matches_factorize():
    tab = omega_table(3000)
    assert all(tab[m] == factorize(m).omega for m in range(1, 3000))


def test_robin_bound():
    with pytest.raises(ValueError):
        robin_omega_bound(2)
    m = np.arange(3, 200000)
    om = omega_table(200000)[3:]
    lm = np.log(m)
    assert np.all(om <= 1.38402 * lm / np.log(lm) * (1 + 1e-12))
    # the bound is nearly attained at primorials
    assert robin_omega_bound(primorial(9)) > 9
