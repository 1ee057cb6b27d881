import pytest
from hypothesis import given, settings, strategies as st

from consecprim.finite_field import (
    build_field,
    field_from_q,
    is_irreducible,
    primitive_bitmap,
    smallest_irreducible,
)
from consecprim.numtheory import multiplicative_stats

FIELDS = [(3, 1), (7, 1), (3, 2), (5, 2), (3, 3), (7, 2), (3, 4), (5, 3), (11, 2), (3, 5)]


def test_known_moduli():
    assert build_field(3, 2).modulus == (1, 0, 1)  # x^2 + 1
    assert build_field(5, 6).modulus == (1, 0, 0, 0, 1, 1, 1)
    assert build_field(7).modulus is None


def test_smallest_irreducible_is_smallest():
    # brute force: every monic degree-2 polynomial over F_3 without roots
    p = 3
    cands = []
    for c0 in range(p):
        for c1 in range(p):
            f = (c0, c1, 1)
            if all((c0 + c1 * x + x * x) % p for x in range(p)):
                cands.append(f)
    assert smallest_irreducible(3, 2) in cands
    assert all(is_irreducible(f, 3) for f in cands)
    assert not is_irreducible((2, 0, 1), 3)  # x^2 + 2 = (x-1)(x+1)


def test_bad_fields():
    with pytest.raises(ValueError):
        build_field(2, 3)
    with pytest.raises(ValueError):
        build_field(9)
    with pytest.raises(OverflowError):
        build_field(3, 40)
    with pytest.raises(ValueError):
        field_from_q(12)


@pytest.mark.parametrize("p,k", FIELDS)
def test_primitive_count_is_phi(p, k):
    spec = build_field(p, k)
    bits = primitive_bitmap(spec)
    assert bits.sum() == multiplicative_stats(spec.q_minus_1).phi
    assert not bits[0]
    assert all(bool(bits[a]) == spec.is_primitive(a) for a in range(spec.q))


@pytest.mark.parametrize("p,k", FIELDS)
def test_group_structure(p, k):
    spec = build_field(p, k)
    g = spec.first_primitive()
    seen = set()
    x = 1
    for _ in range(spec.q - 1):
        seen.add(x)
        x = spec.mul(x, g)
    assert x == 1 and len(seen) == spec.q - 1


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(FIELDS), st.integers(0, 10**9), st.integers(0, 10**9), st.integers(0, 10**9))
def test_field_axioms(pk, a, b, c):
    spec = build_field(*pk)
    a, b, c = a % spec.q, b % spec.q, c % spec.q
    assert spec.mul(a, spec.add(b, c)) == spec.add(spec.mul(a, b), spec.mul(a, c))
    assert spec.mul(spec.mul(a, b), c) == spec.mul(a, spec.mul(b, c))
    assert spec.add(a, b) == spec.add(b, a)
    if a:
        assert spec.mul(a, spec.pow(a, spec.q - 2)) == 1


def test_e_free():
    spec = build_field(13)
    # 13 - 1 = 2^2 * 3; 4 is a square but not a cube
    assert not spec.is_e_free(4, [2])
    assert spec.is_e_free(4, [3])
    assert spec.is_e_free(2, [2, 3]) and spec.is_primitive(2)
    with pytest.raises(ValueError):
        spec.is_e_free(2, [5])


def test_element_encoding_roundtrip():
    spec = build_field(5, 3)
    for a in range(spec.q):
        assert spec.element(spec.coeffs(a)) == a
    # adding an integer moves only the constant coefficient
    assert spec.coeffs(spec.add_int(spec.element([4, 2, 1]), 3)) == [2, 2, 1]


def test_bitmap_limit():
    spec = build_field(3, 26)
    assert spec.q > 2**40
    with pytest.raises(ValueError):
        primitive_bitmap(spec)


def test_bitmap_counts_larger_prime_fields():
    for q in (65537, 100003, 1000003):
        spec = build_field(q)
        assert int(primitive_bitmap(spec).sum()) == multiplicative_stats(spec.q_minus_1).phi
