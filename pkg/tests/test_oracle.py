import math

import numpy as np
import pytest

from consecprim.finite_field import build_field, field_from_q
from consecprim.oracle import (
    build_dlog,
    char_matrix,
    characters_of_order,
    field_report,
    n_direct,
    n_via_characters,
    s_sum,
    squarefree_characters,
    verify_lemma4,
    verify_parity_cancellation,
    verify_sieve_inequality,
    weil_check,
)


def test_dlog_tables():
    t = build_dlog(build_field(7))
    assert t.generator == 3 and t.index[3] == 1 and t.index[2] == 2 and t.index[0] == -1
    t = build_dlog(build_field(13))
    assert t.generator == 2 and t.index[1] == 0
    spec = field_from_q(9)
    t = build_dlog(spec)
    assert t.generator == spec.first_primitive()
    assert sorted(t.index[1:]) == list(range(8))
    with pytest.raises(ValueError):
        build_dlog(build_field(4001))


def test_characters_are_homomorphisms():
    spec = field_from_q(25)
    t = build_dlog(spec)
    chars = squarefree_characters(25, [2, 3])
    X = char_matrix(t, chars)
    for a in range(1, 25):
        for b in range(1, 25):
            assert np.allclose(X[:, spec.mul(a, b)], X[:, a] * X[:, b])
    assert len(characters_of_order(25, 6)) == 2


def test_s_sum_examples():
    t7 = build_dlog(build_field(7))
    one = squarefree_characters(7, [])[0]
    assert abs(s_sum(t7, [one] * 3) - 4) < 1e-9
    t13 = build_dlog(build_field(13))
    quad = characters_of_order(13, 2)[0]
    one13 = squarefree_characters(13, [])[0]
    assert abs(s_sum(t13, [quad, one13, one13])) <= 2 * math.sqrt(13) + 1e-6


def test_s_sum_reflection():
    # S(c1, ..., cn) = (c1...cn)(-1) S(cn, ..., c1)
    spec = build_field(7)
    t = build_dlog(spec)
    quad = characters_of_order(7, 2)[0]
    one = squarefree_characters(7, [])[0]
    a = s_sum(t, [quad, quad, one])
    b = s_sum(t, [one, quad, quad])
    sign = char_matrix(t, [quad])[0, 6] ** 2  # (quad * quad * 1)(-1)
    assert abs(a - sign * b) < 1e-9


def test_window_counts():
    assert n_direct(build_field(13), [{2}] * 3) == 2
    assert n_direct(build_field(7), [{2}] * 3) == 0
    assert n_direct(build_field(11), [{2, 5}] * 3) >= 1
    t13 = build_dlog(build_field(13))
    assert abs(n_via_characters(t13, [{2}] * 3) - 2) < 1e-6
    assert abs(n_via_characters(build_dlog(build_field(7)), [{2}] * 3)) < 1e-6
    assert abs(n_via_characters(t13, [set()] * 3) - 10) < 1e-6


def test_parity():
    assert verify_parity_cancellation(build_dlog(build_field(7)), 3, {2})
    assert verify_parity_cancellation(build_dlog(build_field(11)), 3, {2, 5})
    assert verify_parity_cancellation(build_dlog(build_field(19)), 3, {2, 3})
    with pytest.raises(ValueError):
        verify_parity_cancellation(build_dlog(build_field(13)), 3, {2})
    with pytest.raises(ValueError):
        verify_parity_cancellation(build_dlog(build_field(19)), 3, {3})


def test_lemma4_and_sieve_examples():
    assert verify_lemma4(build_dlog(build_field(31)), 3, {2, 3}, 5, 1)
    assert verify_lemma4(build_dlog(build_field(13)), 3, {2}, 3, 2)
    assert verify_lemma4(build_dlog(build_field(11)), 3, {2}, 5, 3)
    assert verify_sieve_inequality(build_field(31), 3, {2, 3})
    assert verify_sieve_inequality(build_field(31), 3, {2, 3, 5})
    assert verify_sieve_inequality(build_field(43), 3, {2, 3})
    with pytest.raises(ValueError):
        verify_sieve_inequality(build_field(31), 3, {7})


@pytest.mark.parametrize("q", [7, 9, 25, 27, 31, 49, 127])
def test_field_report_clean(q):
    rep = field_report(field_from_q(q))
    assert rep["failures"] == [] and rep["checks_run"] > 0


def test_weil_n5_sampled():
    for q in (11, 31, 61, 125, 181, 199):
        t = build_dlog(field_from_q(q))
        assert weil_check(t, 5, max_tuples=3000, seed=1) == []
    # small enough to enumerate completely
    assert weil_check(build_dlog(build_field(11)), 5) == []
