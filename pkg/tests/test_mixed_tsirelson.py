from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bdlab.mixed_tsirelson import AuxError, check_scc_lemma, lower_functional, mt_norm
from bdlab.schedule import make_schedule, t1

WS = t1()


def test_unit_vector():
    assert mt_norm(WS, 4, [1], 2) == (1, 0)


def test_flat_average_k64():
    x = [Fraction(8, 64)] * 64
    value, tail = mt_norm(WS, 4, x, 2)
    assert max(value, tail) <= Fraction(9, 8)
    assert lower_functional(WS, 1, x) == 1
    assert value >= 1


def test_scc_up_to_8():
    r = check_scc_lemma(WS, 1, 8)
    assert r["pass"] and len(r["rows"]) == 9


def test_k_zero_vacuous():
    r = check_scc_lemma(WS, 1, 0)
    assert r["pass"] and r["rows"][0]["norm"] == 0


def test_guard():
    with pytest.raises(AuxError):
        mt_norm(WS, 4, [1] * 129, 1)


# frozen: T1, j=1, k=4 weights admit up to 256 pieces, so the whole l1 mass
# is available at weight 1/8 and the norm is max(sup, l1/8)
@pytest.mark.parametrize("k,expected", [(1, Fraction(1, 8)), (8, Fraction(1, 8)), (9, Fraction(9, 64)),
                                        (16, Fraction(1, 4)), (32, Fraction(1, 2))])
def test_frozen_flat_values(k, expected):
    value, tail = mt_norm(WS, 4, [Fraction(1, 8)] * k, 2)
    assert value == expected and tail == 0


@settings(max_examples=30, deadline=None)
@given(st.lists(st.fractions(-4, 4, max_denominator=6), min_size=1, max_size=10))
def test_norm_between_sup_and_l1(x):
    v, _ = mt_norm(WS, 1, x, 2)
    assert max(abs(t) for t in x) <= v <= sum(abs(t) for t in x)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.fractions(-4, 4, max_denominator=6), min_size=2, max_size=9), st.integers(1, 8))
def test_restriction_monotone(x, cut):
    ws = make_schedule(8, [8, 64, 512])
    v, _ = mt_norm(ws, 1, x, 2)
    w, _ = mt_norm(ws, 1, x[:cut], 2)
    assert w <= v


@settings(max_examples=25, deadline=None)
@given(st.lists(st.fractions(-3, 3, max_denominator=4), min_size=1, max_size=8),
       st.lists(st.fractions(-3, 3, max_denominator=4), min_size=1, max_size=8))
def test_subadditive(x, y):
    ws = make_schedule(8, [8, 64, 512])
    L = max(len(x), len(y))
    x = x + [0] * (L - len(x))
    y = y + [0] * (L - len(y))
    s = [a + b for a, b in zip(x, y)]
    assert mt_norm(ws, 1, s, 2)[0] <= mt_norm(ws, 1, x, 2)[0] + mt_norm(ws, 1, y, 2)[0]
