from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bdlab import bmt
from bdlab.bd_core import BASE, GammaNode, IllegalNode, register_node
from bdlab.schedule import flat, t1


def stage(mode="toy"):
    st_ = bmt.new_bmt_stage(t1(), bmt.NThresholds(mode))
    for q in range(2, 5):
        register_node(st_, bmt.canonical_ageone(st_, q))
    return st_


def test_canonical_accepted():
    st_ = bmt.new_bmt_stage(t1())
    ok, why = bmt.is_legal_bmt_node(None, st_, bmt.canonical_ageone(st_, 2))
    assert ok, why


def test_succ_interval_meeting_pred_window_rejected():
    st_ = stage()
    pred = bmt.canonical_ageone(st_, 2).id
    eta = bmt.canonical_ageone(st_, 3).id
    avg = bmt.AlphaAverage(1, ((1, eta, (2, 3)),), (2, 3), "Plain")
    ok, why = bmt.is_legal_bmt_node(None, st_, GammaNode("succ", 4, 1, pred, avg))
    assert not ok and "(p,q]" in why


def test_denominator_three_rejected_at_rank2():
    st_ = bmt.new_bmt_stage(t1())
    avg = bmt.AlphaAverage(3, ((1, BASE.id, (1, 1)),), (0, 1), "Basic")
    ok, why = bmt.is_legal_bmt_node(None, st_, bmt.ageone(1, avg, 2))
    assert not ok and "does not divide N_2" in why


def test_age_bound():
    ws = flat()
    st_ = bmt.new_bmt_stage(ws, bmt.NThresholds("toy"))
    pred = register_node(st_, bmt.canonical_ageone(st_, 2))
    r = 2
    for _ in range(ws.n(1) - 1):
        r += 2
        eta = register_node(st_, bmt.canonical_ageone(st_, r - 1))
        avg = bmt.AlphaAverage(1, ((1, eta, (r - 1, r - 1)),), (r - 2, r - 1), "Basic")
        pred = register_node(st_, GammaNode("succ", r, 1, pred, avg))
    assert st_.age(pred) == ws.n(1)
    eta = register_node(st_, bmt.canonical_ageone(st_, r + 1))
    avg = bmt.AlphaAverage(1, ((1, eta, (r + 1, r + 1)),), (r, r + 1), "Basic")
    ok, why = bmt.is_legal_bmt_node(None, st_, GammaNode("succ", r + 2, 1, pred, avg))
    assert not ok and "age bound" in why


def test_single_entry_is_projection_functional():
    st_ = stage()
    g = bmt.canonical_ageone(st_, 3).id
    b = bmt.make_alpha_average([(1, g, (2, 3))], 1, (1, 3), "Plain", st_)
    assert b.functional().terms == [(Fraction(1), g, (2, 3))]


def test_d_exceeds_n():
    st_ = stage()
    ids = st_.order[1:4]
    with pytest.raises(bmt.AverageError):
        bmt.make_alpha_average([(1, g, (st_.rank(g), st_.rank(g))) for g in ids], 2, (1, 4), "Plain", st_)


def test_basic_pair_legal():
    st_ = stage()
    a, b = bmt.canonical_ageone(st_, 2).id, bmt.canonical_ageone(st_, 3).id
    avg = bmt.basic_average(st_, [(1, a), (-1, b)])
    assert avg.kind == "Basic" and avg.n == 2


def test_vfg_singleton_and_growth():
    st_ = stage("registered")
    a = bmt.basic_average(st_, [(1, bmt.canonical_ageone(st_, 2).id)], 1)
    assert bmt.is_very_fast_growing([a], st_)[0]
    b = bmt.basic_average(st_, [(1, bmt.canonical_ageone(st_, 4).id)], 1)
    ok, info = bmt.is_very_fast_growing([a, b], st_)
    assert not ok and "<" in info["reason"]


def test_vfg_subsequence():
    st_ = stage("registered")
    big = bmt.least_size(st_, 3)
    a = bmt.basic_average(st_, [(1, BASE.id)], 1)
    b = bmt.AlphaAverage(big, ((1, bmt.canonical_ageone(st_, 4).id, (4, 4)),), (3, 4), "Basic")
    assert bmt.is_very_fast_growing([a, b], st_)[0]
    assert bmt.is_very_fast_growing([b], st_)[0]


# frozen N_q arguments on the 4-node stage: N_2 = 2!, N_3 = (4*2)!, N_4 = (8*3)!
def test_frozen_thresholds():
    st_ = stage("registered")
    assert [bmt.factorial_argument(st_, q) for q in (2, 3, 4)] == [2, 8, 24]
    assert bmt.least_size(st_, 3) == 40320


@given(st.integers(1, 2000), st.integers(0, 30))
def test_divides_factorial_matches_direct(n, M):
    import math
    assert bmt.divides_factorial(n, M) == (math.factorial(M) % n == 0)


@given(st.integers(0, 12), st.integers(1, 10 ** 9))
def test_factorial_at_most(M, s):
    import math
    assert bmt.factorial_at_most(M, s) == (math.factorial(M) <= s)


def test_roundtrip_average():
    st_ = stage()
    avg = bmt.basic_average(st_, [(1, BASE.id)], 2, (0, 3))
    assert bmt.AlphaAverage.from_dict(avg.to_dict()) == avg


def test_illegal_register_raises():
    st_ = stage()
    avg = bmt.AlphaAverage(1, ((1, BASE.id, (1, 1)),), (0, 1), "Basic")
    with pytest.raises(IllegalNode):
        register_node(st_, bmt.ageone(5, avg, 2))
