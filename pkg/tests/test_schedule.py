from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bdlab.schedule import (ScheduleError, flat, make_schedule, schedule_from_config,
                            t1, validate_strict)


def test_t1_values():
    ws = t1()
    assert (ws.m(1), ws.n(1), ws.m(2), ws.n(2)) == (8, 64, 64, 4096)


def test_base_below_eight_rejected():
    with pytest.raises(ScheduleError):
        make_schedule(7, {"kind": "power"})


def test_n_below_m_rejected():
    with pytest.raises(ScheduleError):
        make_schedule(8, [4, 4096])


def test_factor_rule_and_strict_failures():
    ws = make_schedule(8, {"kind": "power", "factor": 4, "exponent": 1})
    assert ws.n(1) == 32
    rep = validate_strict(make_schedule(8, {"kind": "power", "factor": 4, "exponent": 1}, "strict"), 3)
    assert not rep["ok"] and rep["failed"]


def test_t1_item_a_passes_depth3():
    rep = validate_strict(t1(), 3)
    assert all(c["pass"] for c in rep["checks"] if c["item"] == "a")


def test_t1_item_c_at_2_flagged():
    rep = validate_strict(t1(), 3)
    c = [c for c in rep["checks"] if c["item"] == "c" and c["indices"] == [1, 2]][0]
    assert c["lhs"] == 4096 and c["rhs"] == 262144 and not c["pass"]
    assert not c["enforced"]


def test_depth_zero_empty():
    rep = validate_strict(t1(), 0)
    assert rep["checks"] == [] and rep["ok"]


def test_config_roundtrip():
    for ws in (t1(), flat(), make_schedule(8, [8, 64, 512])):
        assert schedule_from_config(ws.to_config()) == ws


@given(st.integers(1, 30))
def test_tail_sums_closed_form(i):
    ws = t1()
    partial = sum(Fraction(1, ws.m(j)) for j in range(i + 1, i + 40))
    assert partial < ws.tail_sum(i)
    assert ws.tail_sum(i) - partial < Fraction(1, 8 ** (i + 39))
