from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bdlab import bmt
from bdlab.bd_core import (BASE, BlockVector, IllegalNode, check_extension_bound,
                           coordinate, dstar, dump_stage, estar, evaluate,
                           horizon_norm, load_into, project, register_node)
from bdlab.schedule import t1


@pytest.fixture
def small():
    st = bmt.new_bmt_stage(t1(), bmt.NThresholds("toy"))
    for q in range(2, 5):
        register_node(st, bmt.canonical_ageone(st, q))
    return st


def test_base_id_unique(small):
    assert small.by_rank[1] == [BASE.id]


def test_canonical_coordinate_is_one_eighth(small):
    g = bmt.canonical_ageone(small, 2).id
    assert coordinate(small, g, BASE.id) == Fraction(1, 8)


def test_biorthogonality(small):
    for g in small.order:
        assert coordinate(small, g, g) == 1
        assert evaluate(small, dstar(small, g), BlockVector.basis(small, g)) == 1


def test_higher_rank_coordinate_zero(small):
    g2 = bmt.canonical_ageone(small, 2).id
    g3 = bmt.canonical_ageone(small, 3).id
    assert coordinate(small, g2, g3) == 0


def test_cstar_linearity(small):
    g = bmt.canonical_ageone(small, 2).id
    assert evaluate(small, small.cstar(g), BlockVector.basis(small, BASE.id, 3)) == Fraction(3, 8)


def test_projection_kills_disjoint(small):
    g = bmt.canonical_ageone(small, 3).id
    x = BlockVector.basis(small, BASE.id)
    assert evaluate(small, estar(g, (2, 4)), x) == 0
    assert project(x, (2, 4)).is_zero()
    assert project(x, (1, 4)) == x


def test_horizon_norm_examples(small):
    lo, hi = horizon_norm(small, BlockVector.basis(small, BASE.id), 3)
    assert lo >= 1 and hi == 2 * lo
    assert horizon_norm(small, BlockVector(), 3) == (0, 0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(-5, 5, max_denominator=7), min_size=4, max_size=4), st.integers(-4, 4))
def test_horizon_homogeneous(coefs, t):
    st_ = bmt.new_bmt_stage(t1(), bmt.NThresholds("toy"))
    for q in range(2, 5):
        register_node(st_, bmt.canonical_ageone(st_, q))
    x = BlockVector.of(st_, dict(zip(st_.order, coefs)))
    lo, hi = horizon_norm(st_, x, 4)
    lo2, hi2 = horizon_norm(st_, x.scale(t), 4)
    assert (lo2, hi2) == (abs(t) * lo, abs(t) * hi)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(-3, 3, max_denominator=5), min_size=4, max_size=4),
       st.tuples(st.integers(1, 4), st.integers(1, 4)), st.tuples(st.integers(1, 4), st.integers(1, 4)))
def test_projections_compose(coefs, E, F):
    st_ = bmt.new_bmt_stage(t1(), bmt.NThresholds("toy"))
    for q in range(2, 5):
        register_node(st_, bmt.canonical_ageone(st_, q))
    x = BlockVector.of(st_, dict(zip(st_.order, coefs)))
    E, F = tuple(sorted(E)), tuple(sorted(F))
    meet = (max(E[0], F[0]), min(E[1], F[1]))
    lhs = project(project(x, F), E)
    rhs = project(x, meet) if meet[0] <= meet[1] else BlockVector()
    assert lhs == rhs


def test_extension_bound_base_column(small):
    r = check_extension_bound(small, 1, 4)
    assert r["max_row_mass"] <= 1 + small.schedule.inverse_sum() and r["pass"]


def test_extension_rows_within_q_are_one(small):
    r = check_extension_bound(small, 4, 4)
    assert r["max_row_mass"] == 1


def test_empty_registry_max_one():
    st_ = bmt.new_bmt_stage(t1(), bmt.NThresholds("toy"))
    assert check_extension_bound(st_, 1, 1)["max_row_mass"] == 1


def test_unregistered_reference_rejected(small):
    avg = bmt.AlphaAverage(1, ((1, "nope", (1, 1)),), (0, 1), "Basic")
    with pytest.raises(IllegalNode):
        register_node(small, bmt.ageone(1, avg, 2))


def test_dump_load_roundtrip(small):
    text = dump_stage(small)
    fresh = bmt.new_bmt_stage(t1(), bmt.NThresholds("toy"))
    load_into(fresh, text)
    assert fresh.order == small.order
    assert dump_stage(fresh) == text
