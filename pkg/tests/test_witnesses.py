import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bdlab import stages
from bdlab import witnesses as W
from bdlab.bd_core import BlockVector


def test_schreier_sets():
    assert W.schreier1_partition(1, 3) == [[1], [2, 3], [4, 5, 6, 7]]
    assert W.schreier1_partition(1, 0) == []


@given(st.integers(1, 50), st.integers(0, 6))
def test_schreier_admissible(start, count):
    F = W.schreier1_partition(start, count)
    for A, B in zip(F, F[1:]):
        assert max(A) < min(B)
    assert all(len(A) <= min(A) for A in F)


def test_exact_pair_value_and_clauses(wstage):
    st_, reg = wstage
    p = W.build_exact_pair(st_, reg, 1, 8)
    assert p.exact
    assert min(p.x.supp()) >= 8


def test_rho_interval(wstage):
    st_, reg = wstage
    p = W.build_exact_pair(st_, reg, 2, 8, theta=1, groups=3)
    for rho in (0, Fraction(1, 3), Fraction(1, 2), 1):
        assert W.rho_interval(st_, p, rho)["pass"]


def test_dependent_length_one(wstage):
    st_, reg = wstage
    ds = W.build_dependent_sequence(st_, reg, 1)
    assert st_.node(ds.gammas[0]).j == 1


def test_dependent_length_three_clauses(wstage):
    st_, reg = wstage
    ds = W.build_dependent_sequence(st_, reg, 3)
    assert all(r["pass"] for r in W.dependent_clause_checks(st_, ds))
    assert [st_.node(g).j for g in ds.gammas] == [1, 2, 3]


def test_dependent_estimates_length_four(wstage):
    st_, reg = wstage
    ds = W.build_dependent_sequence(st_, reg, 4)
    assert W.verify_dependent_estimates(st_, ds)["pass"]


@pytest.mark.parametrize("L,expected", [([1], Fraction(1, 8)), ([1, 2], Fraction(1, 4)),
                                        ([1, 2, 3, 4], Fraction(1, 2)), ([2, 4], Fraction(1, 4))])
def test_blowup_values(wstage, L, expected):
    st_, reg = wstage
    ds = W.build_dependent_sequence(st_, reg, 4)
    b = W.blowup_witness(st_, reg, ds, 1, L)
    assert b["value"] == expected and b["exact"]


def test_hi_witness_interleaved(wstage):
    st_, reg = wstage
    ds = W.build_dependent_sequence(st_, reg, 4, families=["X", "Y", "X", "Y"])
    h = W.hi_witness(st_, reg, ds)
    assert h["pass"] and h["difference_grows"]


def test_hi_needs_interleaving(wstage):
    st_, reg = wstage
    ds = W.build_dependent_sequence(st_, reg, 2)
    with pytest.raises(W.WitnessError):
        W.hi_witness(st_, reg, ds)


def test_ris_basis(wstage):
    st_, reg = wstage
    ids = W.place_basis(st_, 2, 10)
    w = W.build_ris(st_, [BlockVector.basis(st_, g) for g in ids], 16)
    assert len(w.vectors) == 10 and w.js[0] == 1
    assert W.check_ris(st_, w)["pass"]
    assert W.verify_ris_estimates(st_, w, 1)["pass"]


def test_ris_single_vector(wstage):
    st_, reg = wstage
    ids = W.place_basis(st_, 2, 1)
    w = W.build_ris(st_, [BlockVector.basis(st_, ids[0])], 16)
    assert W.check_ris(st_, w)["pass"]


def test_ris_clause2_rejected(wstage):
    st_, reg = wstage
    ids = W.place_basis(st_, 2, 3)
    w = W.RISWitness([BlockVector.basis(st_, g) for g in ids], Fraction(16), [1, 2, 3])
    r = W.check_ris(st_, w)
    assert not r["pass"]
    bad = [x for x in r["rows"] if not x["pass"]]
    assert bad[0]["k"] == 1


def test_l1_average_and_lemma(wstage):
    st_, reg = wstage
    ids = W.place_basis(st_, 2, 8)
    xs = [BlockVector.basis(st_, g) for g in ids]
    normers = W.basis_normers(st_, ids)
    la = W.build_l1_average(st_, reg, list(zip(xs, normers)), 8, 8)
    assert la.value == Fraction(1, 8)
    assert all(r["pass"] for r in W.average_on_l1_check(st_, la.y, 8, 8, normers))


def test_l1_certificate_random(wstage):
    st_, reg = wstage
    ids = W.place_basis(st_, 2, 8)
    xs = [BlockVector.basis(st_, g) for g in ids]
    normers = W.basis_normers(st_, ids)
    rng = random.Random(7)
    for _ in range(5):
        idx = sorted(rng.sample(range(8), rng.randint(1, 8)))
        lam = [Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 5)) for _ in idx]
        c = W.l1_certificate(st_, reg, [xs[i] for i in idx], [normers[i] for i in idx], lam)
        assert c["value"] == Fraction(1, 8) * sum(abs(l) for l in lam)


def test_profile_disjoint_pool_zero(wstage):
    st_, reg = wstage
    ids = W.place_basis(st_, 2, 4)
    xs = [BlockVector.basis(st_, g) for g in ids[2:]]
    pr = W.alpha_profile(st_, xs, W.basis_normers(st_, ids[:2]))
    assert all(v == 0 for row in pr["table"] for v in row.values())
    assert W.profile_csv(pr).splitlines()[0] == "k,s>=1"


def test_c0_micro(micro):
    r = W.c0_sm_check(micro, stages.basis_W(micro), 8, 4)
    assert r["pass"] and r["tuples"] > 0


def two_rank_blocks(count, start=8, lead=1):
    from bdlab import bmt
    from bdlab.schedule import flat
    st_ = bmt.new_bmt_stage(flat(), bmt.NThresholds("toy"))
    blocks, normers = [], []
    for i in range(count):
        r = start + 3 * i
        a = W.place_basis(st_, r, 1)[0]
        b = W.place_basis(st_, r + 1, 1, family="Y")[0]
        blocks.append(BlockVector.basis(st_, a, lead) + BlockVector.basis(st_, b))
        normers.append((b, (r, r + 1)))
    return st_, blocks, normers


def test_exact_pair_from_general_blocks():
    st_, blocks, normers = two_rank_blocks(3)
    p = W.build_exact_pair_from_blocks(st_, None, 1, blocks, normers, theta=1, C=3584, groups=2)
    assert p.exact
    assert st_.node(p.chain[1]).avg.kind == "Plain"


def test_exact_pair_short_source():
    st_, blocks, normers = two_rank_blocks(2)
    with pytest.raises(W.WitnessError, match="source blocks"):
        W.build_exact_pair_from_blocks(st_, None, 1, blocks, normers, groups=2)


def test_exact_pair_weak_normer():
    st_, blocks, normers = two_rank_blocks(3, lead=2)
    with pytest.raises(W.WitnessError, match="3/4"):
        W.build_exact_pair_from_blocks(st_, None, 1, blocks, normers, groups=2)
