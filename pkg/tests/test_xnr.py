import json
from fractions import Fraction

import pytest

from bdlab import bmt, xnr
from bdlab import witnesses as W
from bdlab.bd_core import BASE, BlockVector, GammaNode, IllegalNode, estar, evaluate, register_node
from bdlab.stages import witness_stage


def seq_of(st_, ids):
    return [(g, BlockVector.basis(st_, g)) for g in ids]


def test_sigma_first_is_two_and_stable(wstage):
    st_, reg = wstage
    ids = W.place_basis(st_, 2, 2)
    s = seq_of(st_, ids[:1])
    assert xnr.sigma_register(reg, st_, s) == 2
    assert xnr.sigma_register(reg, st_, s) == 2
    assert xnr.sigma_register(reg, st_, seq_of(st_, ids)) == 3


def test_sigma_strict_growth():
    st_, reg = witness_stage("strict")
    g = register_node(st_, W.basis_node(5, "X"))
    v = xnr.sigma_register(reg, st_, seq_of(st_, [g]))
    assert v > 40


def test_registry_replay(tmp_path, wstage):
    st_, _ = wstage
    path = tmp_path / "reg.jsonl"
    reg = xnr.CodingRegistry("toy", str(path))
    ids = W.place_basis(st_, 2, 2)
    xnr.sigma_register(reg, st_, seq_of(st_, ids[:1]))
    xnr.sigma_register(reg, st_, seq_of(st_, ids))
    again = xnr.CodingRegistry("toy", str(path))
    assert again.sigma == reg.sigma
    assert path.read_text() == reg.dumps()


def test_registry_conflict_rejected():
    reg = xnr.CodingRegistry("toy")
    reg.load(json.dumps({"type": "sigma", "key": "[]", "value": 2, "mode": "toy"}))
    with pytest.raises(xnr.CodingError):
        reg.load(json.dumps({"type": "sigma", "key": "[1]", "value": 2, "mode": "toy"}))


def test_incomparability_cases(wstage):
    st_, reg = wstage
    ids = W.place_basis(st_, 2, 2)
    a = xnr.sigma_register(reg, st_, seq_of(st_, ids[:1]))
    b = xnr.sigma_register(reg, st_, seq_of(st_, ids))
    assert xnr.incomparable(reg, 50, 51)
    assert not xnr.incomparable(reg, a, b)
    assert not xnr.incomparable(reg, a, 51)


def test_d1_all_kinds_vacuous(wstage):
    st_, reg = wstage
    ds = W.build_dependent_sequence(st_, reg, 2)
    p = ds.pairs[1]
    res = xnr.classify_pairs(reg, st_, [(p.gamma, p.x.ran())], [1], 1)
    assert set(res["kinds"]) == {"IC", "CO", "IR"}


def test_unregistered_weights_ic(wstage):
    st_, reg = wstage
    g5 = register_node(st_, W.basis_node(6, "X"))
    a = register_node(st_, GammaNode("ageone", 8, 5, None,
                                     bmt.AlphaAverage(1, ((1, g5, (6, 6)),), (0, 7), "Basic")))
    b = register_node(st_, GammaNode("ageone", 10, 6, None,
                                     bmt.AlphaAverage(1, ((1, g5, (6, 6)),), (0, 9), "Basic")))
    res = xnr.classify_pairs(reg, st_, [(a, (7, 8)), (b, (9, 10))], [1, 1], 2)
    assert "IC" in res["kinds"]


def test_dependent_pairs_are_co(wstage):
    st_, reg = wstage
    ds = W.build_dependent_sequence(st_, reg, 3)
    pairs = [(p.gamma, p.x.ran()) for p in ds.pairs]
    res = xnr.classify_pairs(reg, st_, pairs, [1, -1, 1], 3)
    assert "CO" in res["kinds"] and "IC" not in res["kinds"]
    assert res["certificates"]["CO"]["k"] == [1, 2, 3]


def test_select_homogeneous_ic_input(wstage):
    st_, reg = wstage
    g = register_node(st_, W.basis_node(6, "X"))
    ids = []
    for r, j in ((8, 2), (10, 3), (12, 4)):
        ids.append(register_node(st_, GammaNode("ageone", r, j, None,
                                                bmt.AlphaAverage(1, ((1, g, (6, 6)),), (0, r - 1), "Basic"))))
    pairs = [(x, (st_.rank(x), st_.rank(x))) for x in ids]
    sub, kind = xnr.select_homogeneous(reg, st_, pairs)
    assert kind == "IC" and sub == pairs


def test_evaluation_analysis_exact(t1_stage):
    for g in t1_stage.order:
        if t1_stage.node(g).j is None:
            continue
        ea = xnr.evaluation_analysis(t1_stage, g)
        assert ea.residual_zero and all(ea.partial_ok)


def test_age_one_identity(t1_stage):
    g = bmt.canonical_ageone(t1_stage, 3).id
    ea = xnr.evaluation_analysis(t1_stage, g)
    assert ea.chain == [g] and ea.residual_zero


def test_build_from_vfg_roundtrip(wstage):
    st_, reg = wstage
    ids = W.place_basis(st_, 2, 3)
    vfg = W.basis_normers(st_, ids)
    g = xnr.build_gamma_from_vfg(None, st_, reg, 1, vfg)
    ea = xnr.evaluation_analysis(st_, g)
    assert ea.averages == vfg and len(ea.chain) == 3


def test_build_single_canonical(wstage):
    st_, reg = wstage
    b = bmt.AlphaAverage(1, ((1, BASE.id, (1, 1)),), (0, 1), "Basic")
    g = xnr.build_gamma_from_vfg(None, st_, reg, 1, [b])
    assert g == bmt.canonical_ageone(st_, 2).id


def test_build_reports_position(wstage):
    st_, reg = wstage
    ids = W.place_basis(st_, 2, 2)
    vfg = W.basis_normers(st_, ids)
    with pytest.raises(IllegalNode, match="r=1"):
        xnr.build_gamma_from_vfg(None, st_, reg, 3, vfg, [2, 5])


def test_plain_rejected(wstage):
    st_, reg = wstage
    avg = bmt.AlphaAverage(1, ((1, BASE.id, (1, 1)),), (0, 1), "Plain")
    ok, why = xnr.is_legal_xnr_node(None, st_, reg, bmt.ageone(1, avg, 2))
    assert not ok and "not conditional" in why


def test_succ_size_clause_registered():
    st_, reg = witness_stage()
    st_.thresholds = bmt.NThresholds("registered")
    p = register_node(st_, bmt.canonical_ageone(st_, 2))
    eta = register_node(st_, bmt.canonical_ageone(st_, 3))
    avg = bmt.AlphaAverage(1, ((1, eta, (3, 3)),), (2, 3), "Basic")
    ok, why = xnr.is_legal_xnr_node(None, st_, reg, GammaNode("succ", 4, 1, p, avg))
    assert not ok and "size clause" in why
    avg = bmt.AlphaAverage(bmt.least_size(st_, 2), ((1, eta, (3, 3)),), (2, 3), "Basic")
    assert xnr.is_legal_xnr_node(None, st_, reg, GammaNode("succ", 4, 1, p, avg))[0]


def test_ramsey_chain_collapses(wstage):
    st_, reg = wstage
    ids = W.place_basis(st_, 2, 3)
    g = xnr.build_gamma_from_vfg(None, st_, reg, 1, W.basis_normers(st_, ids))
    chain = xnr.analysis_chain(st_, g)
    assert len(xnr.ramsey_basis_select(st_, chain)) == 1
    assert xnr.ramsey_basis_select(st_, ids) == ids


def test_partial_form_t1(wstage):
    st_, reg = wstage
    ids = W.place_basis(st_, 2, 3)
    g = xnr.build_gamma_from_vfg(None, st_, reg, 1, W.basis_normers(st_, ids))
    ea = xnr.evaluation_analysis(st_, g)
    x = BlockVector.basis(st_, ids[2])
    assert evaluate(st_, estar(g), x) == Fraction(1, 8)
    assert ea.partial_ok == [True, True]
