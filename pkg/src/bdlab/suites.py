"""Verification suites; each returns a report dict with a top-level "pass"."""
from __future__ import annotations

import random
from fractions import Fraction

from . import bd_core, selfdet, stages, xnr
from . import witnesses as W
from .bd_core import BlockVector
from .mixed_tsirelson import check_scc_lemma
from .schedule import t1


def analysis(max_rank: int = 10) -> dict:
    st = stages.t1_scripted_stage(max_rank)
    bad = []
    checked = 0
    for g in st.order:
        if st.node(g).j is None:
            continue
        ea = xnr.evaluation_analysis(st, g)
        checked += 1
        if not ea.residual_zero or not all(ea.partial_ok):
            bad.append(g)
    return {"nodes": len(st), "max_rank": st.max_rank(), "analysed": checked,
            "thresholds": st.thresholds.mode, "failures": bad, "pass": not bad and len(st) >= 50}


def tri_agreement(st, fam, Q: int = 6) -> dict:
    rows = []
    for sp in fam.specs:
        per_q = [selfdet.check_self_determined(st, sp, q) for q in range(1, Q + 1)]
        last = per_q[-1]
        negative = sp.tag in fam.negatives
        row = {"tag": sp.tag, "members": last["members"], "agree_all_q": all(v["agree"] for v in per_q),
               "self_determined": last["self_determined"], "negative": negative,
               "witness": last["witness"]}
        row["pass"] = row["agree_all_q"] and (not negative or (not last["self_determined"] and last["witness"] is not None))
        rows.append(row)
    return {"Q": Q, "specs": rows, "pass": len(rows) >= 10 and all(r["pass"] for r in rows)}


def section1(upto: int = 4, seed: int = 0, Q_agree: int = 6) -> dict:
    st = stages.micro_stage()
    fam = stages.subset_family(st, seed)
    tri = tri_agreement(st, fam, Q_agree)
    suites = []
    for sp in fam.specs:
        if sp.tag in ("full", "canonical", "xnr", "closure0"):
            r = selfdet.verify_section1_suite(st, sp, upto)
            suites.append({"tag": sp.tag, "S": r["S"], "items": r["items"], "pass": r["pass"]})
    neg = [sp for sp in fam.specs if sp.tag in fam.negatives][0]
    rn = selfdet.verify_section1_suite(st, neg, upto)
    ext = [bd_core.check_extension_bound(st, q, upto) for q in range(2, upto + 1)]
    return {"stage_nodes": len(st.ids_upto(upto)), "upto": upto, "tri_agreement": tri,
            "quotient_suites": suites,
            "negative_suite": {"tag": neg.tag, "pass": rn["pass"],
                               "failing_items": sorted(k for k, v in rn["items"].items() if not v["pass"])},
            "extension": ext,
            "pass": tri["pass"] and all(s["pass"] for s in suites) and not rn["pass"]
                    and all(e["pass"] for e in ext)}


def mt(up_to_k: int = 32) -> dict:
    return check_scc_lemma(t1(), 1, up_to_k)


def ris(C=16) -> dict:
    st, reg = stages.witness_stage()
    ids = W.place_basis(st, 2, 12, 2)
    w = W.build_ris(st, [BlockVector.basis(st, g) for g in ids], C)
    chk = W.check_ris(st, w)
    est = W.verify_ris_estimates(st, w, 1)
    return {"length": len(w.vectors), "js": w.js, "check": chk, "estimates": est,
            "pass": chk["pass"] and est["pass"]}


def depseq(length: int = 4, theta=1, C=3584) -> dict:
    st, reg = stages.witness_stage()
    fams = ["X", "Y"] * (length // 2) + ["X"] * (length % 2)
    ds = W.build_dependent_sequence(st, reg, length, theta, C, fams)
    est = W.verify_dependent_estimates(st, ds)
    bl = W.blowup_witness(st, reg, ds)
    hi = W.hi_witness(st, reg, ds) if length >= 2 else {"pass": True}
    return {"weights": [st.node(g).j for g in ds.gammas], "estimates": est, "blowup": bl, "hi": hi,
            "registry": reg.dumps().splitlines(),
            "pass": est["pass"] and bl["pass"] and hi["pass"]}


def c0sm(C=8, nmax: int = 4) -> dict:
    st = stages.micro_stage()
    return W.c0_sm_check(st, stages.basis_W(st), C, nmax)


def l1(seed: int = 0, trials: int = 10) -> dict:
    st, reg = stages.witness_stage()
    ids = W.place_basis(st, 2, 16, 2)
    xs = [BlockVector.basis(st, g) for g in ids]
    normers = W.basis_normers(st, ids)
    rng = random.Random(seed)
    rows = []
    for _ in range(trials):
        a = rng.randint(1, st.schedule.n(1))
        idx = sorted(rng.sample(range(len(ids)), a))
        lam = [Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 9)) for _ in idx]
        c = W.l1_certificate(st, reg, [xs[i] for i in idx], [normers[i] for i in idx], lam)
        rows.append({"indices": idx, "lambdas": lam, "value": c["value"], "expected": c["expected"],
                     "pass": c["pass"]})
    return {"trials": rows, "pass": all(r["pass"] for r in rows)}


SUITES = {"analysis": analysis, "section1": section1, "mt": mt, "ris": ris,
          "depseq": depseq, "c0sm": c0sm, "l1": l1}


def run_all(seed: int = 0, upto: int = 4) -> dict:
    out = {"analysis": analysis(), "section1": section1(upto, seed), "mt": mt(), "ris": ris(),
           "depseq": depseq(), "c0sm": c0sm(), "l1": l1(seed)}
    out["pass"] = all(v["pass"] for v in out.values())
    return out
