"""Self-determined subsets, the restriction R, and quotient stages.

All verdicts are relative to the registered population up to a horizon Q.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import linalg
from .bd_core import (BlockVector, GammaNode, SpaceStage, StageError, dstar,
                      estar, evaluate, extension_columns, in_interval,
                      register_node)


class SelfDetError(StageError):
    pass


@dataclass
class SubsetSpec:
    """Gamma' given by a predicate over (stage, id); the trace is materialized on demand."""
    tag: str
    predicate: Callable = field(repr=False)

    def contains(self, stage: SpaceStage, gid: str) -> bool:
        return bool(self.predicate(stage, gid))

    def members(self, stage: SpaceStage, Q: int | None = None) -> list:
        Q = stage.max_rank() if Q is None else Q
        return [g for g in stage.ids_upto(Q) if self.contains(stage, g)]

    def trace(self, stage: SpaceStage, Q: int | None = None) -> dict:
        out = {}
        for g in self.members(stage, Q):
            out.setdefault(stage.rank(g), []).append(g)
        return out

    def S(self, stage: SpaceStage, Q: int | None = None) -> list:
        return sorted(self.trace(stage, Q))

    def to_dict(self, stage: SpaceStage, Q: int | None = None) -> dict:
        return {"tag": self.tag, "trace": {str(q): ids for q, ids in sorted(self.trace(stage, Q).items())}}

    @classmethod
    def from_ids(cls, tag: str, ids) -> "SubsetSpec":
        ids = frozenset(ids)
        return cls(tag, lambda st, g: g in ids)

    @classmethod
    def full(cls) -> "SubsetSpec":
        return cls("full", lambda st, g: True)


# ---------------------------------------------------------------- the three conditions

def check_self_determined(stage: SpaceStage, spec: SubsetSpec, Q: int | None = None) -> dict:
    Q = stage.max_rank() if Q is None else Q
    inside = set(spec.members(stage, Q))
    ids = stage.ids_upto(Q)
    # (d) e*_eta(d_gamma) = 0 for eta inside, gamma outside
    wd = None
    for eta in ids:
        if eta not in inside:
            continue
        for g, v in stage.row(eta).items():
            if g not in inside and v != 0:
                wd = {"gamma": g, "eta": eta, "value": v}
                break
        if wd:
            break
    # (e) c*_eta(d_gamma) = 0, evaluated through the extension functional itself
    we = None
    outside = [g for g in ids if g not in inside]
    for eta in ids:
        if eta not in inside or we:
            continue
        cs = stage.cstar(eta)
        for g in outside:
            if stage.rank(g) >= stage.rank(eta):
                continue
            v = evaluate(stage, cs, BlockVector.basis(stage, g))
            if v != 0:
                we = {"gamma": g, "eta": eta, "value": v}
                break
    # (b) span{d*} = span{e*} over Gamma'_q for every q
    wb = None
    for q in sorted({stage.rank(g) for g in inside}):
        members = [g for g in ids if g in inside and stage.rank(g) <= q]
        order = stage.ids_upto(q)
        drows = [{g: Fraction(1)} for g in members]
        erows = [stage.row(g) for g in members]
        if not linalg.same_span(drows, erows, order):
            wb = {"q": q}
            break
    d_ok, e_ok, b_ok = wd is None, we is None, wb is None
    return {
        "tag": spec.tag, "Q": Q, "relative_to_registered": True,
        "members": len(inside), "registered": len(ids),
        "d": d_ok, "e": e_ok, "b": b_ok,
        "agree": d_ok == e_ok == b_ok,
        "self_determined": d_ok and e_ok and b_ok,
        "witness": wd or we,
        "witness_b": wb,
    }


# ---------------------------------------------------------------- quotient

def _reindex(S: list, E):
    """E' = {s : q_s in E}, 1-based, or None when empty."""
    ss = [i + 1 for i, q in enumerate(S) if in_interval(q, E)]
    return (ss[0], ss[-1]) if ss else None


def quotient_stage(stage: SpaceStage, spec: SubsetSpec, Q: int | None = None, force: bool = False) -> SpaceStage:
    Q = stage.max_rank() if Q is None else Q
    if not force:
        verdict = check_self_determined(stage, spec, Q)
        if not verdict["self_determined"]:
            raise SelfDetError(f"subset {spec.tag} is not self-determined up to rank {Q}: {verdict['witness']}")
    members = spec.members(stage, Q)
    inside = set(members)
    S = sorted({stage.rank(g) for g in members})
    pos = {q: i + 1 for i, q in enumerate(S)}
    qs = SpaceStage(stage.schedule, "quotient")
    qs.S = S
    qs.parent_tag = spec.tag
    for g in members:
        terms = stage.cstar_terms(g)
        if all(eta in inside for _, eta, _ in terms):
            new = []
            for c, eta, E in terms:
                E2 = _reindex(S, E)
                if E2 is not None:
                    new.append((c, eta, E2))
        else:
            # c'*(d'_xi) = c*(d_xi); write it through the d'* atoms of earlier members
            cs = stage.cstar(g)
            new = []
            for xi in members:
                if stage.rank(xi) >= stage.rank(g):
                    continue
                v = evaluate(stage, cs, BlockVector.basis(stage, xi))
                if v:
                    s = pos[stage.rank(xi)]
                    new.append((v, xi, (s, s)))
        register_node(qs, GammaNode("generic", pos[stage.rank(g)], terms=tuple(new), label=g))
    return qs


def restrict(stage: SpaceStage, spec: SubsetSpec, x: BlockVector, quotient: SpaceStage | None = None,
             Q: int | None = None) -> BlockVector:
    """R(d_gamma) = d'_gamma inside Gamma', 0 outside."""
    if quotient is None:
        quotient = quotient_stage(stage, spec, Q)
    keep = {g: v for g, v in x.coeffs.items() if g in quotient}
    return BlockVector.of(quotient, keep)


# ---------------------------------------------------------------- identities

def _apply_R(qs: SpaceStage, coeffs: dict) -> dict:
    return {g: v for g, v in coeffs.items() if g in qs and v != 0}


def _coords(stage: SpaceStage, coeffs: dict, ids) -> dict:
    out = {}
    for z in ids:
        row = stage.row(z)
        s = sum((v * row.get(x, 0) for x, v in coeffs.items()), Fraction(0))
        if s:
            out[z] = s
    return out


def verify_section1_suite(stage: SpaceStage, spec: SubsetSpec, Q: int | None = None, force: bool = True) -> dict:
    Q = stage.max_rank() if Q is None else Q
    verdict = check_self_determined(stage, spec, Q)
    qs = quotient_stage(stage, spec, Q, force=force)
    inside = set(qs.order)
    S = qs.S
    ids = stage.ids_upto(Q)
    items = {}

    # (1) i_q of the complement coordinates spans exactly the complement basis vectors
    w = None
    for q in stage.ranks():
        if q > Q:
            break
        cols = extension_columns(stage, q)
        outside = [g for g in stage.ids_upto(q) if g not in inside]
        if not outside:
            continue
        lhs = [cols[g] for g in outside]
        rhs = [{g: Fraction(1)} for g in outside]
        if not linalg.same_span(lhs, rhs, stage.ids_upto(q)):
            w = {"q": q}
            break
    items["complement_subspace"] = {"pass": w is None, "witness": w}

    # (2) R o i_{q_s} = i'_{q_s} o r'_{q_s} on the full basis of l_inf(Gamma_{q_s})
    w = None
    for s, q in enumerate(S, 1):
        cols = extension_columns(stage, q)
        qcols = extension_columns(qs, s)
        for eta in stage.ids_upto(q):
            lhs = _apply_R(qs, cols[eta])
            rhs = qcols[eta] if eta in inside else {}
            if lhs != rhs:
                w = {"s": s, "q": q, "eta": eta}
                break
        if w:
            break
    items["commute"] = {"pass": w is None, "witness": w}

    # (3) restriction identities (i)-(v) and the projection identity
    fails = []
    for xi in ids:
        xv = BlockVector.basis(stage, xi)
        Rx = BlockVector.of(qs, {xi: Fraction(1)}) if xi in inside else BlockVector()
        for g in qs.order:
            orig = stage.row(g).get(xi, Fraction(0))
            quot = qs.row(g).get(xi, Fraction(0)) if xi in inside else Fraction(0)
            if xi in inside and orig != quot:
                fails.append(["i", g, xi])
            if xi not in inside and orig != 0:
                fails.append(["ii", g, xi])
            if orig != quot:
                fails.append(["iii", g, xi])
            if evaluate(qs, dstar(qs, g), Rx) != evaluate(stage, dstar(stage, g), xv):
                fails.append(["iv", g, xi])
            if evaluate(qs, qs.cstar(g), Rx) != evaluate(stage, stage.cstar(g), xv):
                fails.append(["v", g, xi])
    for g in qs.order:
        for xi in qs.order:
            xv = BlockVector.basis(stage, xi)
            xq = BlockVector.basis(qs, xi)
            for a in range(1, Q + 1):
                for b in range(a, Q + 1):
                    E2 = _reindex(S, (a, b))
                    lhs = evaluate(stage, estar(g, (a, b)), xv)
                    rhs = evaluate(qs, estar(g, E2), xq) if E2 else Fraction(0)
                    if lhs != rhs:
                        fails.append(["projection", g, xi, [a, b]])
    items["restriction"] = {"pass": not fails, "witness": fails[:5], "failures": len(fails)}

    # (4) compatibility of the quotient extension operators
    w = None
    qcols = {s: extension_columns(qs, s) for s in range(1, len(S) + 1)}
    for s in range(1, len(S) + 1):
        for t in range(s + 1, len(S) + 1):
            ids_t = qs.ids_upto(t)
            for eta in qs.ids_upto(s):
                v = qcols[s][eta]
                r = _coords(qs, v, ids_t)
                back = {}
                for z, c in r.items():
                    for x, a in qcols[t][z].items():
                        nv = back.get(x, 0) + c * a
                        if nv:
                            back[x] = nv
                        else:
                            back.pop(x)
                if back != v:
                    w = {"s": s, "t": t, "eta": eta}
                    break
            if w:
                break
        if w:
            break
    items["compatibility"] = {"pass": w is None, "witness": w}

    # (5) ker R = span{d_xi : xi outside}
    rows = [stage.row(g) for g in ids if g in inside]
    rows = [{x: v for x, v in r.items() if x in set(ids)} for r in rows]
    null = linalg.nullspace(rows, ids)
    outside = [{g: Fraction(1)} for g in ids if g not in inside]
    ok = linalg.same_span(null, outside, ids) if (null or outside) else True
    items["kernel"] = {"pass": ok, "nullity": len(null), "outside": len(outside)}

    return {"tag": spec.tag, "Q": Q, "S": S, "self_determined": verdict,
            "items": items, "pass": all(v["pass"] for v in items.values())}
