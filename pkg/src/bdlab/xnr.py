"""The conditional layer: coding registry, comparability of weight indices,
classification of averages, legality of nodes, evaluation analysis, and the
builder of nodes from very fast growing sequences.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from fractions import Fraction

from . import bmt
from .bd_core import (BASE, BlockVector, GammaNode, IllegalNode, SpaceStage,
                      StageError, dstar, estar, evaluate, fstr, in_interval,
                      register_node)

IR_THRESHOLD = 16000


class CodingError(ValueError):
    pass


# ---------------------------------------------------------------- coding registry

def _vec_key(x) -> dict:
    coeffs = x.coeffs if isinstance(x, BlockVector) else x
    return {g: fstr(coeffs[g]) for g in sorted(coeffs) if coeffs[g] != 0}


def canonical_key(seq) -> str:
    """Content-based serialization of a finite sequence of (node id, vector) pairs."""
    return json.dumps([[g, _vec_key(x)] for g, x in seq], sort_keys=True, separators=(",", ":"))


def _parse_key(key: str) -> list:
    return [(g, {h: Fraction(v) for h, v in c.items()}) for g, c in json.loads(key)]


def key_digest(key: str) -> str:
    return hashlib.sha256(key.encode()).hexdigest()[:16]


class CodingRegistry:
    """Append-only log of sigma assignments and declared special sequences.

    Records are one JSON object per line:
      {"type": "sigma", "key": ..., "value": n, "mode": ...}
      {"type": "special", "key": ...}
    """

    def __init__(self, mode: str = "toy", path: str | None = None):
        if mode not in ("toy", "strict"):
            raise CodingError(f"unknown coding mode {mode!r}")
        self.mode = mode
        self.path = path
        self.sigma: dict = {}
        self.inverse: dict = {}
        self.specials: list = []
        self.records: list = []
        if path and os.path.exists(path):
            with open(path) as fh:
                self.load(fh.read(), persist=False)

    def _append(self, rec: dict, persist=True):
        self.records.append(rec)
        if self.path and persist:
            with open(self.path, "a") as fh:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")

    def load(self, text: str, persist=True):
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            if rec["type"] == "sigma":
                k, v = rec["key"], int(rec["value"])
                if k in self.sigma:
                    if self.sigma[k] != v:
                        raise CodingError(f"conflicting sigma values for one sequence: {self.sigma[k]} vs {v}")
                    continue
                if v in self.inverse:
                    raise CodingError(f"sigma value {v} assigned twice")
                self.sigma[k] = v
                self.inverse[v] = k
            elif rec["type"] == "special":
                if rec["key"] in self.specials:
                    continue
                self.specials.append(rec["key"])
            self._append(rec, persist)

    def dumps(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records)

    def value_of(self, key: str):
        return self.sigma.get(key)

    def preimage(self, v: int):
        return self.inverse.get(v)

    def vectors(self, key: str) -> list:
        return _parse_key(key)

    def prefixes(self, key: str) -> list:
        seq = json.loads(key)
        return [json.dumps(seq[:t], sort_keys=True, separators=(",", ":")) for t in range(1, len(seq) + 1)]

    def special_tree(self) -> list:
        """All elements of the tree: declared special sequences and their initial segments."""
        out, seen = [], set()
        for k in self.specials:
            for p in self.prefixes(k):
                if p not in seen:
                    seen.add(p)
                    out.append(p)
        return out


def q_violations(stage: SpaceStage, seq) -> list:
    v = []
    if not seq:
        v.append("empty sequence")
    prev_max = None
    for i, (g, x) in enumerate(seq, 1):
        if g not in stage:
            v.append(f"pair {i}: unregistered node {g}")
            continue
        xv = x if isinstance(x, BlockVector) else BlockVector.of(stage, x)
        if xv.is_zero():
            v.append(f"pair {i}: zero vector")
            continue
        lo, hi = xv.ran()
        if stage.rank(g) < lo:
            v.append(f"pair {i}: rank(gamma) = {stage.rank(g)} < min ran x = {lo}")
        if stage.node(g).j is None:
            v.append(f"pair {i}: node carries no weight")
        if prev_max is not None and not prev_max < lo:
            v.append(f"pair {i}: vectors not successive")
        prev_max = hi
    return v


def sigma_register(reg: CodingRegistry, stage: SpaceStage, seq) -> int:
    """Least unused admissible natural; the same sequence always gets the same value."""
    key = canonical_key(seq)
    if key in reg.sigma:
        return reg.sigma[key]
    v = q_violations(stage, seq)
    if v:
        raise CodingError("invalid coding element: " + "; ".join(v))
    lo = 2
    if reg.mode == "strict":
        g, x = seq[-1]
        xv = x if isinstance(x, BlockVector) else BlockVector.of(stage, x)
        lo = max(lo, stage.schedule.m(stage.node(g).j) * xv.ran()[1] + 1)
    val = lo
    while val in reg.inverse:
        val += 1
    reg.sigma[key] = val
    reg.inverse[val] = key
    reg._append({"type": "sigma", "key": key, "value": val, "mode": reg.mode})
    return val


def special_violations(reg: CodingRegistry, stage: SpaceStage, seq) -> list:
    v = q_violations(stage, seq)
    if v:
        return v
    js = [stage.node(g).j for g, _ in seq]
    if js[0] != 1:
        v.append(f"first weight index is {js[0]}, must be 1")
    for k in range(2, len(seq) + 1):
        want = reg.value_of(canonical_key(seq[:k - 1]))
        if want is None:
            v.append(f"prefix of length {k - 1} has no sigma value")
        elif js[k - 1] != want:
            v.append(f"pair {k}: weight index {js[k - 1]} != sigma(prefix) = {want}")
    if any(a >= b for a, b in zip(js, js[1:])):
        v.append("weights not strictly decreasing")
    return v


def declare_special(reg: CodingRegistry, stage: SpaceStage, seq) -> str:
    v = special_violations(reg, stage, seq)
    if v:
        raise CodingError("not a special sequence: " + "; ".join(v))
    key = canonical_key(seq)
    if key not in reg.specials:
        reg.specials.append(key)
        reg._append({"type": "special", "key": key})
    return key


def is_prefix(a: str, b: str) -> bool:
    sa, sb = json.loads(a), json.loads(b)
    return len(sa) <= len(sb) and sb[:len(sa)] == sa


def incomparable(reg: CodingRegistry, i: int, j: int) -> bool:
    if i < 2 or j < 2 or i == j:
        raise CodingError(f"incomparability needs distinct naturals >= 2, got {i}, {j}")
    a, b = reg.preimage(i), reg.preimage(j)
    if a is None and b is None:
        return True
    if a is None or b is None:
        return False
    return not (is_prefix(a, b) or is_prefix(b, a))


def _weight_incomparable(reg, i, j) -> bool:
    # index 1 is never a coding value; treat it as comparable to everything
    if i < 2 or j < 2:
        return False
    return incomparable(reg, i, j)


# ---------------------------------------------------------------- classification

def pair_violations(stage: SpaceStage, pairs, n) -> list:
    v = []
    js = []
    for i, (g, E) in enumerate(pairs, 1):
        if g not in stage:
            v.append(f"pair {i}: unregistered node {g}")
            continue
        if stage.rank(g) < E[0]:
            v.append(f"pair {i}: rank(gamma) < min E")
        js.append(stage.node(g).j)
    if any(j is None for j in js):
        v.append("a node without weight")
    elif any(a >= b for a, b in zip(js, js[1:])):
        v.append("weights not strictly decreasing")
    for i in range(1, len(pairs)):
        if not pairs[i - 1][1][1] < pairs[i][1][0]:
            v.append(f"intervals {i}, {i + 1} not successive")
    if len(pairs) > n:
        v.append(f"d = {len(pairs)} > n = {n}")
    return v


def _match_special(reg, stage, key, js):
    """Indices k_1<...<k_d of the tree element `key` whose weights match js, or None."""
    seq = reg.vectors(key)
    wk = {}
    for k, (g, _) in enumerate(seq, 1):
        if g in stage:
            wk.setdefault(stage.node(g).j, k)
    ks = [wk.get(j) for j in js]
    if any(k is None for k in ks) or any(a >= b for a, b in zip(ks, ks[1:])):
        return None
    return ks, seq


def _evals(stage, pairs, seq, ks):
    out = []
    for (g, E), k in zip(pairs, ks):
        x = BlockVector.of(stage, seq[k - 1][1])
        out.append(evaluate(stage, estar(g, E), x))
    return out


def classify_pairs(reg: CodingRegistry, stage: SpaceStage, pairs, signs, n: int) -> dict:
    """All kinds among IC, CO, IR whose clauses hold, each with its certificate."""
    pairs = [(g, tuple(E)) for g, E in pairs]
    v = pair_violations(stage, pairs, n)
    if v:
        raise CodingError("; ".join(v))
    d = len(pairs)
    js = [stage.node(g).j for g, _ in pairs]
    kinds, certs = [], {}
    if all(_weight_incomparable(reg, a, b) for x, a in enumerate(js) for b in js[x + 1:]):
        kinds.append("IC")
        certs["IC"] = {"indices": js}
    alternating = all(signs[i] == -signs[i + 1] for i in range(d - 1))
    co = ir = None
    for key in reg.special_tree():
        m = _match_special(reg, stage, key, js)
        if m is None:
            continue
        ks, seq = m
        vals = _evals(stage, pairs, seq, ks) if d >= 3 else []
        if co is None and alternating:
            ok = True
            if d >= 4:
                for i in range(2, d):
                    for j in range(i + 1, d):
                        if not abs(vals[i - 1] - vals[j - 1]) < Fraction(1, 2 ** i):
                            ok = False
            if ok:
                co = {"special": key_digest(key), "k": ks, "values": [fstr(t) for t in vals]}
        if ir is None:
            if d < 3 or all(abs(vals[i - 1]) > IR_THRESHOLD for i in range(2, d)):
                ir = {"special": key_digest(key), "k": ks, "values": [fstr(t) for t in vals]}
        if co is not None and ir is not None:
            break
    if co is not None:
        kinds.append("CO")
        certs["CO"] = co
    if ir is not None:
        kinds.append("IR")
        certs["IR"] = ir
    return {"kinds": kinds, "certificates": certs}


def certify_average(reg: CodingRegistry, stage: SpaceStage, avg: bmt.AlphaAverage, kind=None) -> bmt.AlphaAverage:
    """Attach a certificate; Basic averages certify themselves."""
    if avg.kind == "Basic":
        return avg.with_certificate({"kinds": ["Basic"]})
    res = classify_pairs(reg, stage, [(g, E) for _, g, E in avg.entries],
                         [s for s, _, _ in avg.entries], avg.n)
    want = kind or avg.kind
    if want == "Plain":
        if not res["kinds"]:
            raise CodingError("average matches no conditional kind")
        want = res["kinds"][0]
    if want not in res["kinds"]:
        raise CodingError(f"average is not of kind {want}; kinds found: {res['kinds']}")
    return bmt.AlphaAverage(avg.n, avg.entries, avg.window, want, res)


def _chain_value(reg, stage, pair, j):
    """|e*_gamma o P_E(x_{d+1})| with sigma^{-1}(j) of length d, inside the longest declared extension."""
    key = reg.preimage(j)
    if key is None:
        return None
    d = len(json.loads(key))
    for t in reg.special_tree():
        if is_prefix(key, t) and len(json.loads(t)) > d:
            seq = reg.vectors(t)
            g, E = pair
            return abs(evaluate(stage, estar(g, E), BlockVector.of(stage, seq[d][1])))
    return None


def select_homogeneous(reg: CodingRegistry, stage: SpaceStage, pairs, n: int | None = None):
    """Finite Ramsey step: (sublist, kind) with the largest class, ties toward IC."""
    pairs = [(g, tuple(E)) for g, E in pairs]
    usable = [p for p in pairs if (stage.node(p[0]).j or 0) >= 2]
    if len(usable) < 3:
        raise CodingError(f"need at least 3 usable entries, got {len(usable)}")
    js = {p: stage.node(p[0]).j for p in usable}
    ic = []
    for p in usable:
        if all(_weight_incomparable(reg, js[p], js[q]) for q in ic):
            ic.append(p)
    best_chain = []
    for seed in usable:
        if reg.preimage(js[seed]) is None:
            continue
        ch = []
        for p in usable:
            if reg.preimage(js[p]) is not None and all(
                    not _weight_incomparable(reg, js[p], js[q]) for q in ch + [seed] if q != p):
                ch.append(p)
        if len(ch) > len(best_chain):
            best_chain = ch
    size = n or len(pairs)
    candidates = [(ic, "IC")]
    if best_chain:
        vals = {p: _chain_value(reg, stage, p, js[p]) for p in best_chain}
        big = [p for p in best_chain if vals[p] is not None and vals[p] > IR_THRESHOLD]
        ir = sorted(set([best_chain[0], best_chain[-1]] + big), key=best_chain.index)
        small = [p for p in best_chain if p not in big]
        co = []
        for p in small:
            trial = co + [p]
            signs = [(-1) ** i for i in range(len(trial))]
            if "CO" in classify_pairs(reg, stage, trial, signs, size)["kinds"]:
                co = trial
        if ir and "IR" in classify_pairs(reg, stage, ir, [1] * len(ir), size)["kinds"]:
            candidates.append((ir, "IR"))
        if co:
            candidates.append((co, "CO"))
    best = max(candidates, key=lambda c: len(c[0]))
    return best[0], best[1]


# ---------------------------------------------------------------- nodes

def is_legal_xnr_node(ws, stage: SpaceStage, reg: CodingRegistry, node: GammaNode):
    ok, why = bmt.is_legal_bmt_node(ws, stage, node)
    if not ok:
        return False, why
    if node.variant == "base":
        return True, "ok"
    avg = node.avg
    if avg.kind not in ("Basic", "IC", "CO", "IR"):
        return False, f"average of kind {avg.kind} is not conditional (alpha_c) and carries no certificate"
    if avg.kind != "Basic":
        try:
            res = classify_pairs(reg, stage, [(g, E) for _, g, E in avg.entries],
                                 [s for s, _, _ in avg.entries], avg.n)
        except CodingError as e:
            return False, f"certificate: {e}"
        if avg.kind not in res["kinds"]:
            return False, f"certificate: pairs are not {avg.kind} (found {res['kinds']})"
    if node.variant == "succ":
        p = stage.rank(node.pred)
        if not bmt.meets_size(stage, avg.n, p):
            return False, f"size clause: s(b*) = {avg.n} < N_{p}"
    return True, "ok"


def new_xnr_stage(ws, reg: CodingRegistry | None = None, thresholds=None) -> SpaceStage:
    reg = reg if reg is not None else CodingRegistry("toy")
    st = SpaceStage(ws, "xnr", thresholds=thresholds or bmt.NThresholds())
    st.validator = lambda s, n: is_legal_xnr_node(None, s, reg, n)
    st.registry = reg
    register_node(st, BASE)
    return st


def xnr_trace(stage: SpaceStage) -> list:
    """One row per registered node: id, rank, variant, weight index, age, average kind and size."""
    out = []
    for g in stage.order:
        nd = stage.node(g)
        out.append({"id": g, "rank": nd.rank, "variant": nd.variant, "j": nd.j,
                    "age": stage.age(g), "kind": nd.avg.kind if nd.avg else None,
                    "size": str(nd.avg.n) if nd.avg else None})
    return out


# ---------------------------------------------------------------- evaluation analysis

@dataclass
class EvaluationAnalysis:
    gamma: str
    j: int
    chain: list
    averages: list
    windows: list
    residual_zero: bool
    partial_ok: list
    checked: int

    def pairs(self) -> list:
        return list(zip(self.chain, self.averages))

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "j": self.j, "chain": self.chain,
                "averages": [a.to_dict() for a in self.averages],
                "windows": [list(w) for w in self.windows],
                "residual_zero": self.residual_zero, "partial_ok": self.partial_ok,
                "checked": self.checked}


def _row_of(stage: SpaceStage, terms) -> dict:
    out = {}
    for c, g, E in terms:
        for xi, v in stage.row(g).items():
            if in_interval(stage.nodes[xi].rank, E):
                nv = out.get(xi, 0) + c * v
                if nv:
                    out[xi] = nv
                else:
                    out.pop(xi)
    return out


def analysis_terms(stage: SpaceStage, chain, averages, j, start: int = 0, head=None) -> list:
    """Terms of head + sum_{r>start} d*_{xi_r} + (1/m_j) sum_{r>start} b*_r."""
    w = Fraction(1, stage.schedule.m(j))
    terms = [] if head is None else [(Fraction(1), head, None)]
    for xi, b in zip(chain[start:], averages[start:]):
        terms.extend(dstar(stage, xi).terms)
        terms.extend((c * w, g, E) for c, g, E in b.functional().terms)
    return terms


def evaluation_analysis(stage: SpaceStage, gid: str) -> EvaluationAnalysis:
    nd = stage.node(gid)
    if nd.j is None:
        raise StageError("the base node has no evaluation analysis")
    chain = []
    g = gid
    while True:
        chain.append(g)
        n = stage.node(g)
        if n.variant == "ageone":
            break
        if n.variant != "succ":
            raise StageError(f"node {g} is not part of a weighted chain")
        g = n.pred
    chain.reverse()
    averages = [stage.node(x).avg for x in chain]
    ranks = [0] + [stage.rank(x) for x in chain]
    windows = [(ranks[r - 1], ranks[r] - 1) for r in range(1, len(ranks))]
    target = stage.row(gid)
    full = _row_of(stage, analysis_terms(stage, chain, averages, nd.j))
    residual_zero = full == target
    partial_ok = []
    for t in range(1, len(chain)):
        rt = _row_of(stage, analysis_terms(stage, chain, averages, nd.j, start=t, head=chain[t - 1]))
        partial_ok.append(rt == target)
    return EvaluationAnalysis(gid, nd.j, chain, averages, windows, residual_zero,
                              partial_ok, stage.count_upto(nd.rank))


def build_gamma_from_vfg(ws, stage: SpaceStage, reg: CodingRegistry, j: int, vfg, ranks=None) -> str:
    """Register xi_1 (age one) and its successors; returns the last id."""
    ws = ws or stage.schedule
    a = len(vfg)
    if not 1 <= a <= ws.n(j):
        raise IllegalNode(f"need 1 <= a <= n_{j}, got a = {a}")
    ranks = list(ranks) if ranks is not None else [b.window[1] + 1 for b in vfg]
    if len(ranks) != a:
        raise IllegalNode("one rank per average is required")
    if j > ranks[0]:
        raise IllegalNode(f"r=1: weight index j = {j} exceeds p_1 = {ranks[0]}")
    for r in range(1, a):
        if ranks[r] < ranks[r - 1] + 2:
            raise IllegalNode(f"r={r + 1}: p_r = {ranks[r]} leaves no room after p_(r-1) = {ranks[r - 1]}")
    pred = None
    for r, (b, p) in enumerate(zip(vfg, ranks), 1):
        if pred is None:
            node = GammaNode("ageone", p, j, None, b)
        else:
            node = GammaNode("succ", p, j, pred, b)
        try:
            pred = register_node(stage, node)
        except IllegalNode as e:
            raise IllegalNode(f"r={r}: {e}") from None
    return pred


def analysis_chain(stage: SpaceStage, gid: str) -> list:
    out = []
    g = gid
    while g is not None:
        nd = stage.node(g)
        if nd.j is None:
            break
        out.append(g)
        g = nd.pred if nd.variant == "succ" else None
    return out


def ramsey_basis_select(stage: SpaceStage, gammas) -> list:
    """Greedy antichain for the relation 'is in the analysis of'."""
    ordered = sorted(dict.fromkeys(gammas), key=lambda g: (stage.rank(g), stage.order.index(g)))
    kept, used_ranks = [], set()
    for g in ordered:
        r = stage.rank(g)
        if r in used_ranks:
            continue
        chain = set(analysis_chain(stage, g))
        if any(k in chain for k in kept):
            continue
        kept.append(g)
        used_ranks.add(r)
    return kept
