"""Scripted stages used by the verification suites and the CLI."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import bmt, xnr
from .bd_core import BASE, GammaNode, IllegalNode, SpaceStage, register_node
from .schedule import WeightSchedule, flat, t1
from .selfdet import SubsetSpec
from .witnesses import basis_node


@dataclass
class MicroConfig:
    max_rank: int = 4
    extend_to: int = 8
    js: tuple = (1, 2)
    sizes: tuple = (1, 2)
    plain_max_rank: int = 2


def _try(stage, node):
    try:
        return register_node(stage, node)
    except (IllegalNode, bmt.AverageError):
        return None


def _primary(stage, g) -> bool:
    nd = stage.node(g)
    return nd.variant == "base" or (nd.avg is not None and nd.avg.n == 1 and nd.avg.d == 1)


def _single_averages(stage, q, lo, cfg):
    """Single-entry averages in B_{lo,q} over primary nodes."""
    out = []
    for eta in stage.ids_upto(q):
        r = stage.rank(eta)
        if not lo < r or not _primary(stage, eta):
            continue
        for n in cfg.sizes:
            out.append(bmt.AlphaAverage(n, ((1, eta, (r, r)),), (lo, q), "Basic"))
        if r <= cfg.plain_max_rank:
            for a in range(lo + 1, r + 1):
                for b in range(a, q + 1):
                    if (a, b) != (r, r):
                        out.append(bmt.AlphaAverage(1, ((1, eta, (a, b)),), (lo, q), "Plain"))
    return out


def micro_stage(cfg: MicroConfig | None = None, ws: WeightSchedule | None = None) -> SpaceStage:
    """Full enumeration of a restricted menu up to cfg.max_rank, then a thin extension."""
    cfg = cfg or MicroConfig()
    st = bmt.new_bmt_stage(ws or t1(), bmt.NThresholds("toy"))
    for r in range(2, cfg.max_rank + 1):
        q = r - 1
        register_node(st, basis_node(r, "W"))
        for avg in _single_averages(st, q, 0, cfg):
            for j in cfg.js:
                if j <= r:
                    _try(st, GammaNode("ageone", r, j, None, avg))
        if q >= 2:
            for eta in st.by_rank.get(2, []):
                if _primary(st, eta):
                    avg = bmt.AlphaAverage(2, ((1, BASE.id, (1, 1)), (-1, eta, (2, 2))), (0, q), "Plain")
                    _try(st, GammaNode("ageone", r, 1, None, avg))
        for pred in [g for g in st.ids_upto(q - 1) if st.node(g).j is not None and _primary(st, g)]:
            p = st.rank(pred)
            for avg in _single_averages(st, q, p, cfg):
                _try(st, GammaNode("succ", r, st.node(pred).j, pred, avg))
    extend(st, cfg.max_rank + 1, cfg.extend_to)
    return st


def extend(st: SpaceStage, lo: int, hi: int) -> None:
    """A few nodes per rank: canonical, an unbounded-weight basis node, a successor
    and a plain-interval node."""
    for r in range(lo, hi + 1):
        register_node(st, bmt.canonical_ageone(st, r))
        register_node(st, basis_node(r, "W"))
        prev = [g for g in st.by_rank.get(r - 1, []) if st.node(g).variant == "ageone"
                and st.node(g).j == r - 1]
        pred = bmt.canonical_ageone(st, r - 2).id if r - 2 >= 2 else None
        if prev and pred in st:
            eta = prev[0]
            avg = bmt.AlphaAverage(1, ((1, eta, (r - 1, r - 1)),), (r - 2, r - 1), "Basic")
            _try(st, GammaNode("succ", r, 1, pred, avg))
        if prev:
            avg = bmt.AlphaAverage(1, ((1, prev[0], (1, r - 1)),), (0, r - 1), "Plain")
            _try(st, GammaNode("ageone", r, 1, None, avg))


def basis_W(st: SpaceStage) -> list:
    """The unbounded-weight basis nodes AgeOne(r, j=r, d*_0), one per rank >= 2."""
    out = []
    for r in st.ranks():
        if r < 2:
            continue
        g = basis_node(r, "W").id
        if g in st:
            out.append(g)
    return out


# ---------------------------------------------------------------- T1 scripted stage

def t1_scripted_stage(max_rank: int = 10, thresholds: str = "registered") -> SpaceStage:
    """An xnr stage over T1 with registered thresholds: basic, IC and successor nodes."""
    reg = xnr.CodingRegistry("toy")
    st = xnr.new_xnr_stage(t1(), reg, bmt.NThresholds(thresholds))
    by = {}

    def add(node):
        g = register_node(st, node)
        by.setdefault((node.rank, node.j, node.variant), g)
        return g

    for r in range(2, max_rank + 1):
        q = r - 1
        add(bmt.canonical_ageone(st, r))
        add(GammaNode("ageone", r, 2, None, bmt.AlphaAverage(2, ((1, BASE.id, (1, 1)),), (0, q), "Basic")))
        if r >= 3:
            add(GammaNode("ageone", r, 3, None, bmt.AlphaAverage(1, ((1, BASE.id, (1, 1)),), (0, q), "Basic")))
        if r >= 4:
            a, b = by[(r - 2, 1, "ageone")], by[(r - 1, 2, "ageone")]
            avg = bmt.basic_average(st, [(1, a), (-1, b)], 2, (0, q))
            add(GammaNode("ageone", r, 1, None, avg))
        if r >= 5:
            a, b = by[(r - 3, 2, "ageone")], by[(r - 1, 3, "ageone")]
            avg = bmt.make_alpha_average([(1, a, (r - 3, r - 3)), (1, b, (r - 2, r - 1))], 2, (0, q), "IC", st)
            add(GammaNode("ageone", r, 1, None, xnr.certify_average(reg, st, avg, "IC")))
        if r >= 4:
            pred = by[(2, 1, "ageone")]
            n = bmt.least_size(st, 2)
            eta = by[(q, 2, "ageone")]
            avg = bmt.AlphaAverage(n, ((1, eta, (q, q)),), (2, q), "Basic")
            add(GammaNode("succ", r, 1, pred, avg))
        if r >= 5:
            pred = by[(3, 2, "ageone")]
            n = bmt.least_size(st, 3)
            eta = by[(q, 3, "ageone")]
            avg = bmt.AlphaAverage(n, ((-1, eta, (q, q)),), (3, q), "Basic")
            add(GammaNode("succ", r, 2, pred, avg))
        if r >= 6:
            pred = by[(4, 1, "succ")]
            n = bmt.least_size(st, 4)
            eta = by[(q, 1, "ageone")]
            avg = bmt.AlphaAverage(n, ((1, eta, (q, q)),), (4, q), "Basic")
            add(GammaNode("succ", r, 1, pred, avg))
    return st


# ---------------------------------------------------------------- witness stage

def witness_stage(coding: str = "toy", registry: str | None = None) -> tuple:
    """Flat schedule, toy thresholds, an xnr stage and its coding registry."""
    reg = xnr.CodingRegistry(coding, registry)
    st = xnr.new_xnr_stage(flat(), reg, bmt.NThresholds("toy"))
    return st, reg


# ---------------------------------------------------------------- subset specs

def xnr_gamma_spec(reg: xnr.CodingRegistry | None = None) -> SubsetSpec:
    """Nodes that are legal for the conditional space and reference only such nodes."""
    reg = reg or xnr.CodingRegistry("toy")

    def pred(st, g):
        memo = st.__dict__.setdefault("_xnr_memo", {})
        key = (id(reg), g)
        if key not in memo:
            nd = st.node(g)
            ok = all(pred(st, h) for h in nd.references())
            if ok:
                ok = xnr.is_legal_xnr_node(None, st, reg, nd)[0]
            memo[key] = ok
        return memo[key]

    return SubsetSpec("xnr", pred)


def rank_closed_spec(q: int) -> SubsetSpec:
    return SubsetSpec(f"ranks<={q}", lambda st, g: st.rank(g) <= q)


def canonical_spec() -> SubsetSpec:
    def pred(st, g):
        nd = st.node(g)
        return nd.variant == "base" or nd.id == bmt.canonical_ageone(st, nd.rank).id
    return SubsetSpec("canonical", pred)


def reference_closure(st: SpaceStage, seeds) -> set:
    out, todo = set(), list(seeds)
    while todo:
        g = todo.pop()
        if g in out:
            continue
        out.add(g)
        todo.extend(st.node(g).references())
    return out


def succ_without_pred(st: SpaceStage) -> SubsetSpec:
    """Everything except the predecessor of the first successor node."""
    for g in st.order:
        nd = st.node(g)
        if nd.variant == "succ":
            drop = nd.pred
            return SubsetSpec("negative:succ-without-pred", lambda s, h, d=drop: h != d)
    raise IllegalNode("stage has no successor node")


@dataclass
class SpecFamily:
    specs: list = field(default_factory=list)
    negatives: list = field(default_factory=list)


def subset_family(st: SpaceStage, seed: int = 0, closures: int = 4, random_sets: int = 2) -> SpecFamily:
    rng = random.Random(seed)
    fam = SpecFamily()
    fam.specs += [SubsetSpec.full(), canonical_spec(), xnr_gamma_spec()]
    fam.specs += [rank_closed_spec(q) for q in (2, 3, 4)]
    ids = list(st.order)
    for i in range(closures):
        seeds = rng.sample(ids, 3)
        fam.specs.append(SubsetSpec.from_ids(f"closure{i}", reference_closure(st, seeds)))
    for i in range(random_sets):
        pick = {g for g in ids if rng.random() < 0.5} | {BASE.id}
        fam.specs.append(SubsetSpec.from_ids(f"random{i}", pick))
    neg = succ_without_pred(st)
    fam.specs.append(neg)
    fam.negatives.append(neg.tag)
    return fam
