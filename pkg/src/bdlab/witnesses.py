"""Constructive witnesses on finite stages: Schreier partitions, RIS and
l1-averages, exact pairs, dependent sequences, the blow-up functional and the
c0 spreading-model estimate.

Upper bounds on norms are only ever tested one-sidedly against the horizon
lower norm; lower bounds are certified by explicit functionals.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import bmt, xnr
from .bd_core import (BASE, BlockVector, GammaNode, IllegalNode, SpaceStage,
                      estar, evaluate, fstr, horizon_norm, register_node)
from .mixed_tsirelson import mt_norm


class WitnessError(ValueError):
    pass


def check(claim, lhs, rhs, ok, **extra) -> dict:
    row = {"claim": claim, "lhs": Fraction(lhs), "rhs": Fraction(rhs),
           "margin": Fraction(rhs) - Fraction(lhs), "pass": bool(ok)}
    row.update(extra)
    return row


def lower_norm(stage: SpaceStage, x: BlockVector) -> Fraction:
    return horizon_norm(stage, x, stage.max_rank())[0]


def breakpoint_intervals(x: BlockVector) -> list:
    """P_E x depends on E only through E meet supp x, so these intervals are exhaustive."""
    s = x.supp()
    return [(a, b) for i, a in enumerate(s) for b in s[i:]]


def weighted_ids(stage: SpaceStage) -> list:
    return [g for g in stage.order if stage.node(g).j is not None]


def mode_flags(stage: SpaceStage) -> dict:
    reg = getattr(stage, "registry", None)
    th = stage.thresholds
    return {"coding": reg.mode if reg else None,
            "thresholds": th.mode if th else None,
            "schedule": stage.schedule.mode}


# ---------------------------------------------------------------- Schreier sets

def schreier1_partition(start: int, count: int) -> list:
    """Successive sets with #F = min F: start=1 gives {1}, {2,3}, {4..7}, ..."""
    if start < 1:
        raise WitnessError("start must be >= 1")
    out, m = [], start
    for _ in range(count):
        out.append(list(range(m, 2 * m)))
        m *= 2
    return out


# ---------------------------------------------------------------- basis placement

def basis_node(rank: int, family: str = "X", j: int = 1) -> GammaNode:
    """A node whose basis vector is a normalized block with normer d*."""
    if family == "X":
        avg = bmt.AlphaAverage(1, ((1, BASE.id, (1, 1)),), (0, rank - 1), "Basic")
    elif family == "Y":
        avg = bmt.AlphaAverage(2, ((1, BASE.id, (1, 1)),), (0, rank - 1), "Basic")
    elif family == "W":
        avg = bmt.AlphaAverage(1, ((1, BASE.id, (1, 1)),), (0, rank - 1), "Basic")
        j = rank
    else:
        raise WitnessError(f"unknown basis family {family!r}")
    return GammaNode("ageone", rank, j, None, avg)


def place_basis(stage: SpaceStage, start: int, count: int, gap: int = 2, family: str = "X") -> list:
    return [register_node(stage, basis_node(start + gap * i, family)) for i in range(count)]


# ---------------------------------------------------------------- l1 averages and certificates

def signed_chain(stage, reg, j, normers, signs, ws=None) -> str:
    """gamma of weight j whose chain averages are the given single-block normers with signs."""
    vfg = []
    for b, s in zip(normers, signs):
        entries = tuple((s * e, g, E) for e, g, E in b.entries)
        vfg.append(bmt.AlphaAverage(b.n, entries, b.window, b.kind, b.certificate))
    return xnr.build_gamma_from_vfg(ws, stage, reg, j, vfg)


def basis_normers(stage: SpaceStage, ids: list) -> list:
    """d*_beta as a basic average of size 1, window (rank-1, rank]."""
    return [bmt.basic_average(stage, [(1, g)], 1, (stage.rank(g) - 1, stage.rank(g))) for g in ids]


@dataclass
class L1Average:
    y: BlockVector
    gamma: str
    value: Fraction
    C: Fraction
    n: int
    certified: bool


def build_l1_average(stage: SpaceStage, reg, source: list, C, n: int, j: int = 1) -> L1Average:
    """y = (1/n) sum x_k / b_k(x_k) over the first n (x_k, b_k); certified by a weight-j chain."""
    C = Fraction(C)
    if n < 1 or len(source) < n:
        raise WitnessError(f"need {n} source blocks, have {len(source)}")
    if n > stage.schedule.n(j):
        raise WitnessError(f"n = {n} exceeds n_{j}")
    y = BlockVector()
    normers = []
    for x, b in source[:n]:
        t = evaluate(stage, b.functional(), x)
        if t <= 0:
            raise WitnessError("normer does not evaluate positively on its block")
        y = y + x.scale(Fraction(1, n) / t)
        normers.append(b)
    gamma = signed_chain(stage, reg, j, normers, [1] * n)
    value = evaluate(stage, estar(gamma), y)
    if value < 1 / C:
        raise WitnessError(f"certified lower bound {value} < 1/C = {1 / C}")
    return L1Average(y, gamma, value, C, n, True)


def l1_certificate(stage: SpaceStage, reg, xs: list, normers: list, lambdas: list, j: int = 1) -> dict:
    """gamma with e*_gamma(sum lambda_i x_i) = (1/m_j) sum |lambda_i| b_i(x_i)."""
    lambdas = [Fraction(l) for l in lambdas]
    signs = [1 if l >= 0 else -1 for l in lambdas]
    gamma = signed_chain(stage, reg, j, normers, signs)
    z = BlockVector()
    for l, x in zip(lambdas, xs):
        z = z + x.scale(l)
    value = evaluate(stage, estar(gamma), z)
    thetas = [evaluate(stage, b.functional(), x) for b, x in zip(normers, xs)]
    expected = Fraction(1, stage.schedule.m(j)) * sum(abs(l) * t for l, t in zip(lambdas, thetas))
    return {"gamma": gamma, "value": value, "expected": expected, "pass": value == expected}


def average_on_l1_check(stage: SpaceStage, y: BlockVector, C, n: int, pool: list) -> list:
    """|b*(y)| < 4C/s(b*) + 8C/n for every submitted average."""
    C = Fraction(C)
    rows = []
    for b in pool:
        v = abs(evaluate(stage, b.functional(), y))
        rhs = 4 * C / b.n + 8 * C / n
        rows.append(check("average on l1-average", v, rhs, v < rhs, size=b.n))
    return rows


# ---------------------------------------------------------------- alpha profiles

def alpha_profile(stage: SpaceStage, xs: list, pool: list, sizes=None) -> dict:
    """table[k][s] = max over b in pool with s(b) >= s and intervals E of |b(P_E x_k)|."""
    if not pool:
        raise WitnessError("empty pool")
    sizes = sorted(set(sizes or [b.n for b in pool]))
    table = []
    for x in xs:
        best = {}
        for b in pool:
            f = b.functional()
            m = Fraction(0)
            for E in breakpoint_intervals(x):
                v = abs(evaluate(stage, f.compose(E), x))
                if v > m:
                    m = v
            best[b.n] = max(best.get(b.n, Fraction(0)), m)
        row = {}
        for s in sizes:
            row[s] = max((v for n, v in best.items() if n >= s), default=Fraction(0))
        table.append(row)
    return {"sizes": sizes, "table": table}


def profile_csv(profile: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k"] + [f"s>={s}" for s in profile["sizes"]])
    for k, row in enumerate(profile["table"], 1):
        w.writerow([k] + [fstr(row[s]) for s in profile["sizes"]])
    return buf.getvalue()


# ---------------------------------------------------------------- RIS

@dataclass
class RISWitness:
    vectors: list
    C: Fraction
    js: list


def _ris_clause3(stage, x, jk, C):
    for g in weighted_ids(stage):
        j = stage.node(g).j
        if j < jk:
            v = abs(evaluate(stage, estar(g), x))
            if not v < Fraction(C) / stage.schedule.m(j):
                return {"gamma": g, "j": j, "value": v}
    return None


def build_ris(stage: SpaceStage, source: list, C) -> RISWitness:
    """Greedy selection with j_1 = 1 and j_{k+1} = max supp x_k + 1."""
    C = Fraction(C)
    kept, js = [], []
    nxt = 1
    for x in source:
        if kept and min(x.supp()) <= max(kept[-1].supp()):
            continue
        if 2 * lower_norm(stage, x) > C:
            continue
        if _ris_clause3(stage, x, nxt, C) is not None:
            continue
        kept.append(x)
        js.append(nxt)
        nxt = max(x.supp()) + 1
    return RISWitness(kept, C, js)


def check_ris(stage: SpaceStage, w: RISWitness, Q: int | None = None) -> dict:
    Q = stage.max_rank() if Q is None else Q
    rows = []
    covered = all(max(x.supp()) <= Q for x in w.vectors)
    for k, x in enumerate(w.vectors):
        up = 2 * lower_norm(stage, x)
        rows.append(check("norm surrogate <= C", up, w.C, up <= w.C, k=k + 1))
        if k + 1 < len(w.vectors):
            rows.append(check("j_{k+1} > max supp x_k", max(x.supp()), w.js[k + 1],
                              w.js[k + 1] > max(x.supp()), k=k + 1))
        bad = _ris_clause3(stage, x, w.js[k], w.C)
        rows.append({"claim": "small on lower weights", "k": k + 1, "pass": bad is None,
                     "witness": bad})
    return {"rows": rows, "covered": covered, "Q": Q,
            "pass": covered and all(r["pass"] for r in rows)}


def analysis_families(stage: SpaceStage, below: int) -> list:
    """(i, vfg) for every registered weighted node of weight index i < below."""
    out = []
    for g in weighted_ids(stage):
        i = stage.node(g).j
        if i < below:
            out.append((i, g, xnr.evaluation_analysis(stage, g).averages))
    return out


def verify_ris_estimates(stage: SpaceStage, w: RISWitness, j: int, lambdas=None) -> dict:
    ws = stage.schedule
    C = w.C
    nj = ws.n(j)
    if len(w.vectors) < nj:
        raise WitnessError(f"need n_{j} = {nj} vectors, have {len(w.vectors)}")
    xs = w.vectors[:nj]
    x = BlockVector()
    for v in xs:
        x = x + v
    x = x.scale(Fraction(ws.m(j), nj))
    rows = [check("||(m_j/n_j) sum x_k|| <= 10C", lower_norm(stage, x), 10 * C,
                  lower_norm(stage, x) <= 10 * C)]
    for g in weighted_ids(stage):
        i = stage.node(g).j
        if i >= j:
            continue
        worst = max((abs(evaluate(stage, estar(g, E), x)) for E in breakpoint_intervals(x)), default=0)
        rhs = 112 * C / ws.m(i)
        rows.append(check("|e*_gamma o P_E(x)| <= 112C/m_i", worst, rhs, worst <= rhs, gamma=g, i=i))
    for i, g, vfg in analysis_families(stage, j):
        lhs = sum((abs(evaluate(stage, b.functional(), x)) for b in vfg), Fraction(0))
        rhs = 10 * C / vfg[0].n + 50 * C * ws.m(i) / ws.m(j)
        rows.append(check("sum |b_r(x)| < 10C/s(b_1) + 50C m_i/m_j", lhs, rhs, lhs < rhs, gamma=g))
    lambdas = [Fraction(1)] * len(xs) if lambdas is None else [Fraction(l) for l in lambdas]
    z = BlockVector()
    for l, v in zip(lambdas, xs):
        z = z + v.scale(l)
    mt, _ = mt_norm(ws, 3, lambdas, 3)
    lz = lower_norm(stage, z)
    rows.append(check("||sum lambda_k x_k|| <= 10C ||sum lambda_k e_k||_T", lz, 10 * C * mt, lz <= 10 * C * mt))
    return {"j": j, "C": C, "rows": rows, "modes": mode_flags(stage),
            "pass": all(r["pass"] for r in rows)}


# ---------------------------------------------------------------- exact pairs

@dataclass
class ExactPair:
    gamma: str
    x: BlockVector
    C: Fraction
    j: int
    theta: Fraction
    basis: list
    groups: list
    chain: list
    checks: list = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return all(c["pass"] for c in self.checks)


def default_groups(ws, j: int, theta, C) -> int:
    # (i) needs a >= theta n_j / C; the norm surrogate 2 sup|coef| <= C needs a >= 2 theta m_j / C
    theta, C = Fraction(theta), Fraction(C)
    a = max(2, math.ceil(theta * ws.n(j) / C), math.ceil(2 * theta * ws.m(j) / C))
    return min(a, ws.n(j))


def build_exact_pair_from_blocks(stage: SpaceStage, reg, j: int, blocks: list, normers: list, theta=1,
                                 C=3584, groups: int | None = None, max_groups: int = 12) -> ExactPair:
    """y = theta (m_j/a) sum_r sum_{i in F_r} lambda_i eps_i x_i with lambda_i = 1/e*_{eta_i} o P_{E_i}(x_i),
    certified by a chain of averages (1/#F_r) sum_{i in F_r} eps_i e*_{eta_i} o P_{E_i}; e*_gamma(y) = theta.

    normers are (eta_i, E_i); E_i must meet no other block, and each group must leave a free
    rank before the next one for the chain node.
    """
    ws = stage.schedule
    theta, C = Fraction(theta), Fraction(C)
    a = groups or default_groups(ws, j, theta, C)
    if a > max_groups:
        raise WitnessError(f"{a} groups needed at weight index {j}; use toy coding to keep weights small")
    F = schreier1_partition(1, a)
    need = 2 ** a - 1
    if len(blocks) < need or len(normers) < need:
        raise WitnessError(f"{a} groups need {need} source blocks, got {len(blocks)}")
    if min(blocks[0].supp()) < ws.m(j):
        raise WitnessError(f"clause (v): min supp = {min(blocks[0].supp())} < m_{j} = {ws.m(j)}")
    lams = []
    for i in range(need):
        eta, E = normers[i]
        t = evaluate(stage, estar(eta, E), blocks[i])
        if not t > Fraction(3, 4) * lower_norm(stage, blocks[i]):
            raise WitnessError(f"block {i + 1}: normer value {t} is not above 3/4 of the norm")
        lams.append(1 / t)
    vfg, used = [], 0
    prev_p = 0
    for Fr in F:
        idx = list(range(used, used + len(Fr)))
        used += len(Fr)
        entries = [((-1) ** t, normers[i][0], tuple(normers[i][1])) for t, i in enumerate(idx)]
        hi = max(max(E[1], stage.rank(g)) for _, g, E in entries)
        lo = min(min(E[0], stage.rank(g)) for _, g, E in entries)
        if prev_p and lo <= prev_p:
            raise WitnessError(f"group {len(vfg) + 1}: no free rank before it for the chain node")
        basic = all(E == (stage.rank(g), stage.rank(g)) for _, g, E in entries)
        avg = bmt.make_alpha_average(entries, len(Fr), (prev_p, hi), "Basic" if basic else "Plain", stage)
        if not basic and reg is not None:
            avg = xnr.certify_average(reg, stage, avg)
        vfg.append(avg)
        prev_p = hi + 1
    y = BlockVector()
    coef = Fraction(ws.m(j), a) * theta
    for t, Fr in enumerate(F):
        for u, i in enumerate(range(2 ** t - 1, 2 ** t - 1 + len(Fr))):
            y = y + blocks[i].scale(coef * lams[i] * (-1) ** u)
    gamma = xnr.build_gamma_from_vfg(ws, stage, reg, j, vfg)
    chain = xnr.evaluation_analysis(stage, gamma).chain
    pair = ExactPair(gamma, y, C, j, theta, [normers[i][0] for i in range(need)], F, chain)
    pair.checks = exact_pair_checks(stage, pair)
    return pair


def build_exact_pair(stage: SpaceStage, reg, j: int, start_rank: int, theta=1, C=3584,
                     groups: int | None = None, family: str = "X", max_groups: int = 12) -> ExactPair:
    """Basis-source exact pair: blocks d_beta at every other rank from max(start_rank, m_j),
    normed by d*_beta."""
    ws = stage.schedule
    a = groups or default_groups(ws, j, theta, C)
    if a > max_groups:
        raise WitnessError(f"{a} groups needed at weight index {j}; use toy coding to keep weights small")
    ids = place_basis(stage, max(start_rank, ws.m(j)), 2 ** a - 1, 2, family)
    blocks = [BlockVector.basis(stage, g) for g in ids]
    normers = [(g, (stage.rank(g), stage.rank(g))) for g in ids]
    return build_exact_pair_from_blocks(stage, reg, j, blocks, normers, theta, C, a, max_groups)


def exact_pair_checks(stage: SpaceStage, p: ExactPair) -> list:
    ws = stage.schedule
    x, C, j = p.x, p.C, p.j
    rows = []
    v = evaluate(stage, estar(p.gamma), x)
    rows.append(check("e*_gamma(x) = theta", v, p.theta, v == p.theta))
    ids = stage.order
    sup = max(abs(c) for c in x.coeffs.values())
    # d*_eta(x) only sees the coefficient of d_eta
    rows.append(check("(i) sup |d*_eta(x)| <= C m_j/n_j", sup, C * ws.m(j) / ws.n(j), sup <= C * ws.m(j) / ws.n(j)))
    up = 2 * lower_norm(stage, x)
    rows.append(check("(ii) ||x|| <= C (surrogate)", up, C, up <= C))
    worst, arg = Fraction(0), None
    for g in ids:
        i = stage.node(g).j
        if i is None or i <= j:
            continue
        for E in breakpoint_intervals(x):
            t = abs(evaluate(stage, estar(g, E), x))
            if t > worst:
                worst, arg = t, [g, list(E)]
    rows.append(check("(iii) |e*_eta o P_E(x)| < C/m_j for heavier weights", worst, C / ws.m(j),
                      worst < C / ws.m(j), witness=arg))
    fams = analysis_families(stage, j)
    ok4, worst4 = True, None
    for i, g, vfg in fams:
        if len(vfg) > ws.n(i):
            continue
        lhs = sum((abs(evaluate(stage, b.functional(), x)) for b in vfg), Fraction(0))
        rhs = C / vfg[0].n + C * ws.m(i) / ws.m(j)
        if not lhs < rhs:
            ok4 = False
        if worst4 is None or rhs - lhs < worst4[1] - worst4[0]:
            worst4 = (lhs, rhs)
    if worst4 is None:
        worst4 = (Fraction(0), Fraction(0))
    rows.append(check("(iv) sum |b_r(x)| < C/s(b_1) + C m_i/m_j", worst4[0], worst4[1], ok4, families=len(fams)))
    rows.append(check("(v) min supp x >= m_j", ws.m(j), min(x.supp()), min(x.supp()) >= ws.m(j)))
    return rows


def rho_interval(stage: SpaceStage, p: ExactPair, rho) -> dict:
    """An interval E with |e*_gamma o P_E(x) - rho| < 2C m_j/n_j."""
    rho = Fraction(rho)
    ws = stage.schedule
    best = None
    for E in breakpoint_intervals(p.x):
        v = evaluate(stage, estar(p.gamma, E), p.x)
        d = abs(v - rho)
        if best is None or d < best[0]:
            best = (d, E, v)
    bound = 2 * p.C * ws.m(p.j) / ws.n(p.j)
    return {"rho": rho, "E": list(best[1]), "value": best[2], "distance": best[0],
            "bound": bound, "pass": best[0] < bound}


# ---------------------------------------------------------------- dependent sequences

@dataclass
class DependentSequence:
    pairs: list
    C: Fraction
    theta: Fraction
    special: str
    gaps: list
    families: list

    @property
    def xs(self) -> list:
        return [p.x for p in self.pairs]

    @property
    def gammas(self) -> list:
        return [p.gamma for p in self.pairs]


def build_dependent_sequence(stage: SpaceStage, reg, length: int, theta=1, C=3584,
                             families=None, start_rank: int = 8) -> DependentSequence:
    """Weights follow sigma: j_1 = 1, j_k = sigma(first k-1 pairs).  A free rank is
    reserved after each gamma_k for later chains."""
    families = families or ["X"] * length
    pairs, gaps = [], []
    cur = start_rank
    seq = []
    for k in range(length):
        if k == 0:
            j = 1
        else:
            j = xnr.sigma_register(reg, stage, seq)
        if stage.schedule.m(j) > 10 ** 9:
            raise WitnessError(f"weight index {j} from strict coding is not desk-feasible; use toy coding")
        p = build_exact_pair(stage, reg, j, cur, theta, C, family=families[k])
        pairs.append(p)
        seq.append((p.gamma, p.x))
        gap = stage.rank(p.gamma) + 1
        gaps.append(gap)
        cur = gap + 1
    key = xnr.declare_special(reg, stage, seq)
    return DependentSequence(pairs, Fraction(C), Fraction(theta), key, gaps, families)


def dependent_clause_checks(stage: SpaceStage, ds: DependentSequence) -> list:
    rows = []
    for k in range(len(ds.pairs) - 1):
        lhs = min(ds.pairs[k + 1].x.supp())
        rhs = max(max(stage.rank(p.gamma) for p in ds.pairs[:k + 1]), max(ds.pairs[k].x.supp()))
        rows.append(check("min supp x_{k+1} > max(rank gamma_i, max supp x_k)", rhs, lhs, lhs > rhs, k=k + 1))
    js = [stage.node(g).j for g in ds.gammas]
    rows.append({"claim": "weights follow the coding", "weights": js,
                 "pass": not xnr.special_violations(stage.registry, stage,
                                                     [(p.gamma, p.x) for p in ds.pairs])})
    for k, p in enumerate(ds.pairs, 1):
        rows.append({"claim": "exact pair", "k": k, "pass": p.exact,
                     "failed": [c["claim"] for c in p.checks if not c["pass"]]})
    return rows


def _sum(xs):
    z = BlockVector()
    for x in xs:
        z = z + x
    return z


def verify_dependent_estimates(stage: SpaceStage, ds: DependentSequence) -> dict:
    C = ds.C
    ell = len(ds.pairs)
    wgt = [Fraction(1, stage.schedule.m(stage.node(g).j)) for g in ds.gammas]
    rows = []
    for n in range(ell):
        for m in range(n, ell):
            z = _sum(ds.xs[n:m + 1])
            lz = lower_norm(stage, z)
            rows.append(check("||sum_{k=n}^m x_k|| <= 10C", lz, 10 * C, lz <= 10 * C, n=n + 1, m=m + 1))
    # weight-filtered partial sums against every registered weighted node
    for n in range(ell):
        for m in range(n, ell):
            for g in weighted_ids(stage):
                wg = Fraction(1, stage.schedule.m(stage.node(g).j))
                D = [k for k in range(n, m + 1) if wgt[k] < wg]
                if not D:
                    continue
                z = _sum(ds.xs[k] for k in D)
                worst = max(abs(evaluate(stage, estar(g, E), z)) for E in breakpoint_intervals(z))
                rhs = 63 * C * wg
                if worst > rhs:
                    rows.append(check("|e*_gamma o P_E(sum_D x_k)| <= 63C we(gamma)", worst, rhs, False,
                                      gamma=g, n=n + 1, m=m + 1))
    rows.append({"claim": "63C we(gamma) on weight-filtered sums", "pass": True,
                 "nodes": len(weighted_ids(stage))})
    # comparable families built from the sequence itself, every subsequence
    pairs = [(p.gamma, p.x.ran()) for p in ds.pairs]
    for n in range(ell):
        for m in range(n, ell):
            z = _sum(ds.xs[n:m + 1])
            for d in range(1, ell + 1):
                for sub in combinations(range(ell), d):
                    fam = [pairs[t] for t in sub]
                    signs = [(-1) ** t for t in range(d)]
                    lhs = Fraction(0)
                    for s, (g, E), t in zip(signs, fam, sub):
                        wg = wgt[t]
                        D = [k for k in range(n, m + 1) if wgt[k] < wg]
                        lhs += s * (evaluate(stage, estar(g, E), z) - evaluate(stage, estar(g, E), _sum(ds.xs[k] for k in D)))
                    rhs = 9 * C + 2 * d * C * wgt[n]
                    if abs(lhs) > rhs:
                        rows.append(check("discrepancy <= 9C + 2dC we(gamma_n)", abs(lhs), rhs, False,
                                          family=list(sub), n=n + 1, m=m + 1))
    rows.append({"claim": "discrepancy bound on comparable subfamilies", "pass": True})
    return {"C": C, "theta": ds.theta, "rows": rows, "clauses": dependent_clause_checks(stage, ds),
            "modes": mode_flags(stage), "pass": all(r["pass"] for r in rows)}


# ---------------------------------------------------------------- blow-up and HI

def blowup_witness(stage: SpaceStage, reg, ds: DependentSequence, j: int = 1, pattern="alternating") -> dict:
    """gamma with chain averages (-1)^k e*_{gamma_k} o P_{ran x_k}; e*_gamma(sum (-1)^k x_k) = (a/m_j) theta."""
    ell = len(ds.pairs)
    L = list(range(1, ell + 1)) if pattern == "alternating" else sorted(pattern)
    a = len(L)
    if a > stage.schedule.n(j):
        raise WitnessError(f"a = {a} exceeds n_{j}")
    vfg, ranks = [], []
    prev = 0
    for k in L:
        p = ds.pairs[k - 1]
        E = p.x.ran()
        s = (-1) ** k
        hi = ds.gaps[k - 1] - 1
        avg = bmt.make_alpha_average([(s, p.gamma, E)], 1, (prev, hi), "CO", stage)
        avg = xnr.certify_average(reg, stage, avg, "CO")
        vfg.append(avg)
        ranks.append(ds.gaps[k - 1])
        prev = ds.gaps[k - 1]
    gamma = xnr.build_gamma_from_vfg(None, stage, reg, j, vfg, ranks)
    z = BlockVector()
    for k in L:
        z = z + ds.pairs[k - 1].x.scale((-1) ** k)
    value = evaluate(stage, estar(gamma), z)
    expected = Fraction(a, stage.schedule.m(j)) * ds.theta
    plain = _sum(ds.pairs[k - 1].x for k in L)
    lp = lower_norm(stage, plain)
    ratio_claim = expected / (10 * ds.C)
    return {"gamma": gamma, "a": a, "value": value, "expected": expected, "exact": value == expected,
            "plain_lower": lp, "plain_bound": 10 * ds.C, "plain_pass": lp <= 10 * ds.C,
            "ratio": value / (10 * ds.C), "ratio_claim": ratio_claim,
            "pass": value == expected and lp <= 10 * ds.C and value / (10 * ds.C) >= ratio_claim,
            "modes": mode_flags(stage)}


def hi_witness(stage: SpaceStage, reg, ds: DependentSequence) -> dict:
    """Even terms from one family, odd from the other: bounded sums, growing differences."""
    fams = ds.families
    if any(fams[k] == fams[k + 1] for k in range(len(fams) - 1)):
        raise WitnessError("dependent sequence is not interleaved over two families")
    rows = []
    for n in range(1, len(ds.pairs) // 2 + 1):
        L = list(range(1, 2 * n + 1))
        b = blowup_witness(stage, reg, ds, 1, L)
        rows.append({"n": n, "sum_lower": b["plain_lower"], "sum_bound": b["plain_bound"],
                     "diff_lower": b["value"], "exact": b["exact"], "pass": b["pass"]})
    growing = all(rows[i]["diff_lower"] < rows[i + 1]["diff_lower"] for i in range(len(rows) - 1))
    return {"rows": rows, "difference_grows": growing, "modes": mode_flags(stage),
            "pass": growing and all(r["pass"] for r in rows)}


# ---------------------------------------------------------------- c0 spreading model estimate

def c0_sm_check(stage: SpaceStage, basis: list, C=8, nmax: int = 4, intervals=None) -> dict:
    """|e*_gamma o P_E(sum lambda_i d_{beta_{k_i}})| <= (C/m_j) max|lambda_i| for n <= k_1 < ... < k_n,
    n <= nmax, we(gamma) = 1/m_j with j < j_n, where j_1 = 1 and j_{k+1} = rank(beta_k) + 1.

    For fixed (gamma, E, n) the worst tuple takes the n largest |e*_gamma o P_E(d_beta_k)| with
    k >= n, so the maximum over all tuples and all lambdas is exact.
    """
    C = Fraction(C)
    js = [1] + [stage.rank(b) + 1 for b in basis[:-1]]
    R = stage.max_rank()
    intervals = intervals or [(a, b) for a in range(1, R + 1) for b in range(a, R + 1)]
    worst, checked, tuples = None, 0, 0
    failures = []
    K = len(basis)
    for n in range(1, nmax + 1):
        if n > K:
            break
        cand = list(range(n - 1, K))
        if len(cand) < n:
            continue
        tuples += math.comb(len(cand), n)
        jn = js[n - 1]
        for g in weighted_ids(stage):
            j = stage.node(g).j
            if j >= jn:
                continue
            row = stage.row(g)
            rhs = C / stage.schedule.m(j)
            for E in intervals:
                vals = sorted((abs(row.get(basis[k], 0)) for k in cand
                               if E[0] <= stage.rank(basis[k]) <= E[1]), reverse=True)
                lhs = sum(vals[:n], Fraction(0))
                checked += 1
                if worst is None or rhs - lhs < worst["margin"]:
                    worst = check("c0 estimate", lhs, rhs, lhs <= rhs, gamma=g, E=list(E), n=n)
                if lhs > rhs:
                    failures.append({"gamma": g, "E": list(E), "n": n, "lhs": lhs, "rhs": rhs})
    return {"C": C, "nmax": nmax, "basis": len(basis), "js": js, "checked": checked,
            "tuples": tuples, "worst": worst, "failures": failures[:10],
            "pass": checked > 0 and not failures}
