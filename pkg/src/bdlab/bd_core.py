"""Generic Bourgain-Delbaen engine over exact rationals.

A stage holds registered nodes grouped by rank.  Every node gamma carries an
extension functional c*_gamma written as a combination of atoms
e*_eta o P_E with eta of strictly smaller rank.  Coordinates satisfy

    e*_gamma(d_xi) = c*_gamma(d_xi) + [gamma == xi],
    e*_eta o P_E(d_xi) = [rank(xi) in E] * e*_eta(d_xi),

and are memoized per node as a sparse row {xi: e*_gamma(d_xi)}.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable


class StageError(ValueError):
    pass


class IllegalNode(StageError):
    pass


# ---------------------------------------------------------------- intervals

def in_interval(r: int, E) -> bool:
    return E is None or E[0] <= r <= E[1]


def meet(E, F):
    if E is None:
        return F
    if F is None:
        return E
    return (max(E[0], F[0]), min(E[1], F[1]))


def is_empty(E) -> bool:
    return E is not None and E[0] > E[1]


def frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def fstr(v) -> str:
    return str(frac(v))


# ---------------------------------------------------------------- nodes

@dataclass(frozen=True)
class GammaNode:
    """One coordinate.  variant is base | ageone | succ | generic.

    ageone/succ carry a weight index j and an average `avg` (see bmt); succ
    also names its predecessor.  generic nodes carry explicit c* terms
    (coef, eta, E) and an explicit label used as id.
    """
    variant: str
    rank: int
    j: int | None = None
    pred: str | None = None
    avg: object = None
    terms: tuple | None = None
    label: str | None = None

    def canonical(self) -> dict:
        d = {"variant": self.variant, "rank": self.rank}
        if self.j is not None:
            d["j"] = self.j
        if self.pred is not None:
            d["pred"] = self.pred
        if self.avg is not None:
            d["avg"] = self.avg.to_dict()
        if self.terms is not None:
            d["terms"] = [[fstr(c), eta, list(E)] for c, eta, E in self.terms]
        if self.label is not None:
            d["label"] = self.label
        return d

    @property
    def id(self) -> str:
        if self.label is not None:
            return self.label
        return _hash(self.canonical())

    def references(self) -> list:
        refs = []
        if self.pred is not None:
            refs.append(self.pred)
        if self.avg is not None:
            refs.extend(e[1] for e in self.avg.entries)
        if self.terms is not None:
            refs.extend(t[1] for t in self.terms)
        return refs

    def to_dict(self) -> dict:
        return self.canonical()

    @classmethod
    def from_dict(cls, d: dict) -> "GammaNode":
        avg = None
        if "avg" in d:
            from .bmt import AlphaAverage
            avg = AlphaAverage.from_dict(d["avg"])
        terms = None
        if "terms" in d:
            terms = tuple((Fraction(c), eta, tuple(E)) for c, eta, E in d["terms"])
        return cls(d["variant"], d["rank"], d.get("j"), d.get("pred"), avg, terms, d.get("label"))


def _hash(obj) -> str:
    s = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(s.encode()).hexdigest()[:16]


BASE = GammaNode("base", 1)


# ---------------------------------------------------------------- vectors and functionals

@dataclass
class BlockVector:
    """Finite combination of the d_gamma; `ranks` records rank(gamma) per id."""
    coeffs: dict = field(default_factory=dict)
    ranks: dict = field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = {k: frac(v) for k, v in self.coeffs.items() if v != 0}
        self.ranks = {k: self.ranks[k] for k in self.coeffs}

    @classmethod
    def basis(cls, stage: "SpaceStage", gid: str, c=1) -> "BlockVector":
        return cls({gid: frac(c)}, {gid: stage.rank(gid)})

    @classmethod
    def of(cls, stage: "SpaceStage", coeffs: dict) -> "BlockVector":
        return cls(dict(coeffs), {k: stage.rank(k) for k in coeffs})

    def supp(self) -> list:
        return sorted(set(self.ranks.values()))

    def ran(self):
        s = self.supp()
        return (s[0], s[-1]) if s else None

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "BlockVector") -> "BlockVector":
        c = dict(self.coeffs)
        r = dict(self.ranks)
        for k, v in other.coeffs.items():
            c[k] = c.get(k, 0) + v
            r[k] = other.ranks[k]
        return BlockVector(c, r)

    def __sub__(self, other: "BlockVector") -> "BlockVector":
        return self + other.scale(-1)

    def scale(self, t) -> "BlockVector":
        t = frac(t)
        return BlockVector({k: v * t for k, v in self.coeffs.items()}, dict(self.ranks))

    def __eq__(self, other):
        return isinstance(other, BlockVector) and self.coeffs == other.coeffs

    def to_dict(self) -> dict:
        return {k: fstr(self.coeffs[k]) for k in sorted(self.coeffs)}


def project(x: BlockVector, E) -> BlockVector:
    """P_E: keep the d_gamma terms with rank(gamma) in E."""
    keep = {k: v for k, v in x.coeffs.items() if in_interval(x.ranks[k], E)}
    return BlockVector(keep, {k: x.ranks[k] for k in keep})


@dataclass
class DualFunctional:
    """sum of coef * e*_gamma o P_E; E None means no projection."""
    terms: list = field(default_factory=list)

    def __add__(self, other):
        return DualFunctional(list(self.terms) + list(other.terms))

    def scale(self, t):
        t = frac(t)
        return DualFunctional([(c * t, g, E) for c, g, E in self.terms])

    def __sub__(self, other):
        return self + other.scale(-1)

    def compose(self, E) -> "DualFunctional":
        """f o P_E."""
        out = []
        for c, g, F in self.terms:
            G = meet(F, E)
            if not is_empty(G):
                out.append((c, g, G))
        return DualFunctional(out)

    def to_list(self) -> list:
        return [[fstr(c), g, None if E is None else list(E)] for c, g, E in self.terms]


def estar(gid: str, E=None, c=1) -> DualFunctional:
    return DualFunctional([(frac(c), gid, None if E is None else tuple(E))])


def dstar(stage: "SpaceStage", gid: str, c=1) -> DualFunctional:
    r = stage.rank(gid)
    return DualFunctional([(frac(c), gid, (r, r))])


# ---------------------------------------------------------------- stage

class SpaceStage:
    """Append-only registry of nodes plus the memoized coordinate rows."""

    def __init__(self, schedule, space_tag: str = "generic",
                 validator: Callable | None = None, thresholds=None):
        self.schedule = schedule
        self.space_tag = space_tag
        self.validator = validator
        self.thresholds = thresholds
        self.nodes: dict = {}
        self.order: list = []
        self.by_rank: dict = {}
        self.ages: dict = {}
        self._rows: dict = {}
        self._count_cache: dict = {}

    # -- registry
    def __contains__(self, gid) -> bool:
        return gid in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, gid: str) -> GammaNode:
        try:
            return self.nodes[gid]
        except KeyError:
            raise StageError(f"unregistered node {gid}") from None

    def rank(self, gid: str) -> int:
        return self.node(gid).rank

    def age(self, gid: str) -> int:
        return self.ages[gid]

    def weight_index(self, gid: str):
        return self.node(gid).j

    def ranks(self) -> list:
        return sorted(self.by_rank)

    def ids_upto(self, Q: int) -> list:
        return [g for q in sorted(self.by_rank) if q <= Q for g in self.by_rank[q]]

    def count_upto(self, q: int) -> int:
        return sum(len(v) for r, v in self.by_rank.items() if r <= q)

    def max_rank(self) -> int:
        return max(self.by_rank) if self.by_rank else 0

    # -- extension functionals
    def cstar_terms(self, gid: str) -> list:
        nd = self.node(gid)
        if nd.variant == "base":
            return []
        if nd.variant == "generic":
            return list(nd.terms)
        w = Fraction(1, self.schedule.m(nd.j))
        out = []
        if nd.variant == "succ":
            out.append((Fraction(1), nd.pred, (1, self.rank(nd.pred))))
        n = nd.avg.n
        for sign, eta, E in nd.avg.entries:
            out.append((w * Fraction(sign, n), eta, tuple(E)))
        return out

    def cstar(self, gid: str) -> DualFunctional:
        return DualFunctional(self.cstar_terms(gid))

    def row(self, gid: str) -> dict:
        """{xi: e*_gid(d_xi)} restricted to nonzero entries."""
        if gid in self._rows:
            return self._rows[gid]
        stack = [gid]
        while stack:
            g = stack[-1]
            if g in self._rows:
                stack.pop()
                continue
            deps = [eta for _, eta, _ in self.cstar_terms(g) if eta not in self._rows]
            if deps:
                stack.extend(deps)
                continue
            stack.pop()
            row = {g: Fraction(1)}
            for c, eta, E in self.cstar_terms(g):
                for xi, v in self._rows[eta].items():
                    if in_interval(self.nodes[xi].rank, E):
                        nv = row.get(xi, 0) + c * v
                        if nv:
                            row[xi] = nv
                        else:
                            row.pop(xi, None)
            self._rows[g] = row
        return self._rows[gid]

    def clear_cache(self):
        self._rows.clear()


def register_node(stage: SpaceStage, node: GammaNode) -> str:
    gid = node.id
    if gid in stage.nodes:
        return gid
    for ref in node.references():
        if ref not in stage.nodes:
            raise IllegalNode(f"references unregistered node {ref}")
        if stage.nodes[ref].rank >= node.rank:
            raise IllegalNode(f"references node {ref} of rank {stage.nodes[ref].rank} >= {node.rank}")
    if node.variant == "base":
        if node.rank != 1:
            raise IllegalNode("base node must have rank 1")
    elif node.rank < 2 and node.variant != "generic":
        raise IllegalNode("only the base node lives at rank 1")
    if stage.validator is not None:
        ok, reason = stage.validator(stage, node)
        if not ok:
            raise IllegalNode(reason)
    stage.nodes[gid] = node
    stage.order.append(gid)
    stage.by_rank.setdefault(node.rank, []).append(gid)
    stage.ages[gid] = stage.ages[node.pred] + 1 if node.variant == "succ" else 1
    return gid


def coordinate(stage: SpaceStage, gamma: str, xi: str) -> Fraction:
    stage.node(xi)
    return stage.row(gamma).get(xi, Fraction(0))


def evaluate(stage: SpaceStage, f: DualFunctional, x: BlockVector) -> Fraction:
    total = Fraction(0)
    for c, g, E in f.terms:
        row = stage.row(g)
        s = Fraction(0)
        for xi, v in x.coeffs.items():
            if in_interval(x.ranks[xi], E):
                w = row.get(xi)
                if w:
                    s += v * w
        total += c * s
    return total


def coordinates_of(stage: SpaceStage, x: BlockVector, ids: Iterable[str]) -> dict:
    """{gamma: e*_gamma(x)} over the given nodes, zero entries dropped."""
    out = {}
    for g in ids:
        row = stage.row(g)
        s = Fraction(0)
        for xi, v in x.coeffs.items():
            w = row.get(xi)
            if w:
                s += v * w
        if s:
            out[g] = s
    return out


def horizon_norm(stage: SpaceStage, x: BlockVector, Q: int):
    """(lower, upper) with lower = max |e*_gamma(x)| over registered rank <= Q."""
    if x.coeffs and max(x.ranks.values()) > Q:
        raise StageError(f"support of x exceeds horizon {Q}")
    lower = Fraction(0)
    for g in stage.ids_upto(Q):
        row = stage.row(g)
        s = Fraction(0)
        for xi, v in x.coeffs.items():
            w = row.get(xi)
            if w:
                s += v * w
        if abs(s) > lower:
            lower = abs(s)
    return lower, 2 * lower


def horizon_argmax(stage: SpaceStage, x: BlockVector, Q: int):
    best, arg = Fraction(0), None
    for g in stage.ids_upto(Q):
        s = evaluate(stage, estar(g), x)
        if abs(s) > best:
            best, arg = abs(s), g
    return best, arg


def extension_columns(stage: SpaceStage, q: int) -> dict:
    """i_q(e_eta) for eta in Gamma_q, written in the basis (d_xi)_{xi in Gamma_q}.

    The matrix [e*_gamma(d_xi)] on Gamma_q is unitriangular in rank order, so
    forward substitution gives its inverse exactly.
    """
    ids = stage.ids_upto(q)
    cols = {}
    for eta in ids:
        a = {}
        for g in ids:
            row = stage.row(g)
            v = Fraction(1) if g == eta else Fraction(0)
            for xi, w in row.items():
                if xi != g and xi in a:
                    v -= w * a[xi]
            if v:
                a[g] = v
        cols[eta] = a
    return cols


def extension_vector(stage: SpaceStage, q: int, eta: str, cols=None) -> BlockVector:
    cols = cols if cols is not None else extension_columns(stage, q)
    return BlockVector.of(stage, cols[eta])


def check_extension_bound(stage: SpaceStage, q: int, Q: int) -> dict:
    cols = extension_columns(stage, q)
    worst, arg = Fraction(0), None
    rows = {}
    for g in stage.ids_upto(Q):
        row = stage.row(g)
        mass = Fraction(0)
        for eta, a in cols.items():
            v = sum((c * row.get(xi, 0) for xi, c in a.items()), Fraction(0))
            mass += abs(v)
        rows[g] = mass
        if mass > worst:
            worst, arg = mass, g
    return {"q": q, "Q": Q, "max_row_mass": worst, "argmax": arg,
            "rows": len(rows), "pass": worst <= 2}


# ---------------------------------------------------------------- persistence

def dump_stage(stage: SpaceStage) -> str:
    return "".join(json.dumps(stage.nodes[g].to_dict(), sort_keys=True) + "\n" for g in stage.order)


def load_into(stage: SpaceStage, text: str) -> list:
    ids = []
    for line in text.splitlines():
        if line.strip():
            ids.append(register_node(stage, GammaNode.from_dict(json.loads(line))))
    return ids
