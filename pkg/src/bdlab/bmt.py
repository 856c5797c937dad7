"""The base space: alpha-averages, the sets B_{p,q}, legality of nodes, and
very fast growing sequences.

The factorial N_q = (2**(q-1) * #Gamma_{q-1})! is never expanded unless a
size has to be produced.  Divisibility n | M! is decided by peeling gcds off
n against 2, 3, ..., M, and s >= M! by a running product with early exit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .bd_core import BASE, GammaNode, SpaceStage, register_node

KINDS = ("Plain", "Basic", "IC", "CO", "IR")


class AverageError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class AlphaAverage:
    """b* = (1/n) sum_i sign_i e*_{gamma_i} o P_{E_i}, declared inside B_{p,q}."""
    n: int
    entries: tuple
    window: tuple
    kind: str = "Plain"
    certificate: dict | None = field(default=None, compare=False, hash=False)

    @property
    def d(self) -> int:
        return len(self.entries)

    def size(self) -> int:
        return self.n

    def to_dict(self) -> dict:
        return {"n": str(self.n),
                "entries": [[s, g, list(E)] for s, g, E in self.entries],
                "window": list(self.window), "kind": self.kind}

    @classmethod
    def from_dict(cls, d: dict) -> "AlphaAverage":
        return cls(int(d["n"]), tuple((int(s), g, tuple(E)) for s, g, E in d["entries"]),
                   tuple(d["window"]), d["kind"])

    def functional(self):
        from .bd_core import DualFunctional
        return DualFunctional([(Fraction(s, self.n), g, tuple(E)) for s, g, E in self.entries])

    def restricted(self, E) -> "AlphaAverage | None":
        """b* o P_E as an average of the same size (entries cut to E, empty ones dropped)."""
        out = []
        for s, g, F in self.entries:
            a, b = max(E[0], F[0]), min(E[1], F[1])
            if a <= b:
                out.append((s, g, (a, b)))
        if not out:
            return None
        return AlphaAverage(self.n, tuple(out), self.window, self.kind, self.certificate)

    def with_certificate(self, cert: dict) -> "AlphaAverage":
        return AlphaAverage(self.n, self.entries, self.window, self.kind, cert)


# ---------------------------------------------------------------- thresholds

@dataclass
class NThresholds:
    """How N_q is read off a stage.

    registered: N_q = (2**(q-1) * #registered nodes of rank <= q-1)!, used both
    for denominators and for size clauses.
    toy: denominators as in `registered`, size clauses replaced by the explicit
    table `sizes` (default 1, i.e. waived).
    """
    mode: str = "registered"
    sizes: dict = field(default_factory=dict)

    def to_dict(self):
        return {"mode": self.mode, "sizes": {str(k): str(v) for k, v in sorted(self.sizes.items())}}


def factorial_argument(stage: SpaceStage, q: int) -> int:
    """M with N_q = M!."""
    if q <= 1:
        return 0
    return 2 ** (q - 1) * stage.count_upto(q - 1)


def divides_factorial(n: int, M: int) -> bool:
    if n <= 0:
        return False
    if n <= max(M, 1):
        return True
    rest = n
    k = 2
    while rest > 1 and k <= M:
        g = math.gcd(rest, k)
        if g > 1:
            rest //= g
        k += 1
    return rest == 1


def factorial_at_most(M: int, s: int) -> bool:
    """M! <= s without expanding M! past s."""
    prod = 1
    for k in range(2, M + 1):
        prod *= k
        if prod > s:
            return False
    return prod <= s


def divides_N(stage: SpaceStage, n: int, q: int) -> bool:
    return divides_factorial(n, factorial_argument(stage, q))


def meets_size(stage: SpaceStage, s: int, q: int) -> bool:
    """s >= N_q under the stage's threshold mode."""
    th = stage.thresholds or NThresholds()
    if th.mode == "toy":
        return s >= int(th.sizes.get(q, 1))
    return factorial_at_most(factorial_argument(stage, q), s)


def least_size(stage: SpaceStage, q: int, cap: int = 200000) -> int:
    th = stage.thresholds or NThresholds()
    if th.mode == "toy":
        return int(th.sizes.get(q, 1))
    M = factorial_argument(stage, q)
    if M > cap:
        raise AverageError([f"N_{q} = ({M})! is too large to materialize"])
    return math.factorial(M)


# ---------------------------------------------------------------- averages

def _structural(entries, n, window, kind) -> list:
    v = []
    if kind not in KINDS:
        v.append(f"unknown kind {kind!r}")
    if not isinstance(n, int) or n < 1:
        v.append("size n must be a positive integer")
        return v
    d = len(entries)
    if d < 1:
        v.append("at least one entry (d >= 1)")
    if d > n:
        v.append(f"d <= n violated ({d} > {n})")
    p, q = window
    if not (0 <= p < q):
        v.append(f"window needs 0 <= p < q, got ({p}, {q})")
    prev = None
    for i, (s, g, E) in enumerate(entries):
        if s not in (1, -1):
            v.append(f"entry {i + 1}: sign must be +-1")
        if E[0] > E[1] or E[0] < 1:
            v.append(f"entry {i + 1}: bad interval {list(E)}")
        if prev is not None and not prev[1] < E[0]:
            v.append(f"intervals not successive at entry {i + 1}")
        prev = E
    if entries:
        if not p < entries[0][2][0]:
            v.append(f"window: p < min E_1 violated ({p} >= {entries[0][2][0]})")
        if not entries[-1][2][1] <= q:
            v.append(f"window: max E_d <= q violated ({entries[-1][2][1]} > {q})")
    return v


def _staged(stage: SpaceStage, entries, n, window, kind) -> list:
    v = []
    p, q = window
    weights = []
    for i, (s, g, E) in enumerate(entries):
        if g not in stage:
            v.append(f"entry {i + 1}: unregistered node {g}")
            continue
        r = stage.rank(g)
        if not p < r <= q:
            v.append(f"entry {i + 1}: node rank {r} outside (p, q] = ({p}, {q}]")
        if kind == "Basic" and tuple(E) != (r, r):
            v.append(f"entry {i + 1}: basic entries are d* atoms, need E = {{rank}} = {r}")
        if kind in ("IC", "CO", "IR"):
            if r < E[0]:
                v.append(f"entry {i + 1}: rank(gamma) >= min E violated")
            weights.append(stage.weight_index(g))
    if kind in ("IC", "CO", "IR"):
        if any(w is None for w in weights):
            v.append("weights: the base node carries no weight")
        elif any(a >= b for a, b in zip(weights, weights[1:])):
            v.append("weights not strictly decreasing")
    if not divides_N(stage, n, q + 1):
        v.append(f"denominator: n = {n} does not divide N_{q + 1}")
    return v


def average_violations(entries, n, window, kind, stage: SpaceStage | None = None) -> list:
    entries = tuple((int(s), g, tuple(E)) for s, g, E in entries)
    v = _structural(entries, n, tuple(window), kind)
    if stage is not None and not v:
        v += _staged(stage, entries, n, tuple(window), kind)
    return v


def make_alpha_average(entries, n: int, window, kind_hint: str = "Plain",
                       stage: SpaceStage | None = None, certificate=None) -> AlphaAverage:
    entries = tuple((int(s), g, tuple(E)) for s, g, E in entries)
    v = average_violations(entries, n, window, kind_hint, stage)
    if v:
        raise AverageError(v)
    return AlphaAverage(int(n), entries, tuple(window), kind_hint, certificate)


def basic_average(stage: SpaceStage, signed_ids, n: int | None = None, window=None) -> AlphaAverage:
    """(1/n) sum sign_i d*_{gamma_i}; ranks must increase."""
    entries = [(s, g, (stage.rank(g), stage.rank(g))) for s, g in signed_ids]
    n = len(entries) if n is None else n
    if window is None:
        window = (entries[0][2][0] - 1, entries[-1][2][1])
    return make_alpha_average(entries, n, window, "Basic", stage)


def in_B(stage: SpaceStage, avg: AlphaAverage, p: int, q: int) -> list:
    """Violations of avg in B_{p,q} (empty list means membership)."""
    v = []
    ap, aq = avg.window
    if ap < p or aq > q:
        v.append(f"declared window ({ap}, {aq}) not inside ({p}, {q}]")
    v += average_violations(avg.entries, avg.n, (p, q), avg.kind, stage)
    return v


# ---------------------------------------------------------------- nodes

def is_legal_bmt_node(ws, stage: SpaceStage, node: GammaNode):
    ws = ws or stage.schedule
    if node.variant == "base":
        if node.rank != 1:
            return False, "base node must have rank 1"
        return True, "ok"
    if node.variant not in ("ageone", "succ"):
        return False, f"variant {node.variant!r} is not a base-space shape"
    q = node.rank - 1
    j = node.j
    if q < 1:
        return False, "rank: non-base nodes need rank >= 2"
    if j is None or j < 1:
        return False, "weight index j must be >= 1"
    if node.avg is None:
        return False, "missing average"
    if node.variant == "ageone":
        if j > q + 1:
            return False, f"weight index j = {j} exceeds rank {q + 1}"
        v = in_B(stage, node.avg, 0, q)
        if v:
            return False, "avg not in B_{0,%d}: %s" % (q, "; ".join(v))
        return True, "ok"
    if node.pred not in stage:
        return False, f"unregistered predecessor {node.pred}"
    pred = stage.node(node.pred)
    p = pred.rank
    if pred.variant == "base":
        return False, "predecessor must carry a weight"
    if p > q - 1:
        return False, f"predecessor rank {p} > q-1 = {q - 1}"
    if pred.j != j:
        return False, f"weight mismatch: we(pred) = 1/m_{pred.j} != 1/m_{j}"
    if j > p:
        return False, f"weight index j = {j} exceeds predecessor rank {p}"
    if stage.age(node.pred) >= ws.n(j):
        return False, f"age bound: ag(pred) = {stage.age(node.pred)} >= n_{j} = {ws.n(j)}"
    v = in_B(stage, node.avg, p, q)
    if v:
        return False, "avg not in B_{%d,%d} (intervals of (p,q]): %s" % (p, q, "; ".join(v))
    return True, "ok"


def new_bmt_stage(ws, thresholds: NThresholds | None = None) -> SpaceStage:
    st = SpaceStage(ws, "bmt", validator=lambda s, n: is_legal_bmt_node(None, s, n),
                    thresholds=thresholds or NThresholds())
    register_node(st, BASE)
    return st


def canonical_ageone(stage: SpaceStage, q: int) -> GammaNode:
    """The node (q, 1/m_1, d*_0) present at every rank q >= 2."""
    avg = AlphaAverage(1, ((1, BASE.id, (1, 1)),), (0, q - 1), "Basic")
    return GammaNode("ageone", q, 1, None, avg)


def ageone(j: int, avg: AlphaAverage, rank: int | None = None) -> GammaNode:
    return GammaNode("ageone", rank if rank is not None else avg.window[1] + 1, j, None, avg)


def succ(stage: SpaceStage, pred: str, avg: AlphaAverage, rank: int | None = None) -> GammaNode:
    return GammaNode("succ", rank if rank is not None else avg.window[1] + 1,
                     stage.weight_index(pred), pred, avg)


# ---------------------------------------------------------------- very fast growing

def _support_bounds(stage: SpaceStage, avg: AlphaAverage):
    lo = min(min(E[0] for _, _, E in avg.entries), min(stage.rank(g) for _, g, _ in avg.entries))
    hi = max(max(E[1] for _, _, E in avg.entries), max(stage.rank(g) for _, g, _ in avg.entries))
    return lo, hi


def is_very_fast_growing(seq, stage: SpaceStage):
    """(ok, witness) with witness = list of windows (p_k, q_k), or a reason."""
    windows = []
    prev_q = None
    top = stage.max_rank() + 1
    for k, b in enumerate(seq, 1):
        lo, hi = _support_bounds(stage, b)
        p_min = 0 if prev_q is None else prev_q + 1
        if p_min > lo - 1:
            return False, {"reason": f"average {k}: no window p with p > q_{k - 1} and p < min support", "windows": windows}
        p = p_min
        q = max(hi, p + 1)
        while not divides_N(stage, b.n, q + 1):
            q += 1
            if q > top + 64:
                return False, {"reason": f"average {k}: size {b.n} divides no reachable N_(q+1)", "windows": windows}
        if k > 1 and not meets_size(stage, b.n, prev_q + 1):
            return False, {"reason": f"average {k}: size {b.n} < N_{prev_q + 1}", "windows": windows}
        windows.append((p, q))
        prev_q = q
    sizes = [b.n for b in seq]
    return True, {"windows": windows,
                  "sizes_increasing": all(a < b for a, b in zip(sizes, sizes[1:])),
                  "threshold_mode": (stage.thresholds or NThresholds()).mode}
