"""Weight sequences (m_j, n_j) with m_j = base**j.

Two n-rules are supported: a closed-form power rule
n_j = factor * base**(exponent*j), and an explicit finite list.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class WeightSchedule:
    base: int
    n_rule: dict = field(hash=False)
    mode: str = "toy"
    depth: int = 64

    def m(self, j: int) -> int:
        if j < 1:
            raise ScheduleError(f"weight index must be >= 1, got {j}")
        return self.base ** j

    def n(self, j: int) -> int:
        if j < 1:
            raise ScheduleError(f"weight index must be >= 1, got {j}")
        rule = self.n_rule
        if rule["kind"] == "power":
            return rule.get("factor", 1) * self.base ** (rule.get("exponent", 1) * j)
        if j > len(rule["values"]):
            raise ScheduleError(f"n_{j} beyond the listed depth {len(rule['values'])}")
        return int(rule["values"][j - 1])

    def weight(self, j: int) -> Fraction:
        return Fraction(1, self.m(j))

    # closed forms of the geometric tails
    def inverse_sum(self) -> Fraction:
        """Sum over all j >= 1 of 1/m_j."""
        return Fraction(1, self.base - 1)

    def tail_sum(self, i: int) -> Fraction:
        """Sum over j > i of 1/m_j."""
        return Fraction(1, (self.base - 1) * self.base ** i)

    def to_config(self) -> dict:
        return {"base": self.base, "n_rule": dict(self.n_rule), "mode": self.mode}


def make_schedule(base: int, n_rule: dict | list, mode: str = "toy", depth: int | None = None) -> WeightSchedule:
    if not isinstance(base, int) or base < 8:
        raise ScheduleError(f"base must be an integer >= 8 (m_1 >= 8), got {base}")
    if mode not in ("toy", "strict"):
        raise ScheduleError(f"unknown mode {mode!r}")
    if isinstance(n_rule, (list, tuple)):
        n_rule = {"kind": "list", "values": list(n_rule)}
    kind = n_rule.get("kind")
    if kind == "power":
        factor = n_rule.get("factor", 1)
        exponent = n_rule.get("exponent", 1)
        if not (isinstance(factor, int) and isinstance(exponent, int)) or factor < 1 or exponent < 1:
            raise ScheduleError("power rule needs integer factor >= 1 and exponent >= 1")
        # factor*base^(e*j) >= base^j and strictly increasing for every j
        rule = {"kind": "power", "factor": factor, "exponent": exponent}
        depth = 64 if depth is None else depth
    elif kind == "list":
        values = [int(v) for v in n_rule["values"]]
        if not values:
            raise ScheduleError("empty n list")
        rule = {"kind": "list", "values": values}
        depth = len(values) if depth is None else min(depth, len(values))
    else:
        raise ScheduleError(f"unknown n_rule kind {kind!r}")
    ws = WeightSchedule(base, rule, mode, depth)
    prev = 0
    for j in range(1, (len(rule["values"]) if kind == "list" else 0) + 1):
        nj = ws.n(j)
        if nj <= prev:
            raise ScheduleError(f"n_rule not strictly increasing at j={j}: {nj} <= {prev}")
        if nj < ws.m(j):
            raise ScheduleError(f"n_{j} = {nj} < m_{j} = {ws.m(j)}")
        prev = nj
    return ws


def schedule_from_config(cfg: dict) -> WeightSchedule:
    return make_schedule(cfg["base"], cfg["n_rule"], cfg.get("mode", "toy"), cfg.get("depth"))


def t1(mode: str = "toy") -> WeightSchedule:
    """base 8, n_j = 8**(2j)."""
    return make_schedule(8, {"kind": "power", "factor": 1, "exponent": 2}, mode)


def flat(mode: str = "toy") -> WeightSchedule:
    """base 8, n_j = m_j: the smallest schedule allowed; used for desk-size witnesses."""
    return make_schedule(8, {"kind": "power", "factor": 1, "exponent": 1}, mode)


def validate_strict(ws: WeightSchedule, depth: int) -> dict:
    """Evaluate every lacunarity inequality up to `depth` exactly.

    (a) sum_{j=i..k} 1/m_j <= 2/m_i  (worst case of a decreasing weight run)
    (b) 10 n_i m_i/n_j + 10 m_i/m_j + 4 n_i m_i m_j/n_j < 24 m_i/m_j for i < j
    (c) n_j > m_j^2 n_{j-1}; only enforced in strict mode
    """
    if depth > ws.depth:
        raise ScheduleError(f"depth {depth} exceeds schedule depth {ws.depth}")
    checks = []
    for i in range(1, depth + 1):
        run = Fraction(0)
        for k in range(i, depth + 1):
            run += Fraction(1, ws.m(k))
            rhs = Fraction(2, ws.m(i))
            checks.append({"item": "a", "indices": [i, k], "lhs": run, "rhs": rhs,
                           "pass": run <= rhs, "enforced": True})
    for i in range(1, depth + 1):
        mi, ni = ws.m(i), ws.n(i)
        for j in range(i + 1, depth + 1):
            mj, nj = ws.m(j), ws.n(j)
            lhs = Fraction(10 * ni * mi, nj) + Fraction(10 * mi, mj) + Fraction(4 * ni * mi * mj, nj)
            rhs = Fraction(24 * mi, mj)
            checks.append({"item": "b", "indices": [i, j], "lhs": lhs, "rhs": rhs,
                           "pass": lhs < rhs, "enforced": True})
    for j in range(2, depth + 1):
        lhs = Fraction(ws.n(j))
        rhs = Fraction(ws.m(j) ** 2 * ws.n(j - 1))
        checks.append({"item": "c", "indices": [j - 1, j], "lhs": lhs, "rhs": rhs,
                       "pass": lhs > rhs, "enforced": ws.mode == "strict"})
    failed = [c for c in checks if not c["pass"]]
    return {
        "schedule": ws.to_config(),
        "depth": depth,
        "checks": checks,
        "failed": [[c["item"]] + c["indices"] for c in failed],
        "ok": all(c["pass"] for c in checks if c["enforced"]),
    }
