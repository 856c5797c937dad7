"""Exact norm of the mixed Tsirelson spaces T[(A_{k n_j}, 1/m_j)_j] on short supports.

The norm is the least fixed point of

    |x| = max(|x|_inf, max_j (1/m_j) max_{E_1<...<E_d, 2<=d<=k n_j} sum |E_i x|).

It is monotone under restriction and subadditive, so refining a partition
never lowers the sum; the inner max is therefore attained by a cover of the
support interval with exactly min(k n_j, length) pieces.
"""
from __future__ import annotations

import sys
from fractions import Fraction
from functools import lru_cache

MAX_LEN = 128


class AuxError(ValueError):
    pass


def _coerce(x) -> tuple:
    return tuple(Fraction(v) for v in x)


def mt_norm(ws, k: int, x, jmax: int):
    """(value, tail): value is the norm with weights j <= jmax, and the true norm
    lies in [value, max(value, tail)].  tail is 0 when truncation is provably exact."""
    if jmax < 1:
        raise AuxError(f"jmax must be >= 1, got {jmax}")
    if k < 1:
        raise AuxError(f"k must be >= 1, got {k}")
    x = _coerce(x)
    # trim zeros at both ends; they never change the norm
    lo, hi = 0, len(x)
    while lo < hi and x[lo] == 0:
        lo += 1
    while hi > lo and x[hi - 1] == 0:
        hi -= 1
    a = [abs(v) for v in x[lo:hi]]
    L = len(a)
    if L > MAX_LEN:
        raise AuxError(f"support length {L} exceeds the DP guard {MAX_LEN}")
    if L == 0:
        return Fraction(0), Fraction(0)
    pref = [Fraction(0)]
    for v in a:
        pref.append(pref[-1] + v)
    weights = [(Fraction(1, ws.m(j)), k * ws.n(j)) for j in range(1, jmax + 1)]

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20 * L + 1000))
    try:
        @lru_cache(maxsize=None)
        def f(i, e):
            # norm of coordinates i..e-1
            n = e - i
            best = max(a[i:e])
            if n == 1:
                return best
            for w, D in weights:
                if D >= n:
                    s = w * (pref[e] - pref[i])
                else:
                    s = w * g(i, e, D)
                if s > best:
                    best = s
            return best

        @lru_cache(maxsize=None)
        def g(i, e, D):
            # best sum of norms over a cover of i..e-1 by exactly D pieces
            if D == 1:
                return f(i, e)
            if D >= e - i:
                return pref[e] - pref[i]
            best = Fraction(0)
            for c in range(i + 1, e - D + 2):
                s = f(i, c) + g(c, e, D - 1)
                if s > best:
                    best = s
            return best

        value = f(0, L)
    finally:
        sys.setrecursionlimit(old)
    l1 = pref[L]
    if any(D >= L for _, D in weights):
        tail = Fraction(0)
    else:
        tail = l1 / ws.m(jmax + 1)
        if tail <= value:
            tail = Fraction(0)
    return value, tail


def lower_functional(ws, j: int, x) -> Fraction:
    """Value of one explicit admissible functional: weight 1/m_j on the singletons
    of the support (needs at least two and at most k n_j of them; else sup norm)."""
    x = _coerce(x)
    supp = [abs(v) for v in x if v != 0]
    if len(supp) >= 2:
        return Fraction(1, ws.m(j)) * sum(supp)
    return max(supp, default=Fraction(0))


def check_scc_lemma(ws, j: int, up_to_k: int, k: int = 4, jmax: int | None = None) -> dict:
    """For each kk <= up_to_k, |(m_j/n_j) sum_{i<=kk} e_i| <= kk/n_j + 1/m_j."""
    if up_to_k > ws.n(j):
        raise AuxError(f"up_to_k = {up_to_k} exceeds n_{j} = {ws.n(j)}")
    jmax = jmax if jmax is not None else max(j + 1, 2)
    rows, violations = [], []
    c = Fraction(ws.m(j), ws.n(j))
    for kk in range(0, up_to_k + 1):
        x = [c] * kk
        value, tail = mt_norm(ws, k, x, jmax)
        upper = max(value, tail)
        bound = Fraction(kk, ws.n(j)) + Fraction(1, ws.m(j))
        lower = Fraction(kk, ws.n(j)) if kk >= 2 else lower_functional(ws, j, x)
        ok = upper <= bound and lower <= value
        rows.append({"k": kk, "norm": value, "tail": tail, "bound": bound,
                     "lower": lower, "pass": ok})
        if not ok:
            violations.append(kk)
    return {"j": j, "k_factor": k, "jmax": jmax, "rows": rows,
            "violations": violations, "pass": not violations}
