"""Exact row reduction over the rationals.

Rows are sparse dicts {column: Fraction}; columns are any sortable keys.
"""
from __future__ import annotations

from fractions import Fraction


def _clean(row):
    return {k: Fraction(v) for k, v in row.items() if v != 0}


def echelon(rows, order=None):
    """Reduce rows to echelon form. Returns a list of (pivot, row) pairs."""
    basis = []  # pivot -> normalized row, pivot is the first column in `order`
    pos = None if order is None else {c: i for i, c in enumerate(order)}
    key = (lambda c: c) if pos is None else (lambda c: pos[c])
    pivots = {}
    for row in rows:
        r = _clean(row)
        while r:
            piv = min(r, key=key)
            if piv not in pivots:
                lead = r[piv]
                r = {k: v / lead for k, v in r.items()}
                pivots[piv] = r
                basis.append((piv, r))
                break
            prow = pivots[piv]
            f = r[piv]
            for k, v in prow.items():
                nv = r.get(k, 0) - f * v
                if nv:
                    r[k] = nv
                else:
                    r.pop(k, None)
    return basis


def rank(rows, order=None) -> int:
    return len(echelon(rows, order))


def in_span(row, rows, order=None) -> bool:
    return rank(list(rows) + [row], order) == rank(rows, order)


def same_span(rows_a, rows_b, order=None) -> bool:
    ra = rank(rows_a, order)
    rb = rank(rows_b, order)
    return ra == rb == rank(list(rows_a) + list(rows_b), order)


def nullspace(rows, columns):
    """Basis of {v : row . v = 0 for every row}, vectors as sparse dicts over `columns`."""
    order = list(columns)
    ech = echelon(rows, order)
    # full reduction
    ech.sort(key=lambda pr: order.index(pr[0]))
    red = {}
    for piv, r in reversed(ech):
        r = dict(r)
        for p2, r2 in red.items():
            f = r.get(p2, 0)
            if f:
                for k, v in r2.items():
                    nv = r.get(k, 0) - f * v
                    if nv:
                        r[k] = nv
                    else:
                        r.pop(k, None)
        red[piv] = r
    free = [c for c in order if c not in red]
    out = []
    for fcol in free:
        v = {fcol: Fraction(1)}
        for piv, r in red.items():
            c = r.get(fcol, 0)
            if c:
                v[piv] = -c
        out.append(v)
    return out
