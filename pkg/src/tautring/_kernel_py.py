"""Pure-Python sparse linear algebra kernels over exact rationals.

Vectors are dicts mapping a packed monomial to a nonzero ``mpq``.  A pivot
table maps a leading monomial to a row normalized to 1 there; rows in a
table never contain another row's pivot (fully reduced echelon form).  The
leading monomial of a homogeneous row is its smallest packed key.
"""

from __future__ import annotations

from typing import Dict, Iterable, Optional, Tuple

from gmpy2 import mpq

Vec = Dict[int, "mpq"]


def axpy(acc: Vec, c, vec: Vec) -> None:
    """``acc += c * vec`` in place, dropping zeros."""
    get = acc.get
    for k, v in vec.items():
        s = get(k)
        if s is None:
            acc[k] = c * v
        else:
            s = s + c * v
            if s:
                acc[k] = s
            else:
                del acc[k]


def combine(pairs: Iterable[Tuple[object, Vec]]) -> Vec:
    acc: Vec = {}
    for c, vec in pairs:
        axpy(acc, c, vec)
    return acc


def poly_mul(a: Vec, b: Vec) -> Vec:
    if len(a) > len(b):
        a, b = b, a
    out: Vec = {}
    get = out.get
    for ma, ca in a.items():
        for mb, cb in b.items():
            k = ma + mb
            s = get(k)
            if s is None:
                out[k] = ca * cb
            else:
                s = s + ca * cb
                if s:
                    out[k] = s
                else:
                    del out[k]
    return out


def reduce_row(row: Vec, pivots: Dict[int, Vec]) -> Vec:
    """Reduce ``row`` in place against a fully reduced pivot table."""
    hits = [k for k in row if k in pivots]
    for k in hits:
        c = row.pop(k)
        piv = pivots[k]
        for kk, v in piv.items():
            if kk == k:
                continue
            s = row.get(kk)
            if s is None:
                row[kk] = -c * v
            else:
                s = s - c * v
                if s:
                    row[kk] = s
                else:
                    del row[kk]
    return row


def insert_row(row: Vec, pivots: Dict[int, Vec]) -> Optional[int]:
    """Add ``row`` to the pivot table, keeping it fully reduced.

    Returns the new pivot, or ``None`` if the row was already in the span.
    """
    reduce_row(row, pivots)
    if not row:
        return None
    lead = min(row)
    inv = 1 / row[lead]
    if inv != 1:
        for k in row:
            row[k] *= inv
    for piv in pivots.values():
        c = piv.get(lead)
        if c is not None:
            axpy(piv, -c, row)
    pivots[lead] = row
    return lead
