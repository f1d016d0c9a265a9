"""Exact subspace arithmetic on sparse rational vectors (dict index -> mpq)."""

from __future__ import annotations

from typing import Dict, List, Sequence

from gmpy2 import mpq

from . import kernel

Vec = Dict[int, "mpq"]
_MARK = 1 << 40


def echelon(vectors: Sequence[Vec]) -> Dict[int, Vec]:
    piv: Dict[int, Vec] = {}
    for v in vectors:
        if v:
            kernel.insert_row(dict(v), piv)
    return piv


def span(vectors: Sequence[Vec]) -> List[Vec]:
    piv = echelon(vectors)
    return [piv[k] for k in sorted(piv)]


def rank(vectors: Sequence[Vec]) -> int:
    return len(echelon(vectors))


def in_span(v: Vec, piv: Dict[int, Vec]) -> bool:
    return not kernel.reduce_row(dict(v), piv)


def kernel_of(images: Sequence[Vec]) -> List[Vec]:
    """Basis of ``{x : sum_i x_i images[i] = 0}`` (as dicts over ``i``)."""
    piv: Dict[int, Vec] = {}
    for i, img in enumerate(images):
        row = dict(img)
        row[_MARK + i] = mpq(1)
        kernel.insert_row(row, piv)
    out = []
    for k in sorted(piv):
        if k >= _MARK:
            out.append({kk - _MARK: v for kk, v in piv[k].items()})
    return out


def intersection(U: Sequence[Vec], V: Sequence[Vec]) -> List[Vec]:
    U, V = span(U), span(V)
    if not U or not V:
        return []
    ker = kernel_of(list(U) + [{k: -c for k, c in v.items()} for v in V])
    out = []
    for x in ker:
        acc: Vec = {}
        for i, c in x.items():
            if i < len(U):
                kernel.axpy(acc, c, U[i])
        if acc:
            out.append(acc)
    return span(out)


def dense(v: Vec, n: int) -> List[mpq]:
    return [v.get(i, mpq(0)) for i in range(n)]


def sparse(v: Sequence) -> Vec:
    return {i: mpq(c) for i, c in enumerate(v) if c}
