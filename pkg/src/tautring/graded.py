"""Degree-by-degree ideals in weighted polynomial rings.

A :class:`GradedIdeal` stores, for every completed degree ``D``, the set of
standard monomials of the quotient and the normal form of every other
monomial built from the surviving variables.  A variable that becomes the
leading monomial of a linear relation is eliminated and replaced by its
normal form everywhere afterwards, so monomial enumeration only ever sees
the surviving variables.

Degree ``D`` is computed from the lower degrees without a Groebner basis:
every monomial ``M`` with some ``M / y`` non-standard is reduced through
that factor, and only when two such factors lie in different components
of the divisibility graph on ``M`` is the difference of the two
reductions added as an extra row.  New relations are then reduced against
these rows.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Set

from gmpy2 import mpq

from . import kernel
from .poly import Polynomial, VariableTable, free_series, monomials_of_degree

Vec = Dict[int, "mpq"]


class TruncationError(ValueError):
    """Raised when a computation needs a degree beyond the built range."""


class GradedIdeal:
    def __init__(self, table: VariableTable, dmax: int, active: Optional[Iterable[int]] = None):
        self.table = table
        self.dmax = dmax
        act = range(table.nvars) if active is None else active
        self.active: Set[int] = {i for i in act if table.degrees[i] <= dmax}
        self.surviving: List[int] = []
        self.rules: Dict[int, Vec] = {}
        self.std: List[List[int]] = [[0]]
        self.std_set: List[Set[int]] = [{0}]
        self.nf: List[Dict[int, Vec]] = [{}]
        self.mingens: List[List[Vec]] = [[]]
        self.n_elim: List[int] = [0]
        self.n_rel: List[int] = [0]
        self.built = 0
        self._cache: List[Dict[int, Vec]] = [{}]
        self._open: Optional[_OpenDegree] = None

    # construction
    def open_degree(self) -> "_OpenDegree":
        if self._open is not None:
            raise RuntimeError("a degree is already open")
        D = self.built + 1
        if D > self.dmax:
            raise TruncationError(f"degree {D} exceeds truncation {self.dmax}")
        self._open = _OpenDegree(self, D)
        return self._open

    def close_degree(self) -> None:
        w = self._open
        if w is None:
            raise RuntimeError("no open degree")
        w._close()
        self._open = None

    def extend(self, relations: Iterable[Polynomial] = (), upto: Optional[int] = None) -> None:
        """Add homogeneous relations and complete every degree up to ``upto``."""
        by_deg: Dict[int, List[Polynomial]] = {}
        for p in relations:
            for D in sorted(p.degrees()):
                by_deg.setdefault(D, []).append(p.homogeneous_part(D))
        top = self.dmax if upto is None else upto
        while self.built < top:
            w = self.open_degree()
            w.add(by_deg.get(w.D, []))
            self.close_degree()

    @classmethod
    def from_generators(cls, table: VariableTable, gens: Sequence[Polynomial], dmax: int,
                        active: Optional[Iterable[int]] = None) -> "GradedIdeal":
        I = cls(table, dmax, active)
        I.extend(gens)
        return I

    # queries
    def hilbert_function(self, upto: Optional[int] = None) -> List[int]:
        top = self.built if upto is None else upto
        if top > self.built:
            raise TruncationError(f"degree {top} not built (have {self.built})")
        return [len(self.std[D]) for D in range(top + 1)]

    def free_hilbert(self, upto: Optional[int] = None) -> List[int]:
        top = self.built if upto is None else upto
        return free_series([self.table.degrees[i] for i in sorted(self.active)], top)

    def slice_rank(self, D: int) -> int:
        """Dimension of the ideal in degree ``D`` inside the free ring on the active variables."""
        return self.free_hilbert(D)[D] - len(self.std[D])

    def generator_indices(self) -> List[int]:
        return list(self.surviving)

    def relation_degrees(self) -> Dict[int, int]:
        return {D: n for D, n in enumerate(self.n_rel) if n}

    def eliminated(self) -> List[int]:
        return sorted(self.rules)

    def basis(self, D: int) -> List[int]:
        self._check(D)
        return self.std[D]

    def _check(self, D: int) -> None:
        if D > self.built:
            raise TruncationError(f"degree {D} not built (have {self.built})")

    def nf_monomial(self, m: int) -> Vec:
        tb = self.table
        D = tb.degree(m)
        self._check(D)
        if m in self.std_set[D]:
            return {m: mpq(1)}
        v = self.nf[D].get(m)
        if v is not None:
            return v
        v = self._cache[D].get(m)
        if v is not None:
            return v
        v = self._split(m, self.nf_monomial, self._nf_degree_vec)
        self._cache[D][m] = v
        return v

    def _split(self, m: int, mono_fn, vec_fn) -> Vec:
        tb = self.table
        for i, e in tb.support(m):
            if i in self.rules:
                rest = m - tb.units[i]
                a = self.rules[i]
                b = self.nf_monomial(rest) if rest else {0: mpq(1)}
                return vec_fn(kernel.poly_mul(a, b))
            if i not in self.active:
                raise ValueError(f"variable {tb.labels[i]} is not part of this ring")
        raise TruncationError(f"monomial {tb.mono_str(m)} not in the enumerated range")

    def _nf_degree_vec(self, vec: Vec) -> Vec:
        out: Vec = {}
        for m, c in vec.items():
            kernel.axpy(out, c, self.nf_monomial(m))
        return out

    def reduce(self, p: Polynomial) -> Polynomial:
        """Normal form of ``p`` (any mix of built degrees)."""
        if p.table is not self.table:
            raise ValueError("polynomial over a different table")
        return Polynomial._raw(self.table, self.reduce_vec(p.terms))

    def reduce_vec(self, vec: Vec) -> Vec:
        out: Vec = {}
        for m, c in vec.items():
            kernel.axpy(out, c, self.nf_monomial(m))
        return out

    def contains(self, p: Polynomial) -> bool:
        return not self.reduce(p).terms

    def multiply(self, a: Polynomial, b: Polynomial) -> Polynomial:
        return Polynomial._raw(self.table, self.reduce_vec(kernel.poly_mul(a.terms, b.terms)))

    def coordinates(self, p: Polynomial, D: int) -> List[mpq]:
        """Coefficients of the degree-``D`` part of ``NF(p)`` on the standard basis."""
        v = self.reduce_vec(p.homogeneous_part(D).terms)
        return [v.get(m, mpq(0)) for m in self.basis(D)]

    def element(self, coords: Sequence, D: int) -> Polynomial:
        return Polynomial(self.table, {m: c for m, c in zip(self.basis(D), coords) if c})

    def minimal_generators(self, D: int) -> List[Polynomial]:
        return [Polynomial._raw(self.table, dict(v)) for v in self.mingens[D]]

    def variable_rule(self, i: int) -> Polynomial:
        """Normal form of variable ``i`` (itself if it survives)."""
        if i in self.rules:
            return Polynomial._raw(self.table, self.rules[i])
        return Polynomial._raw(self.table, {self.table.units[i]: mpq(1)})


class _OpenDegree:
    """Working state while degree ``D`` accepts new relations."""

    def __init__(self, ideal: GradedIdeal, D: int):
        self.I = ideal
        self.D = D
        tb = ideal.table
        self.new_vars = sorted(i for i in ideal.active if tb.degrees[i] == D)
        cols_vars = ideal.surviving + self.new_vars
        self.monos = monomials_of_degree(tb, D, cols_vars)
        self.pivots: Dict[int, Vec] = {}
        self.recorded: List[Vec] = []
        self.nf1: Dict[int, Vec] = {}
        self.s_rank = 0
        self._phase1()

    def _phase1(self) -> None:
        I, tb, D = self.I, self.I.table, self.D
        units, degs = tb.units, tb.degrees
        nf = I.nf
        surv = I.surviving
        cand: Dict[int, List[int]] = {}
        for M in self.monos:
            if tb.length(M) < 2:
                continue
            V = [y for y in surv
                 if (M >> (8 * y)) & 255 and (M - units[y]) in nf[D - degs[y]]]
            if V:
                cand[M] = V
        nf1 = self.nf1
        s_rows: List[Vec] = []
        for M in sorted(cand, reverse=True):
            V = cand[M]
            y0 = min(V, key=lambda y: len(nf[D - degs[y]][M - units[y]]))
            nf1[M] = self._via(M, y0)
            if len(V) > 1:
                comps = _components(tb, M, V, nf, D)
                if len(comps) > 1:
                    for comp in comps:
                        if y0 in comp:
                            continue
                        z = comp[0]
                        row = self._via(M, z)
                        kernel.axpy(row, mpq(-1), nf1[M])
                        if row:
                            s_rows.append(row)
        self.cand = cand
        for row in s_rows:
            if kernel.insert_row(row, self.pivots) is not None:
                self.s_rank += 1

    def _via(self, M: int, y: int) -> Vec:
        tb, D = self.I.table, self.D
        u = tb.units[y]
        nf1 = self.nf1
        acc: Vec = {}
        for s, c in self.I.nf[D - tb.degrees[y]][M - u].items():
            ys = s + u
            v = nf1.get(ys)
            if v is None:
                old = acc.get(ys)
                if old is None:
                    acc[ys] = c
                else:
                    old = old + c
                    if old:
                        acc[ys] = old
                    else:
                        del acc[ys]
            else:
                kernel.axpy(acc, c, v)
        return acc

    def prepare(self, p: Polynomial) -> Vec:
        """Rewrite a degree-``D`` polynomial over the current columns."""
        I, tb = self.I, self.I.table
        if p.table is not tb:
            raise ValueError("polynomial over a different table")
        out: Vec = {}
        for m, c in p.terms.items():
            if tb.degree(m) != self.D:
                raise ValueError(f"relation term of degree {tb.degree(m)} added at degree {self.D}")
            kernel.axpy(out, c, self._prep_mono(m))
        return out

    def _prep_mono(self, m: int) -> Vec:
        I, tb = self.I, self.I.table
        v = self.nf1.get(m)
        if v is not None:
            return v
        ok = True
        for i, _ in tb.support(m):
            if i in I.rules or i not in I.active:
                ok = False
                break
        if ok:
            return {m: mpq(1)}
        return I._split(m, I.nf_monomial, self._prep_vec)

    def _prep_vec(self, vec: Vec) -> Vec:
        out: Vec = {}
        for m, c in vec.items():
            kernel.axpy(out, c, self._prep_mono(m))
        return out

    def add(self, relations: Iterable[Polynomial]) -> int:
        """Add relations of degree ``D``; returns how many were new."""
        n = 0
        for p in relations:
            if not p.terms:
                continue
            row = self.prepare(p)
            if not row:
                continue
            saved = dict(row)
            if kernel.insert_row(row, self.pivots) is not None:
                self.recorded.append(saved)
                n += 1
        return n

    def add_vecs(self, rows: Iterable[Vec]) -> int:
        n = 0
        for r in rows:
            if not r:
                continue
            saved = dict(r)
            if kernel.insert_row(dict(r), self.pivots) is not None:
                self.recorded.append(saved)
                n += 1
        return n

    def contains(self, p: Polynomial) -> bool:
        row = self.prepare(p)
        kernel.reduce_row(row, self.pivots)
        return not row

    def current_dim(self) -> int:
        return len(self.monos) - len(self.cand) - len(self.pivots)

    def _close(self) -> None:
        I, tb, D = self.I, self.I.table, self.D
        piv = self.pivots
        nfD: Dict[int, Vec] = {}
        for M, row in piv.items():
            nfD[M] = {k: -v for k, v in row.items() if k != M}
        for M, vec in self.nf1.items():
            nfD[M] = kernel.reduce_row(dict(vec), piv)
        std = [m for m in self.monos if m not in nfD]
        std.sort()
        n_elim = 0
        for i in self.new_vars:
            u = tb.units[i]
            if u in nfD:
                I.rules[i] = nfD[u]
                n_elim += 1
            else:
                I.surviving.append(i)
        I.surviving.sort()
        I.std.append(std)
        I.std_set.append(set(std))
        I.nf.append(nfD)
        I._cache.append({})
        I.mingens.append(self.recorded)
        I.n_elim.append(n_elim)
        I.n_rel.append(len(self.recorded) - n_elim)
        I.built = D
        self.nf1 = {}


def _components(tb: VariableTable, M: int, V: List[int], nf, D: int) -> List[List[int]]:
    parent = {y: y for y in V}

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    units, degs = tb.units, tb.degrees
    for a in range(len(V)):
        for b in range(a + 1, len(V)):
            y, z = V[a], V[b]
            if find(y) == find(z):
                continue
            if y == z:
                continue
            rest = M - units[y]
            if not (rest >> (8 * z)) & 255:
                continue
            rest -= units[z]
            Dr = D - degs[y] - degs[z]
            if Dr > 0 and rest in nf[Dr]:
                parent[find(y)] = find(z)
    groups: Dict[int, List[int]] = {}
    for y in V:
        groups.setdefault(find(y), []).append(y)
    return list(groups.values())


def ideal_slice(generators: Sequence[Polynomial], D: int, lower: GradedIdeal) -> List[Polynomial]:
    """Echelon basis of the degree-``D`` slice of the ideal generated by ``lower`` and ``generators``.

    ``lower`` must be built through ``D - 1``; it is extended in place.
    """
    if lower.built != D - 1:
        raise ValueError("lower slices must be complete exactly through D-1")
    w = lower.open_degree()
    w.add([g for g in generators if g.terms and g.degree() == D])
    lower.close_degree()
    tb = lower.table
    out = []
    for M in sorted(lower.nf[D]):
        v = {M: mpq(1)}
        kernel.axpy(v, mpq(-1), lower.nf[D][M])
        out.append(Polynomial._raw(tb, v))
    return out


def normal_form(p: Polynomial, slices: GradedIdeal) -> Polynomial:
    return slices.reduce(p)


def hilbert_function(pres: GradedIdeal, Dmax: int) -> List[int]:
    return pres.hilbert_function(Dmax)
