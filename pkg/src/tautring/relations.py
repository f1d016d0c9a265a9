"""Geometric relation families and the quadratic descendent identities.

MR
    Chern classes of the twisted pushforward of the universal sheaf
    vanish above its rank.  Computed by the Newton recurrence from the
    power sums ``p_l = l! ch_l(td)``.
GMR
    Chern classes of ``-RHom`` between two universal sheaves vanish above
    ``d d'``; pairing the right factor against homology classes of the
    second moduli space gives relations on the first.
BR
    Products of ``b + 1`` pulled-back hyperplane classes vanish.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from . import kernel
from .descendent import SPACE, STACK, ToppType, _kj, ch, ch_td, drop_c11, sigma
from .graded import GradedIdeal
from .poly import C_TABLE, Polynomial, VariableTable, cvar
from .virasoro import KUNNETH

MR, GMR, BR = "MR", "GMR", "BR"


@dataclass
class RelationBatch:
    family: str
    params: Dict[str, object]
    polys: List[Polynomial] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)


def _space(p: Polynomial, kind: str) -> Polynomial:
    return drop_c11(p) if kind == SPACE else p


# ---------------------------------------------------------------- MR
def mr_twists(alpha: ToppType, Dmax: int) -> List[Tuple[int, int]]:
    """Admissible ``(sign, k)`` with ``g <= sign*chi + k*d < Dmax``."""
    out = []
    for sign in (1, -1):
        base = sign * alpha.chi
        kmin = -((base - alpha.g) // alpha.d)
        k = kmin
        while base + k * alpha.d < Dmax:
            if base + k * alpha.d >= alpha.g:
                out.append((sign, k))
            k += 1
    return out


class MumfordStream:
    """The classes ``A_j`` of one twist, produced degree by degree."""

    def __init__(self, alpha: ToppType, sign: int, k: int, kind: str = STACK):
        rank = sign * alpha.chi + k * alpha.d
        if rank < alpha.g:
            raise ValueError(f"twist rank {rank} = {'+' if sign > 0 else '-'}chi + {k}d is below g = {alpha.g}")
        self.alpha, self.sign, self.k, self.kind = alpha, sign, k, kind
        self.rank = rank
        self.twisted = ToppType(alpha.d, rank)
        self.p: List[Polynomial] = [Polynomial.zero(C_TABLE)]
        self.A: List[Polynomial] = [Polynomial.const(C_TABLE, 1)]
        self._reduced = 0

    def _power_sum(self, l: int) -> Polynomial:
        while len(self.p) <= l:
            n = len(self.p)
            q = ch_td(n, self.twisted).scale(factorial(n))
            if self.sign < 0:
                q = sigma(q)
            self.p.append(_space(q, self.kind))
        return self.p[l]

    def chern(self, j: int, ideal: Optional[GradedIdeal] = None) -> Polynomial:
        """``A_j``; lower classes are reduced modulo ``ideal`` where it is built."""
        while len(self.A) <= j:
            n = len(self.A)
            if ideal is not None:
                top = min(n - 1, ideal.built)
                for t in range(self._reduced + 1, top + 1):
                    self.A[t] = ideal.reduce(self.A[t])
                self._reduced = max(self._reduced, top)
            acc: Dict[int, mpq] = {}
            for l in range(1, n + 1):
                sgn = 1 if l % 2 else -1
                kernel.axpy(acc, mpq(sgn, n), kernel.poly_mul(self._power_sum(l).terms, self.A[n - l].terms))
            self.A.append(Polynomial._raw(C_TABLE, acc))
        return self.A[j]

    def relation(self, j: int, ideal: Optional[GradedIdeal] = None) -> Optional[Polynomial]:
        if j <= self.rank:
            return None
        return self.chern(j, ideal)


def mumford_relations(alpha: ToppType, sign: int, k: int, Dtarget: int, kind: str = STACK) -> RelationBatch:
    s = MumfordStream(alpha, sign, k, kind)
    batch = RelationBatch(MR, {"sign": sign, "k": k, "rank": s.rank})
    for j in range(s.rank + 1, Dtarget + 1):
        batch.polys.append(s.chern(j))
    return batch


def primitive_mr(alpha: ToppType, Dtarget: int, kind: str = STACK) -> RelationBatch:
    batch = RelationBatch(MR, {"primitive": True})
    for sign, k in mr_twists(alpha, Dtarget):
        s = MumfordStream(alpha, sign, k, kind)
        batch.polys.append(s.chern(s.rank + 1))
    return batch


def mr_identity_residual(alpha_twisted: ToppType, n: int, j: int) -> Polynomial:
    """``R_n(A_j) - (-1)^n (j+n) A_{j+n} - sum_l (-1)^{n+l} l! ch_l(td) A_{j+n-l}``."""
    from .virasoro import apply_Rn

    s = MumfordStream(alpha_twisted, 1, 0) if alpha_twisted.chi >= alpha_twisted.g else None
    if s is None:
        raise ValueError("need chi >= g")
    lhs = apply_Rn(n, s.chern(j), alpha_twisted)
    rhs = s.chern(j + n).scale((-1) ** n * (j + n))
    for l in range(1, n + 1):
        rhs = rhs + (ch_td(l, alpha_twisted) * s.chern(j + n - l)).scale((-1) ** ((n + l) % 2) * factorial(l))
    return lhs - rhs


# ---------------------------------------------------------------- GMR
def slope_window(alpha: ToppType, alpha_p: ToppType) -> bool:
    mu, mup = Fraction(alpha.chi, alpha.d), Fraction(alpha_p.chi, alpha_p.d)
    return mup < mu < mup + 3


def precedes(alpha_p: ToppType, alpha: ToppType) -> bool:
    """The order on types used for the induction."""
    return alpha_p.d < alpha.d or (alpha_p.d == alpha.d and alpha_p.m < alpha.m)


@dataclass
class RightRing:
    """A computed ring used as the right tensor factor.

    ``ideal`` is the ring of ``base``; ``alpha`` is the actual type, equal to
    ``base`` up to ``chi -> chi + d`` (identity on coordinates) and
    ``chi -> -chi`` (the sign involution, flagged by ``flip``).
    """

    alpha: ToppType
    kind: str
    ideal: GradedIdeal
    flip: bool = False

    def to_base(self, p: Polynomial) -> Polynomial:
        q = sigma(p) if self.flip else p
        return _space(q, self.kind)

    def coords(self, p: Polynomial, e: int) -> List[mpq]:
        return self.ideal.coordinates(self.to_base(p), e)

    def dim(self, e: int) -> int:
        return len(self.ideal.basis(e))


def right_ring_for(alpha_p: ToppType, kind: str, ideal: GradedIdeal, base: ToppType) -> RightRing:
    """Wrap ``ideal`` (computed for ``base``) as the ring of ``alpha_p``."""
    if base.d != alpha_p.d:
        raise ValueError("base and target degree differ")
    if (alpha_p.chi - base.chi) % base.d == 0:
        return RightRing(alpha_p, kind, ideal, False)
    if (alpha_p.chi + base.chi) % base.d == 0:
        return RightRing(alpha_p, kind, ideal, True)
    raise ValueError(f"{alpha_p} is not related to {base} by the ring isomorphisms")


class GMRStream:
    """Bigraded pieces ``C_{L,e}`` for a pair ``(alpha, alpha')``.

    ``C[L][e][t]`` is the left polynomial paired with the ``t``-th standard
    monomial of degree ``e`` of the right ring.
    """

    def __init__(self, alpha: ToppType, kind: str, right: RightRing, e_cap: Optional[int] = None,
                 check_window: bool = True):
        if check_window and not slope_window(alpha, right.alpha):
            raise ValueError(f"slope window fails for {alpha} against {right.alpha}")
        self.alpha, self.kind, self.right = alpha, kind, right
        self.ddp = alpha.d * right.alpha.d
        top = right.ideal.built
        self.e_cap = top if e_cap is None else min(e_cap, top)
        E = self.e_cap
        self.dims = [right.dim(e) for e in range(E + 1)]
        # right factors r_i(b) as coordinate vectors, left factors l_i(a)
        self.rvec: List[List[List[mpq]]] = []
        for b in range(E + 1):
            row = []
            for jl, jr, coef in KUNNETH:
                row.append(right.coords(ch(b, jr, right.alpha), b) if b > 0 else
                           [ch(0, jr, right.alpha).coefficient(0)] * min(1, self.dims[0]))
            self.rvec.append(row)
        self._left: Dict[int, List[Polynomial]] = {}
        # multiplication in the right ring: mult[(b, f)][u][s] -> coords in degree b+f
        self._mult: Dict[Tuple[int, int], List[List[List[mpq]]]] = {}
        self.C: List[List[List[Polynomial]]] = []
        self._reduced = -1
        self._c0: List[List[mpq]] = []
        self._build_c0()

    def _left_factor(self, a: int) -> List[Polynomial]:
        if a not in self._left:
            self._left[a] = [_space(ch(a, jl, self.alpha), self.kind) for jl, _, _ in KUNNETH]
        return self._left[a]

    def _mult_table(self, b: int, f: int):
        key = (b, f)
        if key not in self._mult:
            I = self.right.ideal
            tb = I.table
            out = []
            for u in I.basis(b):
                row = []
                for s in I.basis(f):
                    v = I.nf_monomial(u + s)
                    row.append([v.get(t, mpq(0)) for t in I.basis(b + f)])
                out.append(row)
            self._mult[key] = out
        return self._mult[key]

    def _times(self, w: Sequence[mpq], b: int, s_idx: int, f: int) -> List[mpq]:
        """Coordinates of ``w * basis_f[s_idx]`` (``w`` in degree ``b``)."""
        n = self.dims[b + f]
        out = [mpq(0)] * n
        mt = self._mult_table(b, f)
        for u, wu in enumerate(w):
            if wu:
                vec = mt[u][s_idx]
                for t in range(n):
                    if vec[t]:
                        out[t] += wu * vec[t]
        return out

    def _coef(self, a: int, b: int, i: int) -> mpq:
        jl, _, coef = KUNNETH[i]
        sgn = -1 if (b + jl) % 2 else 1
        return coef * sgn * factorial(a + b - 1)

    def _build_c0(self) -> None:
        """Left-degree-0 part: numbers times right classes."""
        E = self.e_cap
        c0: List[List[mpq]] = [[mpq(1)] + [mpq(0)] * (self.dims[0] - 1)] if self.dims[0] else [[]]
        lconst = [ch(0, jl, self.alpha).coefficient(0) for jl, _, _ in KUNNETH]
        for e in range(1, E + 1):
            acc = [mpq(0)] * self.dims[e]
            for b in range(1, e + 1):
                for i in range(len(KUNNETH)):
                    lc = lconst[i]
                    if not lc:
                        continue
                    w = self.rvec[b][i]
                    if not any(w):
                        continue
                    scal = self._coef(0, b, i) * lc * b
                    prev = c0[e - b]
                    for s, cs in enumerate(prev):
                        if not cs:
                            continue
                        prod = self._times(w, b, s, e - b)
                        for t, v in enumerate(prod):
                            if v:
                                acc[t] += scal * cs * v
            c0.append([x / e for x in acc])
        self._c0 = c0
        self.C = [[[Polynomial.const(C_TABLE, x) for x in c0[e]] for e in range(E + 1)]]

    def component(self, L: int, ideal: Optional[GradedIdeal] = None) -> List[List[Polynomial]]:
        """``C_{L,e}`` for all ``e <= e_cap``; lower pieces reduced modulo ``ideal``."""
        while len(self.C) <= L:
            n = len(self.C)
            if ideal is not None:
                top = min(n - 1, ideal.built)
                for Lr in range(self._reduced + 1, top + 1):
                    if Lr >= 1:
                        self.C[Lr] = [[ideal.reduce(p) for p in row] for row in self.C[Lr]]
                self._reduced = max(self._reduced, top)
            self.C.append(self._next(n))
        return self.C[L]

    def _next(self, L: int) -> List[List[Polynomial]]:
        E = self.e_cap
        out = []
        for e in range(E + 1):
            acc = [dict() for _ in range(self.dims[e])]
            for a in range(1, L + 1):
                lf = self._left_factor(a)
                for b in range(0, e + 1):
                    prevs = self.C[L - a][e - b]
                    for i in range(len(KUNNETH)):
                        l_i = lf[i]
                        if not l_i.terms:
                            continue
                        w = self.rvec[b][i]
                        if not any(w):
                            continue
                        scal = self._coef(a, b, i) * a / L
                        for s, ps in enumerate(prevs):
                            if not ps.terms:
                                continue
                            prod = self._times(w, b, s, e - b)
                            if not any(prod):
                                continue
                            lp = kernel.poly_mul(l_i.terms, ps.terms)
                            for t, v in enumerate(prod):
                                if v:
                                    kernel.axpy(acc[t], scal * v, lp)
            out.append([Polynomial._raw(C_TABLE, x) for x in acc])
        return out

    def relations(self, L: int, ideal: Optional[GradedIdeal] = None, primitive: bool = False) -> List[Polynomial]:
        """Relations of left degree ``L``: components of ``C_{L,e}`` with ``L + e > d d'``."""
        comp = self.component(L, ideal)
        out = []
        for e in range(self.e_cap + 1):
            j = L + e
            if j <= self.ddp:
                continue
            if primitive and not (j == self.ddp + 1 or (j == self.ddp + 2 and 2 * e == self.ddp + 2)):
                continue
            out.extend(p for p in comp[e] if p.terms)
        return out


def c_class(alpha: ToppType, right: RightRing, Dmax: int, kind: str = STACK) -> GMRStream:
    s = GMRStream(alpha, kind, right, check_window=False)
    s.component(Dmax)
    return s


def gmr_relations(alpha: ToppType, right: RightRing, j: int, Dtarget: int, kind: str = STACK) -> RelationBatch:
    if not slope_window(alpha, right.alpha):
        raise ValueError(f"slope window fails for {alpha} against {right.alpha}")
    ddp = alpha.d * right.alpha.d
    if j <= ddp:
        raise ValueError(f"need j > d d' = {ddp}")
    s = GMRStream(alpha, kind, right)
    batch = RelationBatch(GMR, {"alpha_prime": (right.alpha.d, right.alpha.chi), "j": j})
    for L in range(0, min(j, Dtarget) + 1):
        e = j - L
        if e > s.e_cap:
            continue
        for t, p in enumerate(s.component(L)[e]):
            if p.terms:
                batch.polys.append(p)
    return batch


def primitive_gmr(alpha: ToppType, right: RightRing, Dtarget: int, kind: str = STACK) -> RelationBatch:
    s = GMRStream(alpha, kind, right)
    batch = RelationBatch(GMR, {"alpha_prime": (right.alpha.d, right.alpha.chi), "primitive": True})
    for L in range(1, Dtarget + 1):
        batch.polys.extend(s.relations(L, primitive=True))
    return batch


# ---------------------------------------------------------------- BR
def _partitions(n: int, parts: int, minpart: int = 1):
    if parts == 0:
        if n == 0:
            yield ()
        return
    for first in range(minpart, n // parts + 1):
        for rest in _partitions(n - first, parts - 1, first):
            yield (first,) + rest


def base_relations(alpha: ToppType, Dtarget: int, kind: str = STACK) -> RelationBatch:
    b = alpha.b
    batch = RelationBatch(BR, {"b": b})
    for D in range(b + 1, Dtarget + 1):
        batch.polys.extend(base_relations_at(alpha, D))
    return batch


def base_relations_at(alpha: ToppType, D: int) -> List[Polynomial]:
    out = []
    for part in _partitions(D, alpha.b + 1):
        p = Polynomial.const(C_TABLE, 1)
        for i in part:
            p = p * cvar(i - 1, 2)
        out.append(p)
    return out


def primitive_br(alpha: ToppType) -> Polynomial:
    return cvar(0, 2) ** (alpha.b + 1)


# ---------------------------------------------------------------- tensor identities
def lr_table(dmax: int) -> VariableTable:
    ents = []
    for i in range(C_TABLE.nvars):
        if C_TABLE.degrees[i] <= dmax:
            ents.append((C_TABLE.labels[i], C_TABLE.degrees[i], C_TABLE.cherns[i]))
            ents.append((C_TABLE.labels[i] + "'", C_TABLE.degrees[i], C_TABLE.cherns[i]))
    return VariableTable(ents)


class TensorAlgebra:
    """``D_alpha (x) D_alpha'`` as one polynomial ring with primed right variables."""

    def __init__(self, alpha: ToppType, alpha_p: ToppType, dmax: int):
        self.alpha, self.alpha_p, self.dmax = alpha, alpha_p, dmax
        self.table = lr_table(dmax + 1)
        self._left_idx = {}
        self._right_idx = {}
        for i in range(C_TABLE.nvars):
            lab = C_TABLE.labels[i]
            if lab in self.table.index:
                self._left_idx[i] = self.table.index[lab]
                self._right_idx[i] = self.table.index[lab + "'"]
        self.is_right = {self.table.index[l]: l.endswith("'") for l in self.table.labels}

    def left(self, p: Polynomial) -> Polynomial:
        return self._move(p, self._left_idx)

    def right(self, p: Polynomial) -> Polynomial:
        return self._move(p, self._right_idx)

    def _move(self, p: Polynomial, idx) -> Polynomial:
        out = {}
        tb = self.table
        for m, c in p.terms.items():
            mm = 0
            for i, e in C_TABLE.support(m):
                mm += e * tb.units[idx[i]]
            out[mm] = c
        return Polynomial._raw(tb, out)

    def bidegree(self, m: int) -> Tuple[int, int]:
        l = r = 0
        for i, e in self.table.support(m):
            if self.is_right[i]:
                r += e * self.table.degrees[i]
            else:
                l += e * self.table.degrees[i]
        return l, r

    def part(self, p: Polynomial, L: int, e: int) -> Polynomial:
        return Polynomial._raw(self.table, {m: c for m, c in p.terms.items() if self.bidegree(m) == (L, e)})

    def truncate(self, p: Polynomial, Lmax: int, Emax: int) -> Polynomial:
        out = {}
        for m, c in p.terms.items():
            l, r = self.bidegree(m)
            if l <= Lmax and r <= Emax:
                out[m] = c
        return Polynomial._raw(self.table, out)

    def X(self, a: int, b: int) -> Polynomial:
        out = Polynomial.zero(self.table)
        for jl, jr, coef in KUNNETH:
            sgn = -1 if (b + jl) % 2 else 1
            out = out + (self.left(ch(a, jl, self.alpha)) * self.right(ch(b, jr, self.alpha_p))).scale(
                coef * sgn * factorial(a + b - 1))
        return out

    def pair_sum(self, n: int) -> Polynomial:
        """``sum_{a+b<=n} a!(n-a)!/(n-a-b)! sum_i (-1)^{d_i^L+1} ch_a (x) ch_b``."""
        out = Polynomial.zero(self.table)
        for a in range(n + 1):
            for b in range(n - a + 1):
                w = mpq(factorial(a) * factorial(n - a), factorial(n - a - b))
                for jl, jr, coef in KUNNETH:
                    sgn = -1 if (jl + 1) % 2 else 1
                    out = out + (self.left(ch(a, jl, self.alpha)) * self.right(ch(b, jr, self.alpha_p))).scale(
                        w * coef * sgn)
        return out

    def C(self, Lmax: int, Emax: int) -> Polynomial:
        """The class ``C`` truncated to bidegrees ``<= (Lmax, Emax)``."""
        comps: Dict[Tuple[int, int], Polynomial] = {(0, 0): Polynomial.const(self.table, 1)}
        Xc: Dict[Tuple[int, int], Polynomial] = {}
        for a in range(Lmax + 1):
            for b in range(Emax + 1):
                if (a, b) != (0, 0):
                    Xc[(a, b)] = self.X(a, b)
        for L in range(Lmax + 1):
            for e in range(Emax + 1):
                if (L, e) == (0, 0):
                    continue
                acc = Polynomial.zero(self.table)
                if L > 0:
                    for a in range(1, L + 1):
                        for b in range(e + 1):
                            acc = acc + (Xc[(a, b)] * comps[(L - a, e - b)]).scale(a)
                    acc = acc.scale(mpq(1, L))
                else:
                    for b in range(1, e + 1):
                        acc = acc + (Xc[(0, b)] * comps[(0, e - b)]).scale(b)
                    acc = acc.scale(mpq(1, e))
                comps[(L, e)] = acc
        out = Polynomial.zero(self.table)
        for p in comps.values():
            out = out + p
        return out

    def Rn_left(self, n: int, p: Polynomial) -> Polynomial:
        return self._Rn(n, p, False)

    def Rn_right(self, n: int, p: Polynomial) -> Polynomial:
        return self._Rn(n, p, True)

    def _Rn(self, n: int, p: Polynomial, right: bool) -> Polynomial:
        tb = self.table
        alpha = self.alpha_p if right else self.alpha
        from .descendent import c_or_constant
        images = {}
        used = set()
        for m in p.terms:
            used.update(i for i, _ in tb.support(m))
        for i in used:
            if self.is_right[i] != right:
                continue
            lab = tb.labels[i].rstrip("'")
            ci = C_TABLE.index[lab]
            k, j = _kj(ci)
            D = k + j - 1
            if n == -1:
                img = c_or_constant(k - 1, j, alpha)
            else:
                coef = 1
                for t in range(n + 1):
                    coef *= D + t
                img = cvar(k + n, j).scale(coef)
            images[i] = self.right(img) if right else self.left(img)
        return p.apply_derivation(images)

    def boundary(self, n: int, p: Polynomial) -> Polynomial:
        """``d_n = R_n (x) id + sum_{k=-1}^{n} binom(n+1, k+1) id (x) R_k``."""
        out = self.Rn_left(n, p)
        for k in range(-1, n + 1):
            out = out + self.Rn_right(k, p).scale(comb(n + 1, k + 1))
        return out


def quadratic_identity_check(alpha: ToppType, alpha_p: ToppType, n: int, Dmax: int) -> Tuple[bool, Polynomial]:
    """Residual of ``d_n(C) = (pair sum) C`` through bidegree ``(Dmax, Dmax)``."""
    T = TensorAlgebra(alpha, alpha_p, Dmax + n + 1)
    C = T.C(Dmax, Dmax + 1)
    lhs = T.truncate(T.boundary(n, C), Dmax, Dmax)
    rhs = T.truncate(T.pair_sum(n) * C, Dmax, Dmax)
    res = lhs - rhs
    return (not res.terms), res


def lemma_right_lowering(alpha: ToppType, alpha_p: ToppType, Dmax: int) -> bool:
    """``(id (x) R_{-1}) C_j = -(R_{-1} (x) id) C_j = -(j - 1 - d d') C_{j-1}``."""
    T = TensorAlgebra(alpha, alpha_p, Dmax + 1)
    C = T.C(Dmax, Dmax + 1)
    ddp = alpha.d * alpha_p.d
    for j in range(1, Dmax + 1):
        Cj = _total_degree(T, C, j)
        Cj1 = _total_degree(T, C, j - 1)
        a = _total_degree(T, T.Rn_right(-1, Cj), j - 1)
        b = _total_degree(T, T.Rn_left(-1, Cj), j - 1)
        target = Cj1.scale(-(j - 1 - ddp))
        if a != target or b != -target:
            return False
    return True


def _total_degree(T: TensorAlgebra, p: Polynomial, j: int) -> Polynomial:
    out = {}
    for m, c in p.terms.items():
        l, r = T.bidegree(m)
        if l + r == j and l <= T.dmax - 1 and r <= T.dmax - 1:
            out[m] = c
    return Polynomial._raw(T.table, out)


def falling(x, m: int):
    out = Fraction(1) if isinstance(x, Fraction) else 1
    for t in range(m):
        out *= x - t
    return out


def falling_factorial_identity(a, b, m: int) -> bool:
    a, b = Fraction(a), Fraction(b)
    lhs = falling(a, m)
    rhs = sum((-1) ** l * comb(m, l) * falling(a + b - l, m - l) * falling(b, l) for l in range(m + 1))
    return lhs == rhs
