"""Perverse and Chern filtrations, Omega tables and GV-type extractions.

Degrees here are q-degrees ``D`` (cohomological degree ``2D``); a
bigraded table entry ``(i, j)`` means ``gr_i H^{i+j}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from gmpy2 import mpq

from . import kernel, linalg
from .descendent import SPACE, STACK, chern_weight
from .graded import GradedIdeal
from .poly import C_TABLE, Polynomial, cvar

Vec = Dict[int, mpq]


class CalibrationError(RuntimeError):
    pass


@dataclass
class FiltrationTable:
    """Cumulative dimensions ``dim F_k H^{2D}`` for ``0 <= D <= top``."""

    total: List[int]
    cumulative: Dict[int, List[int]] = field(default_factory=dict)   # D -> [dim F_0, dim F_1, ...]

    def dim(self, k: int, D: int) -> int:
        if k < 0:
            return 0
        row = self.cumulative[D]
        return row[k] if k < len(row) else self.total[D]

    def gr(self, k: int, D: int) -> int:
        return self.dim(k, D) - self.dim(k - 1, D)

    def kmax(self) -> int:
        return max((len(r) - 1 for r in self.cumulative.values()), default=0)

    def bigraded(self) -> Dict[Tuple[int, int], int]:
        out = {}
        for D in self.cumulative:
            for k in range(self.kmax() + 1):
                g = self.gr(k, D)
                if g:
                    out[(k, 2 * D - k)] = g
        return out

    def gr_table(self) -> Dict[int, List[int]]:
        K = self.kmax()
        return {D: [self.gr(k, D) for k in range(K + 1)] for D in self.cumulative}


# ---------------------------------------------------------------- quotient linear algebra
class Quotient:
    """Graded pieces of a built ideal as coordinate spaces."""

    def __init__(self, ideal: GradedIdeal, top: Optional[int] = None, zero_above: bool = False):
        self.I = ideal
        self.top = ideal.built if top is None else top
        self.zero_above = zero_above
        self._index: Dict[int, Dict[int, int]] = {}
        self._mult: Dict[Tuple[Tuple[int, ...], int], List[Vec]] = {}

    def dim(self, D: int) -> int:
        if D > self.I.built:
            if self.zero_above:
                return 0
            raise ValueError(f"degree {D} beyond the built range {self.I.built}")
        return len(self.I.basis(D))

    def index(self, D: int) -> Dict[int, int]:
        if D not in self._index:
            self._index[D] = {m: t for t, m in enumerate(self.I.basis(D))}
        return self._index[D]

    def to_coords(self, vec: Vec, D: int) -> Vec:
        idx = self.index(D)
        return {idx[m]: c for m, c in self.I.reduce_vec(vec).items()}

    def mult_table(self, p: Polynomial, D: int) -> List[Vec]:
        """Images of the degree-``D`` basis under multiplication by homogeneous ``p``."""
        key = (tuple(sorted(p.terms.items())), D)
        if key not in self._mult:
            e = p.degree()
            if D + e > self.I.built and self.zero_above:
                self._mult[key] = [{} for _ in range(self.dim(D))]
            else:
                self._mult[key] = [self.to_coords(kernel.poly_mul(p.terms, {m: mpq(1)}), D + e)
                                   for m in self.I.basis(D)]
        return self._mult[key]

    def apply(self, p: Polynomial, v: Vec, D: int) -> Vec:
        tab = self.mult_table(p, D)
        out: Vec = {}
        for t, c in v.items():
            kernel.axpy(out, c, tab[t])
        return out

    def power_images(self, p: Polynomial, D: int, e: int) -> List[Vec]:
        vecs = [{t: mpq(1)} for t in range(self.dim(D))]
        deg = p.degree()
        for s in range(e):
            vecs = [self.apply(p, v, D + s * deg) if v else {} for v in vecs]
        return vecs

    def kernel_of_power(self, p: Polynomial, D: int, e: int) -> List[Vec]:
        if e <= 0:
            return []
        return linalg.kernel_of(self.power_images(p, D, e))

    def image_of_power(self, p: Polynomial, D: int, e: int) -> List[Vec]:
        src = D - e * p.degree()
        if src < 0:
            return []
        return linalg.span(self.power_images(p, src, e))


def xi_class(ideal: GradedIdeal) -> Polynomial:
    return ideal.reduce(cvar(0, 2))


def _ring_quotient(pres) -> Quotient:
    return Quotient(pres.ideal, pres.top, zero_above=pres.kind == SPACE and pres.complete)


# ---------------------------------------------------------------- perverse
def perverse_subspaces(Q: Quotient, xi: Polynomial, b: int, top: int) -> Dict[int, List[List[Vec]]]:
    """``P_k H^{2D} = sum_{i>=1} ker(xi^{b+k-2D+i}) cap im(xi^{i-1})`` for ``k = 0..2(top-b)``."""
    kmax = 2 * (top - b)
    out: Dict[int, List[List[Vec]]] = {}
    for D in range(top + 1):
        rows = []
        for k in range(kmax + 1):
            parts: List[Vec] = []
            for i in range(1, D + 2):
                ker = Q.kernel_of_power(xi, D, b + k - 2 * D + i)
                if not ker:
                    continue
                im = Q.image_of_power(xi, D, i - 1) if i > 1 else [{t: mpq(1)} for t in range(Q.dim(D))]
                parts.extend(linalg.intersection(ker, im))
            rows.append(linalg.span(parts))
        out[D] = rows
    return out


def _table_from_spaces(spaces: Mapping[int, List[List[Vec]]], total: List[int]) -> FiltrationTable:
    cum = {D: [len(s) for s in rows] for D, rows in spaces.items()}
    return FiltrationTable(total, cum)


def perverse_filtration(pres=None, xi: Optional[Polynomial] = None, b: Optional[int] = None, *,
                        ideal: Optional[GradedIdeal] = None, top: Optional[int] = None,
                        calibrate: bool = True) -> FiltrationTable:
    """Perverse filtration of a Gorenstein quotient from multiplication by ``xi``."""
    if calibrate:
        run_calibration()
    if pres is not None:
        if pres.kind != SPACE or not pres.complete:
            raise ValueError("perverse filtration needs a complete space ring")
        ideal, top = pres.ideal, pres.top
        b = pres.alpha.b if b is None else b
        Q = _ring_quotient(pres)
    else:
        Q = Quotient(ideal, top, zero_above=True)
    xi = xi_class(ideal) if xi is None else xi
    spaces = perverse_subspaces(Q, xi, b, top)
    return _table_from_spaces(spaces, [Q.dim(D) for D in range(top + 1)])


def oracle_identity(b: int) -> Tuple[GradedIdeal, Polynomial]:
    """``Q[h]/h^{b+1}``: the identity map of P^b."""
    from .poly import VariableTable
    tb = VariableTable([("h", 1, 0)])
    h = Polynomial.var(tb, "h")
    return GradedIdeal.from_generators(tb, [h ** (b + 1)], b + 2), h


def oracle_product(b: int) -> Tuple[GradedIdeal, Polynomial]:
    """``Q[x,h]/(x^2, h^{b+1})``: projection P^1 x P^b -> P^b."""
    from .poly import VariableTable
    tb = VariableTable([("h", 1, 0), ("x", 1, 0)])
    h, x = Polynomial.var(tb, "h"), Polynomial.var(tb, "x")
    return GradedIdeal.from_generators(tb, [h ** (b + 1), x ** 2], b + 3), h


_CALIBRATED = False


def run_calibration(bs: Sequence[int] = (1, 2, 4)) -> None:
    """Check the perverse formula on the two fibration oracles; raise if either fails."""
    global _CALIBRATED
    if _CALIBRATED:
        return
    for b in bs:
        I, h = oracle_identity(b)
        tab = perverse_filtration(ideal=I, xi=h, b=b, top=b, calibrate=False)
        want = {(0, 2 * D): 1 for D in range(b + 1)}
        if tab.bigraded() != want:
            raise CalibrationError(f"identity oracle fails for b={b}: {tab.bigraded()}")
        I, h = oracle_product(b)
        tab = perverse_filtration(ideal=I, xi=h, b=b, top=b + 1, calibrate=False)
        want = {}
        for i in (0, 2):
            for j in range(0, 2 * b + 1, 2):
                want[(i, j)] = 1
        if tab.bigraded() != want:
            raise CalibrationError(f"product oracle fails for b={b}: {tab.bigraded()}")
    _CALIBRATED = True


# ---------------------------------------------------------------- Chern
def chern_subspaces(Q: Quotient, ideal: GradedIdeal, top: int) -> Dict[int, List[List[Vec]]]:
    """``C_k H^{2D}``: spans of monomials of total Chern weight ``<= k``."""
    tb = ideal.table
    vars_by_deg: Dict[int, List[Tuple[int, Polynomial]]] = {}
    for i in sorted(ideal.active):
        e = tb.degrees[i]
        if e <= top:
            vars_by_deg.setdefault(e, []).append((chern_weight(i), ideal.variable_rule(i)))
    new: Dict[Tuple[int, int], List[Vec]] = {}
    out: Dict[int, List[List[Vec]]] = {}
    for D in range(top + 1):
        full = Q.dim(D)
        if D == 0:
            out[0] = [[{0: mpq(1)}]] if full else [[]]
            new[(0, 0)] = out[0][0]
            continue
        rows: List[List[Vec]] = []
        piv: Dict[int, Vec] = {}
        k = 0
        while len(piv) < full:
            added = []
            for e in range(1, D + 1):
                for w, v in vars_by_deg.get(e, []):
                    if w > k or not v.terms:
                        continue
                    for s in new.get((k - w, D - e), []):
                        img = Q.apply(v, s, D - e)
                        if img:
                            r = dict(img)
                            if kernel.insert_row(r, piv) is not None:
                                added.append(img)
            new[(k, D)] = added
            rows.append([dict(piv[t]) for t in sorted(piv)])
            k += 1
            if k > 4 * top + 4:
                raise RuntimeError(f"Chern filtration did not exhaust degree {D}")
        out[D] = rows if rows else [[]]
        if full == 0:
            out[D] = [[]]
    return out


def chern_filtration(pres=None, *, ideal: Optional[GradedIdeal] = None, top: Optional[int] = None) -> FiltrationTable:
    if pres is not None:
        ideal = pres.ideal
        top = pres.top if pres.kind == SPACE else pres.dmax
        Q = _ring_quotient(pres)
    else:
        top = ideal.built if top is None else top
        Q = Quotient(ideal, top)
    spaces = chern_subspaces(Q, ideal, top)
    return _table_from_spaces(spaces, [Q.dim(D) for D in range(top + 1)])


@dataclass
class PCVerdict:
    ok: bool
    level: str
    first_violation: Optional[Tuple[int, int]]
    perverse: Dict[int, List[int]]
    chern: Dict[int, List[int]]


def pc_check(pres, subspace: bool = True) -> PCVerdict:
    """Compare perverse and Chern filtrations on a complete space ring."""
    run_calibration()
    Q = _ring_quotient(pres)
    P = perverse_subspaces(Q, xi_class(pres.ideal), pres.alpha.b, pres.top)
    C = chern_subspaces(Q, pres.ideal, pres.top)
    total = [Q.dim(D) for D in range(pres.top + 1)]
    tp, tc = _table_from_spaces(P, total), _table_from_spaces(C, total)
    K = max(tp.kmax(), tc.kmax())
    for D in range(pres.top + 1):
        for k in range(K + 1):
            if tp.dim(k, D) != tc.dim(k, D):
                return PCVerdict(False, "dimension", (k, D), tp.gr_table(), tc.gr_table())
            if subspace:
                ps = P[D][min(k, len(P[D]) - 1)]
                cs = C[D][min(k, len(C[D]) - 1)]
                piv = linalg.echelon(ps)
                if any(not linalg.in_span(v, piv) for v in cs):
                    return PCVerdict(False, "subspace", (k, D), tp.gr_table(), tc.gr_table())
    return PCVerdict(True, "subspace" if subspace else "dimension", None, tp.gr_table(), tc.gr_table())


def vanishing_window_check(pres, lmax: int = 2) -> Dict[int, bool]:
    """``C_{2l-1} cap H^{2(b+l)} = 0`` for ``l = 1..lmax``."""
    tab = chern_filtration(pres)
    out = {}
    for l in range(1, lmax + 1):
        D = pres.alpha.b + l
        out[l] = D > pres.top or tab.dim(2 * l - 1, D) == 0
    return out


# ---------------------------------------------------------------- Laurent polynomials in (q, t)
Bi = Dict[Tuple[int, int], int]


def omega(d: int, table: FiltrationTable) -> Bi:
    """``(-1)^{d^2+1} q^{-g} t^{-b} sum dim gr_i H^{i+j} q^i t^j``."""
    g = (d - 1) * (d - 2) // 2
    b = d * (d + 3) // 2
    sign = -1 if (d * d + 1) % 2 else 1
    out: Bi = {}
    for (i, j), n in table.bigraded().items():
        out[(i - g, j - b)] = sign * n
    if not is_symmetric(out):
        raise ValueError(f"Omega_{d} is not invariant under q -> 1/q and t -> 1/t")
    return out


def is_symmetric(om: Bi) -> bool:
    return all(om.get((-a, c), 0) == v and om.get((a, -c), 0) == v for (a, c), v in om.items())


def su2_character(two_j: int) -> List[int]:
    """Exponents of ``chi_j(x) = x^{-2j} + x^{-2j+2} + ... + x^{2j}``."""
    return list(range(-two_j, two_j + 1, 2))


def gv_extract(om: Bi) -> Dict[Tuple[Fraction, Fraction], int]:
    """``N^{jL,jR}`` with ``Omega = sum (-1)^{2jL+2jR} N chi_jL(q) chi_jR(t)``."""
    if not is_symmetric(om):
        raise ValueError("Omega must be symmetric in both variables")
    rest = {k: v for k, v in om.items() if v}
    out: Dict[Tuple[Fraction, Fraction], int] = {}
    while rest:
        a, c = max(rest)
        if a < 0 or c < 0:
            raise ValueError(f"leading term q^{a} t^{c} has a negative exponent")
        coef = rest[(a, c)]
        sign = -1 if (a + c) % 2 else 1
        n = coef * sign
        out[(Fraction(a, 2), Fraction(c, 2))] = n
        for x in su2_character(a):
            for y in su2_character(c):
                v = rest.get((x, y), 0) - coef
                if v:
                    rest[(x, y)] = v
                else:
                    rest.pop((x, y), None)
    return out


def gv_reconstruct(N: Mapping[Tuple[Fraction, Fraction], int]) -> Bi:
    out: Bi = {}
    for (jl, jr), n in N.items():
        a, c = int(2 * jl), int(2 * jr)
        sign = -1 if (a + c) % 2 else 1
        for x in su2_character(a):
            for y in su2_character(c):
                out[(x, y)] = out.get((x, y), 0) + sign * n
    return {k: v for k, v in out.items() if v}


def maulik_toda(om: Bi) -> Dict[int, int]:
    """``Omega(-q, 1) = sum_g n_g (q^{1/2} + q^{-1/2})^{2g}``."""
    f: Dict[int, int] = {}
    for (a, _), v in om.items():
        f[a] = f.get(a, 0) + (v if a % 2 == 0 else -v)
    f = {a: v for a, v in f.items() if v}
    out: Dict[int, int] = {}
    while f:
        g = max(f)
        if g < 0 or f.get(-g, 0) != f[g]:
            raise ValueError("Omega(-q,1) is not a symmetric Laurent polynomial with nonnegative top")
        n = f[g]
        out[g] = n
        for s in range(2 * g + 1):
            e = s - g
            v = f.get(e, 0) - n * comb(2 * g, s)
            if v:
                f[e] = v
            else:
                f.pop(e, None)
    return out


# ---------------------------------------------------------------- series in (q, t) with Q grading
@dataclass
class QTSeries:
    """Laurent polynomial in ``t``, Laurent series in ``q``; exponents of ``q`` above ``prec`` unknown."""

    coeffs: Dict[Tuple[int, int], Fraction]
    prec: int

    def _clean(self) -> "QTSeries":
        self.coeffs = {k: v for k, v in self.coeffs.items() if v and k[0] <= self.prec}
        return self

    def __add__(self, o: "QTSeries") -> "QTSeries":
        out = dict(self.coeffs)
        for k, v in o.coeffs.items():
            out[k] = out.get(k, 0) + v
        return QTSeries(out, min(self.prec, o.prec))._clean()

    def scale(self, c) -> "QTSeries":
        return QTSeries({k: v * c for k, v in self.coeffs.items()}, self.prec)._clean()

    def valuation(self) -> Optional[int]:
        return min(k[0] for k in self.coeffs) if self.coeffs else None

    def __mul__(self, o: "QTSeries") -> "QTSeries":
        va, vb = self.valuation(), o.valuation()
        if va is None or vb is None:
            return QTSeries({}, min(self.prec + (vb or 0), o.prec + (va or 0)))
        prec = min(self.prec + vb, o.prec + va)
        out: Dict[Tuple[int, int], Fraction] = {}
        for (a1, b1), v1 in self.coeffs.items():
            for (a2, b2), v2 in o.coeffs.items():
                a = a1 + a2
                if a <= prec:
                    k = (a, b1 + b2)
                    out[k] = out.get(k, 0) + v1 * v2
        return QTSeries(out, prec)._clean()

    def adams(self, n: int) -> "QTSeries":
        return QTSeries({(a * n, b * n): v for (a, b), v in self.coeffs.items()}, self.prec * n if self.prec >= 0
                        else self.prec)

    def at_t1(self) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = {}
        for (a, _), v in self.coeffs.items():
            out[a] = out.get(a, 0) + v
        return {a: v for a, v in out.items() if v}


def _prefactor(qprec: int, both: bool) -> QTSeries:
    """``-q/((1-qt)(1-q/t))`` or ``-q/(1-qt)``."""
    out: Dict[Tuple[int, int], Fraction] = {}
    for a in range(qprec + 1):
        for b in range(qprec + 1 if both else 1):
            e = 1 + a + b
            if e <= qprec:
                k = (e, a - b)
                out[k] = out.get(k, 0) - 1
    return QTSeries(out, qprec)


def _pe_Q(f: List[QTSeries]) -> List[QTSeries]:
    K = len(f) - 1
    prec = min(s.prec for s in f[1:]) if K else 0
    F: List[QTSeries] = [QTSeries({}, prec)]
    for k in range(1, K + 1):
        acc = QTSeries({}, 10 ** 9)
        for n in range(1, k + 1):
            if k % n == 0:
                acc = acc + f[k // n].adams(n).scale(Fraction(1, n))
        F.append(acc)
    G: List[QTSeries] = [QTSeries({(0, 0): Fraction(1)}, 10 ** 9)]
    for k in range(1, K + 1):
        acc = QTSeries({}, 10 ** 9)
        for t in range(1, k + 1):
            acc = acc + (F[t] * G[k - t]).scale(t)
        G.append(acc.scale(Fraction(1, k)))
    return G


def _omega_series(om: Bi, prec: int) -> QTSeries:
    return QTSeries({k: Fraction(v) for k, v in om.items() if k[0] <= prec}, prec)


def gvpt_rhs(omegas: Mapping[int, Bi], Qmax: int, qmax: int) -> List[QTSeries]:
    """``PE(-q/((1-qt)(1-q/t)) sum_d Omega_d Q^d)`` up to ``Q^Qmax``, exact through ``q^qmax``."""
    for d in range(1, Qmax + 1):
        if d not in omegas:
            raise ValueError(f"missing Omega_{d}")
    # negative q-valuations of Omega need extra working precision
    lows = [min((a for a, _ in omegas[d]), default=0) for d in range(1, Qmax + 1)]
    work = qmax + sum(max(0, -v) for v in lows) * Qmax + 2
    pre = _prefactor(work, True)
    f = [QTSeries({}, work)] + [pre * _omega_series(omegas[d], work) for d in range(1, Qmax + 1)]
    G = _pe_Q(f)
    if min(g.prec for g in G[1:]) < qmax:
        raise ValueError("q-window too small for the requested Q-order")
    return [QTSeries({k: v for k, v in g.coeffs.items() if k[0] <= qmax}, qmax) for g in G]


def gvpt_t1_from_mt(mt: Mapping[int, Mapping[int, int]], Qmax: int, qmax: int) -> List[Dict[int, Fraction]]:
    """The ``t = 1`` side rebuilt from Maulik-Toda numbers alone."""
    oms: Dict[int, Bi] = {}
    for d in range(1, Qmax + 1):
        acc: Dict[int, int] = {}
        for g, n in mt[d].items():
            # (-1)^g q^{-g} (1-q)^{2g}
            for s in range(2 * g + 1):
                e = s - g
                acc[e] = acc.get(e, 0) + n * (-1) ** g * comb(2 * g, s) * (-1) ** s
        oms[d] = {(a, 0): v for a, v in acc.items() if v}
    lows = [min((a for a, _ in oms[d]), default=0) for d in range(1, Qmax + 1)]
    work = qmax + sum(max(0, -v) for v in lows) * Qmax + 2
    pre = QTSeries({(e, 0): Fraction(-(e)) for e in range(1, work + 1)}, work)   # -q/(1-q)^2
    f = [QTSeries({}, work)] + [pre * _omega_series(oms[d], work) for d in range(1, Qmax + 1)]
    G = _pe_Q(f)
    return [{a: v for a, v in g.at_t1().items() if a <= qmax} for g in G]


def read_pt_file(path: str) -> Dict[Tuple[int, int], Dict[int, int]]:
    """Lines ``d n : e1/c1 e2/c2 ...`` giving the ``Q^d q^n`` coefficient as a Laurent polynomial in ``t``."""
    out: Dict[Tuple[int, int], Dict[int, int]] = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            head, _, body = line.partition(":")
            d, n = (int(x) for x in head.split())
            poly: Dict[int, int] = {}
            for tok in body.split():
                e, c = tok.split("/")
                poly[int(e)] = poly.get(int(e), 0) + int(c)
            out[(d, n)] = {e: c for e, c in poly.items() if c}
    return out


def compare_pt(rhs: Sequence[QTSeries], pt: Mapping[Tuple[int, int], Mapping[int, int]]):
    """First ``(d, n, t-polynomial expected, got)`` mismatch, or ``None``."""
    for (d, n) in sorted(pt):
        if d >= len(rhs) or n > rhs[d].prec:
            continue
        got: Dict[int, int] = {}
        for (a, b), v in rhs[d].coeffs.items():
            if a == n:
                got[b] = got.get(b, 0) + v
        got = {k: int(v) for k, v in got.items() if v}
        if got != dict(pt[(d, n)]):
            return d, n, dict(pt[(d, n)]), got
    return None


def stacky_perverse_numbers(omegas: Mapping[int, Bi], d: int, Dmax: int) -> Dict[Tuple[int, int], int]:
    """``dim gr_i H^{i+j}`` of the slope-zero stack of degree ``d`` for ``i + j <= 2 Dmax``."""
    g = (d - 1) * (d - 2) // 2
    b = d * (d + 3) // 2
    qmax = 2 * Dmax + 1 - g + 1
    lows = [min((a for a, _ in omegas[e]), default=0) for e in range(1, d + 1)]
    work = qmax + sum(max(0, -v) for v in lows) * d + 2
    pre = _prefactor(work, False)
    f = [QTSeries({}, work)] + [pre * _omega_series(omegas[e], work) for e in range(1, d + 1)]
    G = _pe_Q(f)[d]
    sign = -1 if (d * d) % 2 else 1
    out: Dict[Tuple[int, int], int] = {}
    for (a, c), v in G.coeffs.items():
        i, j = a + g - 1, c + b
        if i + j <= 2 * Dmax and a <= G.prec:
            if v.denominator != 1:
                raise ValueError("non-integral stacky perverse number")
            if v:
                out[(i, j)] = sign * int(v)
    return out


def stack_pc_check(pres, omegas: Mapping[int, Bi], Dmax: Optional[int] = None) -> Tuple[bool, Dict, Dict]:
    """Stacky perverse numbers against the Chern filtration of a slope-zero stack ring."""
    D = pres.dmax if Dmax is None else Dmax
    want = stacky_perverse_numbers(omegas, pres.alpha.d, D)
    tab = chern_filtration(pres)
    got = {k: v for k, v in tab.bigraded().items() if k[0] + k[1] <= 2 * D}
    return want == got, want, got
