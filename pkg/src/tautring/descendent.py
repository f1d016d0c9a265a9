"""Descendent symbols ch_i(H^j) and the normalized coordinates c_k(j).

The coordinates are ``c_k(j) = ch_{k+j-1}(e^{rH} H^j)`` with
``r = 3/2 - chi/d``, i.e. descendents of the twist of ``alpha`` whose
Euler pairing with the structure sheaf vanishes.  Everything downstream
works in these coordinates; descendent symbols only appear at the edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, gcd
from typing import Dict, Optional

from gmpy2 import mpq

from .poly import C_TABLE, Polynomial, Q, VariableTable, c_index, cvar

STACK = "stack"
SPACE = "space"


@dataclass(frozen=True)
class ToppType:
    """Topological type ``(d, chi)`` of a one-dimensional sheaf on P^2."""

    d: int
    chi: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError(f"curve class d must be positive, got {self.d}")

    @property
    def g(self) -> int:
        return (self.d - 1) * (self.d - 2) // 2

    @property
    def b(self) -> int:
        return self.d * (self.d + 3) // 2

    @property
    def dim_stack(self) -> int:
        return self.d * self.d

    @property
    def dim_space(self) -> int:
        return self.d * self.d + 1

    @property
    def slope(self) -> Fraction:
        return Fraction(self.chi, self.d)

    @property
    def m(self) -> int:
        return gcd(self.d, self.chi)

    @property
    def coprime(self) -> bool:
        return self.m == 1

    @property
    def r(self) -> mpq:
        return mpq(3, 2) - mpq(self.chi, self.d)

    def ch2(self) -> mpq:
        return mpq(self.chi) - mpq(3 * self.d, 2)


@dataclass(frozen=True)
class DescendentSymbol:
    i: int
    j: int

    def __post_init__(self) -> None:
        if self.i < 0 or self.j not in (0, 1, 2):
            raise ValueError("need i >= 0 and j in {0,1,2}")

    @property
    def cohomological_degree(self) -> int:
        return 2 * self.i


def chern_pairing(alpha: ToppType, j: int, twisted: bool = False) -> mpq:
    """``int ch(alpha) H^j`` (or of ``alpha e^rho`` when ``twisted``)."""
    if j == 2:
        return mpq(0)
    if j == 1:
        return mpq(alpha.d)
    if j == 0:
        return mpq(0) if twisted else alpha.ch2()
    raise ValueError("j must be 0, 1 or 2")


def c_or_constant(k: int, j: int, alpha: ToppType) -> Polynomial:
    """``c_k(j)`` as a polynomial; degree-0 entries are the twisted pairings, lower ones vanish."""
    D = k + j - 1
    if D >= 1:
        return cvar(k, j)
    if D == 0:
        return Polynomial.const(C_TABLE, chern_pairing(alpha, j, twisted=True))
    return Polynomial.zero(C_TABLE)


def drop_c11(p: Polynomial) -> Polynomial:
    """Set ``c_1(1) = 0``."""
    i = c_index(1, 1)
    return Polynomial._raw(C_TABLE, {m: c for m, c in p.terms.items() if not (m >> (8 * i)) & 255})


def realize(sym: DescendentSymbol, alpha: ToppType, kind: str = STACK) -> Polynomial:
    i, j = sym.i, sym.j
    r = alpha.r
    if j == 2:
        p = c_or_constant(i - 1, 2, alpha)
    elif j == 1:
        p = c_or_constant(i, 1, alpha) - c_or_constant(i - 1, 2, alpha).scale(r)
    else:
        p = (c_or_constant(i + 1, 0, alpha) - c_or_constant(i, 1, alpha).scale(r)
             + c_or_constant(i - 1, 2, alpha).scale(r * r / 2))
    return drop_c11(p) if kind == SPACE else p


def ch(i: int, j: int, alpha: ToppType, kind: str = STACK) -> Polynomial:
    return realize(DescendentSymbol(i, j), alpha, kind)


def ch_td(i: int, alpha: ToppType, kind: str = STACK) -> Polynomial:
    """``ch_i(td_{P^2}) = ch_i(1) + 3/2 ch_i(H) + ch_i(H^2)``."""
    return ch(i, 0, alpha, kind) + ch(i, 1, alpha, kind).scale(mpq(3, 2)) + ch(i, 2, alpha, kind)


def r_minus1(p: Polynomial, alpha: ToppType) -> Polynomial:
    """Derivation ``c_k(j) -> c_{k-1}(j)`` with the boundary constants."""
    images = {}
    for i, _ in _variables(p):
        k, j = _kj(i)
        images[i] = c_or_constant(k - 1, j, alpha)
    return p.apply_derivation(images)


def eta(p: Polynomial, alpha: ToppType, Dmax: Optional[int] = None) -> Polynomial:
    """``sum_j (-1)^j/j! (c_1(1)/d)^j R_{-1}^j``."""
    u = cvar(1, 1).scale(mpq(1, alpha.d))
    out = Polynomial.zero(C_TABLE)
    term = p
    j = 0
    upow = Polynomial.const(C_TABLE, 1)
    while term.terms:
        out = out + (upow * term).scale(mpq((-1) ** j, factorial(j)))
        term = r_minus1(term, alpha)
        upow = upow * u
        j += 1
    return out


def f_rho_twist(p: Polynomial, rho_coeff, table: Optional[VariableTable] = None) -> Polynomial:
    """``ch_i(H^j) -> sum_t rho^t/t! ch_i(H^{j+t})`` on a polynomial in descendent symbols."""
    tb = p.table
    rho = Q(rho_coeff)
    images = {}
    for i in range(tb.nvars):
        lab = tb.labels[i]
        si, sj = parse_ch_label(lab)
        img = Polynomial.zero(tb)
        for t in range(0, 3 - sj):
            img = img + Polynomial.var(tb, ch_label(si, sj + t)).scale(rho ** t / factorial(t))
        images[i] = img
    return p.substitute(images)


# descendent-symbol polynomials
def ch_label(i: int, j: int) -> str:
    return f"ch{i}({['1', 'H', 'H2'][j]})"


def parse_ch_label(lab: str):
    i, _, rest = lab[2:].partition("(")
    return int(i), {"1": 0, "H": 1, "H2": 2}[rest[:-1]]


def ch_table(dmax: int = 32) -> VariableTable:
    ents = []
    for i in range(1, dmax + 1):
        for j in (2, 1, 0):
            ents.append((ch_label(i, j), i, i - j + 1 if i - j + 1 >= 0 else 0))
    return VariableTable(ents)


CH_TABLE = ch_table()


def ch_symbol(i: int, j: int) -> Polynomial:
    return Polynomial.var(CH_TABLE, ch_label(i, j))


def ch_to_c(p: Polynomial, alpha: ToppType, kind: str = STACK) -> Polynomial:
    """Realize a polynomial in descendent symbols (degree >= 1) in c-coordinates."""
    images = {}
    used = set()
    for m in p.terms:
        used.update(i for i, _ in CH_TABLE.support(m))
    for idx in used:
        i, j = parse_ch_label(CH_TABLE.labels[idx])
        images[idx] = realize(DescendentSymbol(i, j), alpha, kind)
    res = Polynomial.zero(C_TABLE)
    for m, c in p.terms.items():
        term = Polynomial.const(C_TABLE, c)
        for idx, e in CH_TABLE.support(m):
            term = term * images[idx] ** e
        res = res + term
    return res


def c_to_ch(p: Polynomial, alpha: ToppType) -> Polynomial:
    """Inverse dictionary: ``c_k(j) = sum_t r^t/t! ch_{k+j-1}(H^{j+t})``."""
    r = alpha.r
    images = {}
    for i, _ in _variables(p):
        k, j = _kj(i)
        n = k + j - 1
        img = Polynomial.zero(CH_TABLE)
        for t in range(0, 3 - j):
            img = img + ch_symbol(n, j + t).scale(r ** t / factorial(t))
        images[i] = img
    res = Polynomial.zero(CH_TABLE)
    for m, c in p.terms.items():
        term = Polynomial.const(CH_TABLE, c)
        for idx, e in C_TABLE.support(m):
            term = term * images[idx] ** e
        res = res + term
    return res


def _variables(p: Polynomial):
    seen = set()
    for m in p.terms:
        for i, e in p.table.support(m):
            if i not in seen:
                seen.add(i)
                yield i, e


def _kj(i: int):
    """Inverse of :func:`c_index`."""
    D = i // 3 + 1
    j = 2 - i % 3
    return D + 1 - j, j


def sigma(p: Polynomial) -> Polynomial:
    """``c_k(j) -> (-1)^k c_k(j)``: carries relations of ``(d, chi)`` to ``(d, -chi)``."""
    tb = p.table
    out = {}
    for m, c in p.terms.items():
        s = sum(_kj(i)[0] * e for i, e in tb.support(m))
        out[m] = -c if s % 2 else c
    return Polynomial._raw(tb, out)


def chern_weight(i: int) -> int:
    return _kj(i)[0]


# weight-zero identification
U_LABEL = "u"


def wt0_table(dmax: int = 32) -> VariableTable:
    ents = [(C_TABLE.labels[i], C_TABLE.degrees[i], C_TABLE.cherns[i])
            for i in range(C_TABLE.nvars) if i != c_index(1, 1) and C_TABLE.degrees[i] <= dmax]
    ents.append((U_LABEL, 1, 1))
    return VariableTable(ents)


WT0_TABLE = wt0_table()


def transfer(p: Polynomial, table: VariableTable, images: Optional[Dict[str, Polynomial]] = None) -> Polynomial:
    """Move ``p`` to another table by label, optionally replacing some labels."""
    images = images or {}
    res = Polynomial.zero(table)
    cache: Dict[int, Polynomial] = {}
    for m, c in p.terms.items():
        term = Polynomial.const(table, c)
        for idx, e in p.table.support(m):
            if idx not in cache:
                lab = p.table.labels[idx]
                cache[idx] = images[lab] if lab in images else Polynomial.var(table, lab)
            term = term * cache[idx] ** e
        res = res + term
    return res


def phi(p: Polynomial, alpha: ToppType) -> Polynomial:
    """``Q[c without c_1(1)][u] -> D_alpha``: ``f -> eta(f)``, ``u -> c_1(1)/d``."""
    q = transfer(p, C_TABLE, {U_LABEL: cvar(1, 1).scale(mpq(1, alpha.d))})
    # the c-part is read as the weight-zero element it represents
    u = cvar(1, 1)
    i = c_index(1, 1)
    out = Polynomial.zero(C_TABLE)
    for m, c in q.terms.items():
        e = (m >> (8 * i)) & 255
        rest = Polynomial._raw(C_TABLE, {m - e * C_TABLE.units[i]: c})
        out = out + eta(rest, alpha) * u ** e
    return out


def phi_inverse(p: Polynomial, alpha: ToppType) -> Polynomial:
    """``D_alpha -> Q[c without c_1(1)][u]``: ``sum_i u^i/i! eta R_{-1}^i``."""
    out = Polynomial.zero(WT0_TABLE)
    u = Polynomial.var(WT0_TABLE, U_LABEL)
    term = p
    i = 0
    while term.terms:
        part = transfer(drop_c11(eta(term, alpha)), WT0_TABLE)
        out = out + (part * u ** i).scale(mpq(1, factorial(i)))
        term = r_minus1(term, alpha)
        i += 1
    return out
