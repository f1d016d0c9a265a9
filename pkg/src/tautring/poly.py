"""Exact sparse polynomials over weighted variable tables.

Monomials are packed into Python integers so that multiplication is integer
addition.  Byte ``i`` (from the least significant end) holds the exponent of
variable ``i``; above the exponent bytes sit a 16-bit field with the number
of factors and then the weighted degree.  Within one weighted degree a
smaller packed value is a larger monomial, which gives the order used
throughout the package:

1. weighted degree,
2. fewer factors first,
3. graded reverse lexicographic with variables in table order
   (degree ascending, Chern index ascending, label).
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from gmpy2 import mpq

from . import kernel

Rational = type(mpq(0))
Scalar = Union[int, Fraction, str, "mpq"]

EXP_BITS = 8
EXP_MASK = (1 << EXP_BITS) - 1
LEN_BITS = 16


def Q(x: Scalar) -> mpq:
    """Coerce ``x`` to an exact rational."""
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def qstr(c: mpq) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


class VariableTable:
    """Ordered weighted variables.  Entries are ``(label, degree, chern)``."""

    def __init__(self, entries: Iterable[Tuple[str, int, int]]):
        ents = sorted(entries, key=lambda e: (e[1], e[2], e[0]))
        labels = [e[0] for e in ents]
        if len(set(labels)) != len(labels):
            raise ValueError("variable labels must be unique")
        for lab, deg, _ in ents:
            if deg < 1:
                raise ValueError(f"variable {lab} has degree {deg} < 1")
        self.labels: List[str] = labels
        self.degrees: List[int] = [e[1] for e in ents]
        self.cherns: List[int] = [e[2] for e in ents]
        self.index: Dict[str, int] = {lab: i for i, lab in enumerate(labels)}
        n = len(ents)
        self.nvars = n
        self.len_shift = EXP_BITS * n
        self.deg_shift = self.len_shift + LEN_BITS
        self.exp_mask = (1 << self.len_shift) - 1
        self.units: List[int] = [
            (1 << (EXP_BITS * i)) + (1 << self.len_shift) + (d << self.deg_shift)
            for i, d in enumerate(self.degrees)
        ]

    def __len__(self) -> int:
        return self.nvars

    def __repr__(self) -> str:
        return f"VariableTable({self.nvars} variables)"

    # monomial helpers
    def degree(self, m: int) -> int:
        return m >> self.deg_shift

    def length(self, m: int) -> int:
        return (m >> self.len_shift) & ((1 << LEN_BITS) - 1)

    def exponent(self, m: int, i: int) -> int:
        return (m >> (EXP_BITS * i)) & EXP_MASK

    def support(self, m: int) -> List[Tuple[int, int]]:
        out = []
        e = m & self.exp_mask
        i = 0
        while e:
            x = e & EXP_MASK
            if x:
                out.append((i, x))
            e >>= EXP_BITS
            i += 1
        return out

    def chern(self, m: int) -> int:
        return sum(self.cherns[i] * e for i, e in self.support(m))

    def monomial(self, exps: Mapping[int, int]) -> int:
        m = 0
        for i, e in exps.items():
            if e < 0 or e > EXP_MASK:
                raise ValueError("exponent out of range")
            m += e * self.units[i]
        return m

    def divides(self, a: int, b: int) -> bool:
        return all(self.exponent(b, i) >= e for i, e in self.support(a))

    def key(self, m: int) -> Tuple[int, int]:
        """Sort key; a larger key is a larger monomial."""
        return (m >> self.deg_shift, -m)

    def mono_str(self, m: int) -> str:
        if m == 0:
            return "1"
        parts = []
        for i, e in self.support(m):
            parts.append(self.labels[i] if e == 1 else f"{self.labels[i]}^{e}")
        return "*".join(parts)


def c_label(k: int, j: int) -> str:
    return f"c{k}({j})"


def c_table(dmax: int = 32) -> VariableTable:
    """Normalized classes ``c_k(j)`` of q-degree ``k+j-1`` from 1 to ``dmax``."""
    ents = []
    for D in range(1, dmax + 1):
        for j in (2, 1, 0):
            k = D + 1 - j
            ents.append((c_label(k, j), D, k))
    return VariableTable(ents)


C_TABLE = c_table()


def c_index(k: int, j: int) -> int:
    """Index of ``c_k(j)`` in :data:`C_TABLE` (degree ``k+j-1`` must be >= 1)."""
    D = k + j - 1
    return 3 * (D - 1) + (2 - j)


class Polynomial:
    """Sparse polynomial: packed monomial -> exact rational, zeros never stored."""

    __slots__ = ("table", "terms")

    def __init__(self, table: VariableTable, terms: Optional[Mapping[int, Scalar]] = None):
        self.table = table
        t: Dict[int, mpq] = {}
        if terms:
            for m, c in terms.items():
                c = c if isinstance(c, Rational) else Q(c)
                if c:
                    t[m] = c
        self.terms = t

    @classmethod
    def _raw(cls, table: VariableTable, terms: Dict[int, mpq]) -> "Polynomial":
        p = cls.__new__(cls)
        p.table = table
        p.terms = terms
        return p

    @classmethod
    def var(cls, table: VariableTable, label: str) -> "Polynomial":
        return cls._raw(table, {table.units[table.index[label]]: mpq(1)})

    @classmethod
    def const(cls, table: VariableTable, c: Scalar) -> "Polynomial":
        c = Q(c)
        return cls._raw(table, {0: c} if c else {})

    @classmethod
    def zero(cls, table: VariableTable) -> "Polynomial":
        return cls._raw(table, {})

    def copy(self) -> "Polynomial":
        return Polynomial._raw(self.table, dict(self.terms))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Polynomial):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)) or isinstance(other, Rational):
            return self.terms == ({0: Q(other)} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial.const(self.table, other)

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        t = dict(self.terms)
        kernel.axpy(t, mpq(1), other.terms)
        return Polynomial._raw(self.table, t)

    __radd__ = __add__

    def __sub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        t = dict(self.terms)
        kernel.axpy(t, mpq(-1), other.terms)
        return Polynomial._raw(self.table, t)

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.table, {m: -c for m, c in self.terms.items()})

    def scale(self, c: Scalar) -> "Polynomial":
        c = c if isinstance(c, Rational) else Q(c)
        if not c:
            return Polynomial.zero(self.table)
        return Polynomial._raw(self.table, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return self.scale(other)
        return Polynomial._raw(self.table, kernel.poly_mul(self.terms, other.terms))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        out = Polynomial.const(self.table, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # structure
    def degrees(self) -> set:
        return {self.table.degree(m) for m in self.terms}

    def degree(self) -> int:
        """Weighted degree; raises for an inhomogeneous or zero polynomial."""
        ds = self.degrees()
        if len(ds) != 1:
            raise ValueError("polynomial is not homogeneous of a single degree")
        return ds.pop()

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def homogeneous_part(self, D: int) -> "Polynomial":
        tb = self.table
        return Polynomial._raw(tb, {m: c for m, c in self.terms.items() if tb.degree(m) == D})

    def leading_monomial(self) -> int:
        return max(self.terms, key=self.table.key)

    def leading_coefficient(self) -> mpq:
        return self.terms[self.leading_monomial()]

    def coefficient(self, m: int) -> mpq:
        return self.terms.get(m, mpq(0))

    def variables(self) -> set:
        out = set()
        for m in self.terms:
            out.update(i for i, _ in self.table.support(m))
        return out

    def monic(self) -> "Polynomial":
        return self.scale(1 / self.leading_coefficient()) if self.terms else self

    def sorted_terms(self) -> List[Tuple[int, mpq]]:
        return sorted(self.terms.items(), key=lambda mc: self.table.key(mc[0]), reverse=True)

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"Polynomial({to_text(self)!r})"

    def substitute(self, images: Mapping[int, "Polynomial"]) -> "Polynomial":
        """Replace variable ``i`` by ``images[i]`` (others unchanged)."""
        tb = self.table
        out: Dict[int, mpq] = {}
        cache: Dict[Tuple[int, int], Dict[int, mpq]] = {}
        for m, c in self.terms.items():
            keep = 0
            acc: Dict[int, mpq] = {0: mpq(1)}
            for i, e in tb.support(m):
                if i in images:
                    key = (i, e)
                    if key not in cache:
                        cache[key] = (images[i] ** e).terms
                    acc = kernel.poly_mul(acc, cache[key])
                else:
                    keep += e * tb.units[i]
            if keep:
                acc = {mm + keep: v for mm, v in acc.items()}
            kernel.axpy(out, c, acc)
        return Polynomial._raw(tb, out)

    def apply_derivation(self, images: Mapping[int, "Polynomial"]) -> "Polynomial":
        """Apply the derivation sending variable ``i`` to ``images[i]``."""
        tb = self.table
        out: Dict[int, mpq] = {}
        for m, c in self.terms.items():
            for i, e in tb.support(m):
                img = images.get(i)
                if img is None or not img.terms:
                    continue
                rest = m - tb.units[i]
                kernel.axpy(out, c * e, {rest + mm: v for mm, v in img.terms.items()})
        return Polynomial._raw(tb, out)


def monomials_of_degree(table: VariableTable, D: int, allowed: Optional[Sequence[int]] = None) -> List[int]:
    """All monomials of weighted degree ``D``, largest first."""
    if D < 0:
        raise ValueError("degree must be non-negative")
    idx = list(range(table.nvars)) if allowed is None else sorted(allowed)
    idx = [i for i in idx if table.degrees[i] <= D]
    out: List[int] = []

    def rec(pos: int, rem: int, acc: int) -> None:
        if rem == 0:
            out.append(acc)
            return
        if pos < 0:
            return
        i = idx[pos]
        d = table.degrees[i]
        u = table.units[i]
        e = 0
        while e * d <= rem:
            rec(pos - 1, rem - e * d, acc + e * u)
            e += 1

    rec(len(idx) - 1, D, 0)
    out.sort()
    return out


def rref(rows: Sequence[Polynomial], D: Optional[int] = None) -> Tuple[List[Polynomial], int]:
    """Reduced row echelon basis (largest leading monomial first) and rank."""
    if not rows:
        return [], 0
    table = rows[0].table
    pivots: Dict[int, Dict[int, mpq]] = {}
    for r in rows:
        if r.table is not table:
            raise ValueError("rows over different tables")
        if not r.terms:
            continue
        ds = r.degrees()
        if len(ds) != 1 or (D is not None and D not in ds):
            raise ValueError("rref input row is not homogeneous of the requested degree")
        D = ds.pop()
        kernel.insert_row(dict(r.terms), pivots)
    basis = [Polynomial._raw(table, pivots[m]) for m in sorted(pivots)]
    return basis, len(basis)


_TERM_RE = re.compile(r"\s*([+-])?\s*([^+-]+)")


def to_text(p: Polynomial) -> str:
    """Canonical text: terms largest first, coefficients as ``num/den``."""
    if not p.terms:
        return "0"
    out = []
    for i, (m, c) in enumerate(p.sorted_terms()):
        neg = c < 0
        a = -c if neg else c
        if m == 0:
            body = qstr(a)
        elif a == 1:
            body = p.table.mono_str(m)
        else:
            body = f"{qstr(a)}*{p.table.mono_str(m)}"
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def from_text(table: VariableTable, s: str) -> Polynomial:
    """Parse the canonical text form (also accepts any term order)."""
    s = s.strip()
    if s == "0":
        return Polynomial.zero(table)
    terms: Dict[int, mpq] = {}
    # split on +/- that are not inside a label's parentheses
    tokens = re.findall(r"[+-]?\s*[^+-]+", s.replace(" ", ""))
    for tok in tokens:
        sign = mpq(1)
        if tok[0] in "+-":
            sign = mpq(-1) if tok[0] == "-" else mpq(1)
            tok = tok[1:]
        coef = mpq(1)
        m = 0
        for f in tok.split("*"):
            if not f:
                continue
            if re.fullmatch(r"\d+(/\d+)?", f):
                coef *= mpq(f)
                continue
            base, _, ex = f.partition("^")
            if base not in table.index:
                raise ValueError(f"unknown variable {base!r}")
            m += (int(ex) if ex else 1) * table.units[table.index[base]]
        terms[m] = terms.get(m, mpq(0)) + sign * coef
    return Polynomial(table, terms)


def cvar(k: int, j: int) -> Polynomial:
    return Polynomial._raw(C_TABLE, {C_TABLE.units[c_index(k, j)]: mpq(1)})


def free_series(degrees: Sequence[int], Dmax: int) -> List[int]:
    """Coefficients of prod 1/(1-q^d) up to q^Dmax."""
    s = [1] + [0] * Dmax
    for d in degrees:
        for D in range(d, Dmax + 1):
            s[D] += s[D - d]
    return s


def iter_support(p: Polynomial) -> Iterator[Tuple[int, int, mpq]]:
    for m, c in p.terms.items():
        for i, e in p.table.support(m):
            yield i, e, c
