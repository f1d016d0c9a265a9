"""Plethystic calculus for Poincare series along a ray of fixed slope.

Series live in Q((x)) with ``x = q^{1/2}``, so half-integer powers of ``q``
are stored as integer powers of ``x``.  A :class:`MonoidSeries` is a list
indexed by the multiple ``k`` of the primitive class on the ray.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence

from sympy import mobius

Coeffs = Dict[int, Fraction]


@dataclass
class LSeries:
    """Truncated Laurent series in ``x``; exponents ``> prec`` are unknown."""

    coeffs: Coeffs
    prec: int

    @classmethod
    def zero(cls, prec: int) -> "LSeries":
        return cls({}, prec)

    @classmethod
    def monomial(cls, c, e: int, prec: int) -> "LSeries":
        return cls({e: Fraction(c)} if e <= prec and c else {}, prec)

    @classmethod
    def from_q_poly(cls, coeffs: Sequence, prec: int) -> "LSeries":
        """Polynomial in ``q`` given by its coefficient list."""
        return cls({2 * i: Fraction(c) for i, c in enumerate(coeffs) if c and 2 * i <= prec}, prec)

    def _clean(self) -> "LSeries":
        self.coeffs = {e: c for e, c in self.coeffs.items() if c and e <= self.prec}
        return self

    def __add__(self, other: "LSeries") -> "LSeries":
        prec = min(self.prec, other.prec)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return LSeries(out, prec)._clean()

    def __neg__(self) -> "LSeries":
        return LSeries({e: -c for e, c in self.coeffs.items()}, self.prec)

    def __sub__(self, other: "LSeries") -> "LSeries":
        return self + (-other)

    def scale(self, c) -> "LSeries":
        c = Fraction(c)
        return LSeries({e: c * v for e, v in self.coeffs.items()}, self.prec)._clean()

    def valuation(self) -> Optional[int]:
        return min(self.coeffs) if self.coeffs else None

    def __mul__(self, other: "LSeries") -> "LSeries":
        va, vb = self.valuation(), other.valuation()
        if va is None or vb is None:
            return LSeries.zero(min(self.prec + (vb or 0), other.prec + (va or 0)))
        prec = min(self.prec + vb, other.prec + va)
        out: Coeffs = {}
        for ea, ca in self.coeffs.items():
            for eb, cb in other.coeffs.items():
                e = ea + eb
                if e <= prec:
                    out[e] = out.get(e, 0) + ca * cb
        return LSeries(out, prec)._clean()

    def shift(self, k: int) -> "LSeries":
        return LSeries({e + k: c for e, c in self.coeffs.items()}, self.prec + k)

    def adams(self, n: int) -> "LSeries":
        """``x -> x^n``."""
        return LSeries({n * e: c for e, c in self.coeffs.items()}, n * self.prec + (n - 1) * 0)

    def truncate(self, prec: int) -> "LSeries":
        return LSeries({e: c for e, c in self.coeffs.items() if e <= prec}, min(prec, self.prec))

    def coefficient(self, e: int) -> Fraction:
        if e > self.prec:
            raise ValueError(f"coefficient x^{e} beyond precision {self.prec}")
        return self.coeffs.get(e, Fraction(0))

    def q_coefficients(self, upto: int) -> List[Fraction]:
        """Coefficients of ``q^0..q^upto`` for a series in integral powers of ``q``."""
        if any(e % 2 for e in self.coeffs):
            raise ValueError("series has half-integral powers of q")
        return [self.coefficient(2 * i) for i in range(upto + 1)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LSeries):
            return NotImplemented
        p = min(self.prec, other.prec)
        return self.truncate(p).coeffs == other.truncate(p).coeffs


def geometric_q(prec: int, step: int = 2) -> LSeries:
    """``1/(1 - x^step)``."""
    return LSeries({e: Fraction(1) for e in range(0, prec + 1, step)}, prec)


MonoidSeries = List[LSeries]


def pe(f: MonoidSeries) -> MonoidSeries:
    """``exp(sum_n f(x^n, e^n)/n)``; ``f[0]`` must vanish."""
    if f[0].coeffs:
        raise ValueError("pe needs a vanishing e^0 component")
    K = len(f) - 1
    prec = min(s.prec for s in f)
    F: List[LSeries] = [LSeries.zero(prec)]
    for k in range(1, K + 1):
        acc = LSeries.zero(prec)
        for n in range(1, k + 1):
            if k % n == 0:
                acc = acc + f[k // n].adams(n).scale(Fraction(1, n))
        F.append(acc.truncate(prec))
    G: List[LSeries] = [LSeries({0: Fraction(1)}, prec)]
    for k in range(1, K + 1):
        acc = LSeries.zero(10 ** 9)
        for t in range(1, k + 1):
            acc = acc + (F[t] * G[k - t]).scale(t)
        G.append(acc.scale(Fraction(1, k)))
    return G


def plog(g: MonoidSeries) -> MonoidSeries:
    """Inverse of :func:`pe`; ``g[0]`` must be 1."""
    if g[0].coeffs != {0: Fraction(1)}:
        raise ValueError("plog needs e^0 component equal to 1")
    K = len(g) - 1
    F: List[LSeries] = [LSeries.zero(g[0].prec)]
    for k in range(1, K + 1):
        acc = g[k].scale(k)
        for t in range(1, k):
            acc = acc - (F[t] * g[k - t]).scale(t)
        F.append(acc.scale(Fraction(1, k)))
    f: List[LSeries] = [LSeries.zero(g[0].prec)]
    for k in range(1, K + 1):
        acc = LSeries.zero(10 ** 9)
        for n in range(1, k + 1):
            if k % n == 0 and mobius(n):
                acc = acc + F[k // n].adams(n).scale(Fraction(int(mobius(n)), n))
        f.append(acc)
    return f


def shifted(E_q: Sequence, dim: int, prec: int) -> LSeries:
    """``(-x)^{-dim} E(x^2)`` from a coefficient list of ``E`` in ``q``."""
    s = LSeries.from_q_poly(E_q, prec + dim)
    s = s.shift(-dim)
    return s.scale(-1) if dim % 2 else s


def unshift(S: LSeries, dim: int) -> LSeries:
    s = S.shift(dim)
    return s.scale(-1) if dim % 2 else s


def stack_series(IE_inputs: Mapping[int, Sequence], d_min: int, kcut: int, qdeg: int) -> Dict[int, List[Fraction]]:
    """Stack Poincare series ``E(M_{k d_min})`` up to ``q^qdeg``.

    ``IE_inputs[k]`` is the intersection Poincare polynomial (coefficient list
    in ``q``) of the good moduli space at ``k d_min``.
    """
    for k in range(1, kcut + 1):
        if k not in IE_inputs:
            raise ValueError(f"missing intersection Poincare input for multiple {k} (d = {k * d_min})")
    dmax = kcut * d_min
    prec = 2 * qdeg + 2 * dmax * dmax + 4
    pre = LSeries({e: Fraction(-1) for e in range(1, prec + 1, 2)}, prec)  # -x/(1-x^2)
    f: MonoidSeries = [LSeries.zero(prec)]
    for k in range(1, kcut + 1):
        d = k * d_min
        f.append((pre * shifted(IE_inputs[k], d * d + 1, prec)).truncate(prec))
    G = pe(f)
    out = {}
    for k in range(1, kcut + 1):
        d = k * d_min
        E = unshift(G[k], d * d)
        out[d] = E.q_coefficients(qdeg)
    return out


def stack_series_shifted(IE_shifted: Mapping[int, LSeries], kcut: int) -> MonoidSeries:
    """Same identity on already shifted inputs, returning shifted outputs."""
    prec = min(s.prec for s in IE_shifted.values())
    pre = LSeries({e: Fraction(-1) for e in range(1, prec + 1, 2)}, prec)
    f: MonoidSeries = [LSeries.zero(prec)] + [(pre * IE_shifted[k]).truncate(prec) for k in range(1, kcut + 1)]
    return pe(f)


def structural_decompose(E: Sequence, d: int, m: int) -> List[int]:
    """``A = E * prod_{j<=m} (1 - q^j)`` with the polynomial shape checks."""
    N = d * d + m * (m + 1) // 2
    if len(E) <= N:
        raise ValueError(f"need E to q-degree >= {N}")
    A = [Fraction(c) for c in E]
    for j in range(1, m + 1):
        A = [A[i] - (A[i - j] if i >= j else 0) for i in range(len(A))]
    for i in range(N + 1, len(A)):
        if A[i]:
            raise ValueError(f"A has nonzero coefficient {A[i]} at q^{i} beyond degree {N}")
    if A[0] != 1:
        raise ValueError(f"constant term {A[0]} != 1")
    if A[N] != (-1) ** (m - 1):
        raise ValueError(f"leading coefficient {A[N]} != {(-1) ** (m - 1)}")
    if any(c.denominator != 1 for c in A):
        raise ValueError("non-integral coefficient")
    return [int(c) for c in A[:N + 1]]


def series_from_rational(num: Sequence[int], den_factors: Sequence[int], upto: int) -> List[int]:
    """Expand ``num / prod (1 - q^j)`` up to ``q^upto``."""
    s = [0] * (upto + 1)
    for i, c in enumerate(num):
        if i <= upto:
            s[i] = c
    for j in den_factors:
        for i in range(j, upto + 1):
            s[i] += s[i - j]
    return s
