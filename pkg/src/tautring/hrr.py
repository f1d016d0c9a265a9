"""Riemann-Roch on completed space rings.

The tangent class is ``1 - RHom(F, F)`` pushed forward; its Chern character
comes from the diagonal Kunneth expansion with both tensor factors realized
in the same ring.  Todd classes use power sums ``p_m = m! ch_m`` and the
coefficients of ``log(x / (1 - e^{-x}))``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Dict, List, Sequence

from gmpy2 import mpq
from sympy import Rational, exp, series, log, symbols

from .descendent import SPACE, ToppType, ch
from .poly import C_TABLE, Polynomial, cvar, monomials_of_degree
from .virasoro import KUNNETH, apply_Ln_delta


class IntegrationError(ValueError):
    pass


@lru_cache(maxsize=None)
def _kappa(n: int) -> tuple:
    x = symbols("x")
    s = series(log(x / (1 - exp(-x))), x, 0, n + 1).removeO()
    return tuple(mpq(int(Rational(s.coeff(x, m)).p), int(Rational(s.coeff(x, m)).q)) for m in range(n + 1))


@dataclass(frozen=True)
class ToddCoefficients:
    kappa: tuple     # kappa[m] for m = 0..n, kappa[0] = 0

    @classmethod
    def up_to(cls, n: int) -> "ToddCoefficients":
        return cls(_kappa(max(n, 2)))

    def __getitem__(self, m: int) -> mpq:
        return self.kappa[m]


def _require_complete(pres) -> None:
    if pres.kind != SPACE or not pres.complete:
        raise IntegrationError("needs a complete space ring")


def tangent_character(pres) -> List[Polynomial]:
    """``ch_m(T_M)`` for ``m = 0..top``, reduced modulo the ideal."""
    _require_complete(pres)
    alpha, top = pres.alpha, pres.top
    cache: Dict[tuple, Polynomial] = {}

    def chv(a: int, j: int) -> Polynomial:
        if (a, j) not in cache:
            cache[(a, j)] = ch(a, j, alpha, SPACE)
        return cache[(a, j)]

    out = []
    for m in range(top + 1):
        acc = Polynomial.const(C_TABLE, 1 if m == 0 else 0)
        for a in range(m + 1):
            b = m - a
            for jl, jr, coef in KUNNETH:
                l, r = chv(a, jl), chv(b, jr)
                if not l.terms or not r.terms:
                    continue
                sgn = -1 if (a + jl) % 2 else 1
                acc = acc - (l * r).scale(coef * sgn)
        out.append(pres.reduce(acc))
    return out


def _graded_exp(parts: Sequence[Polynomial], pres) -> List[Polynomial]:
    """``exp(s)`` for ``s = sum_m parts[m]`` with ``parts[0] = 0``."""
    n = len(parts) - 1
    E = [Polynomial.const(C_TABLE, 1)]
    for k in range(1, n + 1):
        acc = Polynomial.zero(C_TABLE)
        for t in range(1, k + 1):
            if parts[t].terms and E[k - t].terms:
                acc = acc + (parts[t] * E[k - t]).scale(t)
        E.append(pres.reduce(acc.scale(mpq(1, k))) if pres is not None else acc.scale(mpq(1, k)))
    return E


def todd(chars: Sequence[Polynomial], pres=None) -> List[Polynomial]:
    """Graded Todd class ``exp(sum_m kappa_m m! ch_m)``; ``chars[0]`` (the rank) is ignored."""
    n = len(chars) - 1
    kap = ToddCoefficients.up_to(n)
    parts = [Polynomial.zero(C_TABLE)] + [chars[m].scale(kap[m] * factorial(m)) for m in range(1, n + 1)]
    return _graded_exp(parts, pres)


@dataclass
class IntegrationFunctional:
    """``int p = scale * (top coordinate of NF(p))``."""

    pres: object
    scale: mpq
    td: List[Polynomial]

    @property
    def top(self) -> int:
        return self.pres.top

    def top_coordinate(self, p: Polynomial) -> mpq:
        q = self.pres.reduce(p.homogeneous_part(self.top) if p.terms else p)
        co = self.pres.ideal.coordinates(q, self.top)
        return co[0] if co else mpq(0)

    def __call__(self, p: Polynomial) -> mpq:
        return self.scale * self.top_coordinate(p)

    def point_class(self) -> Polynomial:
        mono = self.pres.ideal.basis(self.top)[0]
        return Polynomial._raw(C_TABLE, {mono: 1 / self.scale})

    def renormalized(self) -> "IntegrationFunctional":
        total = self(self.td[self.top])
        return IntegrationFunctional(self.pres, self.scale / total, self.td)


def normalize_integral(pres) -> IntegrationFunctional:
    """Scale the top-degree functional so that ``int td(M) = 1``."""
    _require_complete(pres)
    if pres.hilbert_function()[pres.top] != 1:
        raise IntegrationError("top degree is not one-dimensional")
    td = todd(tangent_character(pres), pres)
    raw = IntegrationFunctional(pres, mpq(1), td)
    t = raw.top_coordinate(td[pres.top])
    if not t:
        raise IntegrationError("top part of the Todd class vanishes")
    return IntegrationFunctional(pres, 1 / t, td)


def euler_polynomial(f: IntegrationFunctional) -> List[mpq]:
    """Coefficients ``e_k`` with ``chi(m c_0(2)) = sum_k e_k m^k``."""
    pres, top = f.pres, f.top
    xi = pres.reduce(cvar(0, 2))
    power = Polynomial.const(C_TABLE, 1)
    out = []
    for k in range(top + 1):
        out.append(f(power * f.td[top - k]) / factorial(k))
        power = pres.reduce(power * xi)
    return out


def euler_characteristic(pres_or_f, m: int) -> Fraction:
    """``int e^{m c_0(2)} td(M)``; raises if the value is not an integer."""
    f = pres_or_f if isinstance(pres_or_f, IntegrationFunctional) else normalize_integral(pres_or_f)
    coeffs = euler_polynomial(f)
    val = sum(Fraction(int(c.numerator), int(c.denominator)) * m ** k for k, c in enumerate(coeffs))
    if val.denominator != 1:
        raise IntegrationError(f"non-integral Euler characteristic {val} at m = {m}")
    return val


def expected_euler(d: int, m: int) -> int:
    return comb(m + 3 * d - 1, m)


def random_polynomial(D: int, rng: random.Random, nterms: int = 4) -> Polynomial:
    """Random homogeneous polynomial of degree ``D`` with small rational coefficients."""
    monos = monomials_of_degree(C_TABLE, D)
    if not monos:
        return Polynomial.zero(C_TABLE)
    pick = rng.sample(monos, min(nterms, len(monos)))
    return Polynomial._raw(C_TABLE, {m: mpq(rng.randint(1, 9) * rng.choice((1, -1)), rng.randint(1, 5))
                                     for m in pick})


def virasoro_integral_check(f: IntegrationFunctional, n: int, samples: int = 50, seed: int = 0) -> List[mpq]:
    """Values ``int L_n^delta(D)`` for random ``D`` of degree ``top - n``; all should vanish."""
    rng = random.Random(seed * 1009 + n)
    alpha: ToppType = f.pres.alpha
    D = f.top - n
    vals = []
    for _ in range(samples):
        p = random_polynomial(D, rng)
        vals.append(f(apply_Ln_delta(n, p, alpha)))
    return vals
