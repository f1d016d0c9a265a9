"""Virasoro operators on c-coordinate polynomials."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Iterable, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .descendent import SPACE, STACK, ToppType, _kj, _variables, ch, drop_c11, r_minus1
from .poly import C_TABLE, Polynomial, cvar

# (power of H on the left, power on the right, coefficient) for the
# diagonal pushforward of td(P^2)
KUNNETH: Tuple[Tuple[int, int, mpq], ...] = (
    (2, 0, mpq(1)),
    (1, 1, mpq(1)),
    (0, 2, mpq(1)),
    (1, 2, mpq(3, 2)),
    (2, 1, mpq(3, 2)),
    (2, 2, mpq(1)),
)


@dataclass(frozen=True)
class VirasoroOperator:
    kind: str
    n: int
    alpha: ToppType

    def __call__(self, p: Polynomial) -> Polynomial:
        fn = {
            "R": apply_Rn,
            "L": apply_Ln,
            "R_delta": apply_Rn_delta,
            "L_delta": apply_Ln_delta,
        }.get(self.kind)
        if self.kind == "L_wt0":
            return apply_Lwt0(p, self.alpha)
        if fn is None:
            raise ValueError(f"unknown operator kind {self.kind}")
        return fn(self.n, p, self.alpha)


def _rn_coeff(D: int, n: int) -> int:
    out = 1
    for t in range(n + 1):
        out *= D + t
    return out


def apply_Rn(n: int, p: Polynomial, alpha: ToppType, dmax: Optional[int] = None) -> Polynomial:
    """``R_n(c_k(j)) = (k+j-1)...(k+j-1+n) c_{k+n}(j)`` extended as a derivation."""
    if n < -1:
        raise ValueError("R_n needs n >= -1")
    if n == -1:
        return r_minus1(p, alpha)
    images = {}
    for i, _ in _variables(p):
        k, j = _kj(i)
        D = k + j - 1
        if dmax is not None and D + n > dmax:
            raise ValueError(f"R_{n} leaves the truncation {dmax}")
        images[i] = cvar(k + n, j).scale(_rn_coeff(D, n))
    return p.apply_derivation(images)


@lru_cache(maxsize=None)
def T_element(n: int, alpha: ToppType) -> Polynomial:
    """``sum_{a+b=n} sum_i a! b! (-1)^{2-d_i^L} ch_a(gamma_i^L) ch_b(gamma_i^R)``."""
    if n < 0:
        return Polynomial.zero(C_TABLE)
    out = Polynomial.zero(C_TABLE)
    for a in range(n + 1):
        b = n - a
        for jl, jr, coef in KUNNETH:
            sgn = 1 if jl % 2 == 0 else -1
            out = out + (ch(a, jl, alpha) * ch(b, jr, alpha)).scale(coef * sgn * factorial(a) * factorial(b))
    return out


def T_delta(n: int, alpha: ToppType) -> Polynomial:
    return T_element(n, alpha) - _c_n1(n, alpha).scale(mpq(factorial(n + 1), alpha.d))


def _c_n1(k: int, alpha: ToppType) -> Polynomial:
    # c_k(1); c_0(1) is the constant d
    if k == 0:
        return Polynomial.const(C_TABLE, alpha.d)
    return cvar(k, 1)


def apply_Ln(n: int, p: Polynomial, alpha: ToppType) -> Polynomial:
    return apply_Rn(n, p, alpha) + T_element(n, alpha) * p


def apply_Rn_delta(n: int, p: Polynomial, alpha: ToppType) -> Polynomial:
    if n < 0:
        raise ValueError("R_n^delta needs n >= 0")
    corr = cvar(n + 1, 1) * r_minus1(p, alpha)
    return apply_Rn(n, p, alpha) - corr.scale(mpq(factorial(n + 1), alpha.d))


def apply_Ln_delta(n: int, p: Polynomial, alpha: ToppType) -> Polynomial:
    return apply_Rn_delta(n, p, alpha) + T_delta(n, alpha) * p


def apply_Lwt0(p: Polynomial, alpha: ToppType) -> Polynomial:
    """``sum_{n >= -1} (-1)^n/(n+1)! L_n L_{-1}^{n+1}``."""
    out = Polynomial.zero(C_TABLE)
    powers = [p]
    while powers[-1].terms:
        powers.append(r_minus1(powers[-1], alpha))
    for n in range(-1, len(powers) - 1):
        q = powers[n + 1]
        if not q.terms:
            continue
        Lq = r_minus1(q, alpha) if n == -1 else apply_Ln(n, q, alpha)
        out = out + Lq.scale(mpq((-1) ** (n % 2), factorial(n + 1)))
    return out


def closure_images(gens: Iterable[Polynomial], n: int, alpha: ToppType, kind: str = STACK,
                   use_ln: bool = False) -> List[Polynomial]:
    """Images of ``gens`` under the operator used for closure at index ``n``."""
    out = []
    for g in gens:
        if kind == SPACE:
            img = drop_c11(apply_Rn_delta(n, g, alpha))
            if use_ln:
                img = img + drop_c11(T_delta(n, alpha)) * g
        else:
            img = apply_Rn(n, g, alpha)
            if use_ln:
                img = img + T_element(n, alpha) * g
        if img.terms:
            out.append(img)
    return out


def virasoro_closure(gens: Sequence[Polynomial], alpha: ToppType, Dtarget: int, ideal=None,
                     kind: str = STACK, use_ln: bool = False) -> List[Polynomial]:
    """All ``R_n(g)`` (``n >= 1``) of degree ``<= Dtarget``, normal-formed when an ideal is given.

    Only nonzero results are returned.
    """
    out = []
    for g in gens:
        if not g.terms:
            continue
        D = g.degree()
        for n in range(1, Dtarget - D + 1):
            for img in closure_images([g], n, alpha, kind, use_ln):
                if ideal is not None and img.degree() <= ideal.built:
                    img = ideal.reduce(img)
                if img.terms:
                    out.append(img)
    return out
