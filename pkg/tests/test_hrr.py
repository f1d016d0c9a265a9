from __future__ import annotations

import random
from math import comb

import pytest
import sympy
from gmpy2 import mpq

from tautring import hrr
from tautring.poly import C_TABLE, Polynomial, cvar


def test_todd_coefficients_against_series():
    x = sympy.symbols("x")
    s = sympy.series(sympy.log(x / (1 - sympy.exp(-x))), x, 0, 7).removeO()
    kap = hrr.ToddCoefficients.up_to(6)
    for m in range(7):
        assert kap[m] == mpq(str(sympy.Rational(s.coeff(x, m))))
    assert kap[1] == mpq(1, 2) and kap[2] == mpq(-1, 24)


def test_todd_of_projective_plane():
    H = cvar(0, 2)
    chars = [Polynomial.const(C_TABLE, 2), H.scale(3), (H * H).scale(mpq(3, 2))]
    td = hrr.todd(chars)
    assert td[0] == Polynomial.const(C_TABLE, 1)
    assert td[1] == H.scale(mpq(3, 2))
    assert td[2] == H * H


def test_todd_degree_two_from_chern_classes():
    c1, c2 = cvar(0, 2), cvar(1, 2)
    chars = [Polynomial.const(C_TABLE, 3), c1, (c1 * c1 - c2.scale(2)).scale(mpq(1, 2))]
    td = hrr.todd(chars)
    assert td[1] == c1.scale(mpq(1, 2))
    assert td[2] == (c1 * c1 + c2).scale(mpq(1, 12))


def test_todd_of_zero_character():
    zero = Polynomial.zero(C_TABLE)
    td = hrr.todd([zero, zero, zero, zero])
    assert td[0] == Polynomial.const(C_TABLE, 1)
    assert all(not p.terms for p in td[1:])


def test_tangent_character_projective_plane(rings):
    pres = rings.space(1, 0)
    ch = hrr.tangent_character(pres)
    c = cvar(0, 2)
    want = [Polynomial.const(C_TABLE, 2), c.scale(3), (c * c).scale(mpq(3, 2))]
    assert ch == [pres.reduce(w) for w in want]


@pytest.mark.parametrize("d", [1, 2, 3])
def test_tangent_rank(rings, d):
    ch = hrr.tangent_character(rings.space(d))
    assert ch[0] == Polynomial.const(C_TABLE, d * d + 1)
    assert all(p.degree() == m for m, p in enumerate(ch) if p.terms)


def test_point_class_of_projective_plane(rings):
    f = hrr.normalize_integral(rings.space(1, 0))
    assert f(cvar(0, 2) ** 2) == 1
    assert f(cvar(0, 2)) == 0
    assert f.renormalized().scale == f.scale
    assert f(f.point_class()) == 1


@pytest.mark.parametrize("d,mmax", [(1, 6), (2, 6), (3, 8)])
def test_euler_characteristics(rings, d, mmax):
    f = hrr.normalize_integral(rings.space(d))
    for m in range(mmax + 1):
        assert hrr.euler_characteristic(f, m) == comb(m + 3 * d - 1, m) == hrr.expected_euler(d, m)


def test_euler_polynomial_degree(rings):
    f = hrr.normalize_integral(rings.space(2))
    e = hrr.euler_polynomial(f)
    m = sympy.symbols("m")
    want = sympy.Poly(sympy.expand_func(sympy.binomial(m + 5, 5)), m).all_coeffs()[::-1]
    assert [sympy.Rational(int(c.numerator), int(c.denominator)) for c in e] == want


def test_non_integral_value_is_flagged(rings):
    f = hrr.normalize_integral(rings.space(1, 0))
    bad = hrr.IntegrationFunctional(f.pres, f.scale / 2, f.td)
    with pytest.raises(hrr.IntegrationError):
        hrr.euler_characteristic(bad, 1)


def test_stack_rings_are_rejected(rings):
    with pytest.raises(hrr.IntegrationError):
        hrr.normalize_integral(rings.stack(1, 6))


@pytest.mark.parametrize("d", [1, 2])
@pytest.mark.parametrize("n", [0, 1, 2])
def test_virasoro_integrals_vanish(rings, d, n):
    f = hrr.normalize_integral(rings.space(d))
    assert all(v == 0 for v in hrr.virasoro_integral_check(f, n, samples=50))


def test_virasoro_integral_needs_both_parts(rings):
    from tautring.virasoro import T_delta, apply_Ln, apply_Rn_delta
    f = hrr.normalize_integral(rings.space(2))
    a = f.pres.alpha
    rng = random.Random(3)
    Ds = [hrr.random_polynomial(f.top, rng) for _ in range(10)]
    # each half of the normalized operator integrates to something nonzero; only the sum vanishes
    assert any(f(apply_Rn_delta(0, D, a)) for D in Ds)
    assert any(f(T_delta(0, a) * D) for D in Ds)
    # the operator without the normalizing correction fails
    Ds = [hrr.random_polynomial(f.top - 1, rng) for _ in range(10)]
    assert any(f(apply_Ln(1, D, a)) for D in Ds)
