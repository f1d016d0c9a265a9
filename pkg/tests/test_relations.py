from __future__ import annotations

from fractions import Fraction
from math import factorial

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from tautring.descendent import SPACE, STACK, ToppType, ch, ch_td
from tautring.graded import GradedIdeal
from tautring.pipeline import active_variables
from tautring.poly import C_TABLE, Polynomial, cvar
from tautring.relations import (MumfordStream, base_relations, base_relations_at, falling,
                                falling_factorial_identity, gmr_relations, lemma_right_lowering,
                                mr_identity_residual, mr_twists, mumford_relations, precedes,
                                primitive_br, primitive_mr, quadratic_identity_check, right_ring_for,
                                slope_window)

A10 = ToppType(1, 0)


def _gamma(k, a):
    # ch_n(td e^{kH}) = ch_n(1) + (k + 3/2) ch_n(H) + (1 + 3k/2 + k^2/2) ch_n(H^2)
    c1, c2 = mpq(2 * k + 3, 2), mpq(2 + 3 * k + k * k, 2)
    return lambda n: ch(n, 0, a) + ch(n, 1, a).scale(c1) + ch(n, 2, a).scale(c2)


def _mr_ideal(a, Dmax):
    gens = []
    for sign, k in mr_twists(a, Dmax + 1):
        gens.extend(mumford_relations(a, sign, k, Dmax).polys)
    return GradedIdeal.from_generators(C_TABLE, gens, Dmax, active_variables(STACK, Dmax))


def test_line_stack_from_mumford_relations():
    I = _mr_ideal(A10, 6)
    assert I.hilbert_function() == [1, 2, 3, 3, 3, 3, 3]
    g0, g1, gm = _gamma(0, A10), _gamma(1, A10), _gamma(-1, A10)
    alpha, beta = g1(1), gm(1)
    for k in range(1, 5):
        assert I.contains(g0(k))
        assert I.contains(g1(k) - alpha ** k * mpq(1, factorial(k)))
        assert I.contains(gm(k) - beta ** k * mpq((-1) ** (k + 1), factorial(k)))
    assert I.contains(alpha + beta - cvar(0, 2))
    assert I.contains((alpha + beta) ** 3)
    assert not I.contains((alpha + beta) ** 2)


def test_chern_class_from_power_sums():
    s = MumfordStream(A10, 1, 2)
    g = _gamma(2, A10)
    want = g(1) ** 3 * mpq(1, 6) - g(1) * g(2) + g(3).scale(2)
    assert s.chern(3) == want
    assert s.rank == 2
    assert mumford_relations(A10, 1, 2, 3).polys == [want]


def test_twist_list_and_rank_guard():
    a = ToppType(3, 1)
    tw = mr_twists(a, 8)
    assert all(a.g <= s * a.chi + k * a.d < 8 for s, k in tw)
    assert (1, 0) in tw and (-1, 1) in tw
    with pytest.raises(ValueError):
        MumfordStream(a, 1, -1)
    assert len(primitive_mr(a, 8)) == len(tw)


@pytest.mark.parametrize("chi,n,j", [(0, 1, 1), (1, 1, 2), (2, 2, 3), (3, 1, 4), (1, 3, 2)])
def test_mumford_raising_identity(chi, n, j):
    for d in (1, 2):
        a = ToppType(d, chi)
        if a.chi >= a.g:
            assert not mr_identity_residual(a, n, j).terms


def test_base_relations():
    a = ToppType(1, 0)
    assert primitive_br(a) == cvar(0, 2) ** 3
    assert base_relations_at(a, 3) == [cvar(0, 2) ** 3]
    # partitions of 5 into 3 parts: (1,1,3), (1,2,2)
    assert len(base_relations_at(a, 5)) == 2
    assert cvar(0, 2) ** 2 * cvar(2, 2) in base_relations_at(a, 5)
    assert len(base_relations(a, 5)) == 1 + 1 + 2


def test_slope_window_and_order():
    a = ToppType(2, 1)
    assert slope_window(a, ToppType(1, 0)) and slope_window(a, ToppType(1, -2))
    assert not slope_window(a, ToppType(1, 1)) and not slope_window(a, ToppType(1, -3))
    assert precedes(ToppType(1, 0), a) and not precedes(a, a)
    assert precedes(ToppType(4, 1), ToppType(4, 2))


def test_right_ring_isomorphisms(rings):
    base = rings.space(1)
    assert not right_ring_for(ToppType(1, 5), SPACE, base.ideal, base.alpha).flip
    assert right_ring_for(ToppType(1, -3), SPACE, base.ideal, ToppType(1, 2)).flip is False
    assert not right_ring_for(ToppType(2, -1), STACK, base.ideal, ToppType(2, 1)).flip
    assert right_ring_for(ToppType(3, -1), SPACE, base.ideal, ToppType(3, 1)).flip
    with pytest.raises(ValueError):
        right_ring_for(ToppType(2, 1), SPACE, base.ideal, ToppType(1, 0))


def test_gmr_relations_hold(rings):
    pres = rings.space(2)
    a = pres.alpha
    right = rings.reg.right_ring(ToppType(1, 0), SPACE)
    for j in range(3, pres.top + 2):
        for p in gmr_relations(a, right, j, pres.top, SPACE):
            assert pres.contains(p)
    with pytest.raises(ValueError):
        gmr_relations(a, right, 2, 4, SPACE)


def test_right_lowering_on_tensor_class():
    assert lemma_right_lowering(ToppType(2, 1), ToppType(1, 0), 4)
    assert lemma_right_lowering(ToppType(3, 1), ToppType(1, 0), 3)


@pytest.mark.parametrize("n", [0, 1])
def test_quadratic_identity(n):
    ok, res = quadratic_identity_check(ToppType(2, 1), ToppType(1, 0), n, 3)
    assert ok, res


def test_falling_factorial_example():
    assert falling(5, 3) == 60
    assert falling_factorial_identity(5, 7, 3)


@settings(max_examples=60, deadline=None)
@given(st.builds(Fraction, st.integers(-40, 40), st.integers(1, 7)),
       st.builds(Fraction, st.integers(-40, 40), st.integers(1, 7)), st.integers(0, 6))
def test_falling_factorial_identity(a, b, m):
    assert falling_factorial_identity(a, b, m)
