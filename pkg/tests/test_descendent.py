from __future__ import annotations

import pytest
from gmpy2 import mpq
from hypothesis import given, settings

from tautring.descendent import (SPACE, STACK, CH_TABLE, ToppType, c_to_ch, ch, ch_symbol, ch_td, ch_to_c,
                                 chern_pairing, drop_c11, eta, f_rho_twist, phi, phi_inverse, r_minus1,
                                 sigma)
from tautring.poly import Polynomial, cvar

from _strategies import polys, types


def test_type_invariants():
    a = ToppType(4, 1)
    assert (a.g, a.b, a.dim_stack, a.dim_space, a.m) == (3, 14, 16, 17, 1)
    assert a.r == mpq(5, 4)
    assert not ToppType(4, 2).coprime
    with pytest.raises(ValueError):
        ToppType(0, 1)


def test_chern_pairing_examples():
    assert chern_pairing(ToppType(1, 0), 0) == mpq(-3, 2)
    assert chern_pairing(ToppType(2, 0), 1) == 2
    assert chern_pairing(ToppType(2, 0), 2) == 0
    assert chern_pairing(ToppType(3, 1), 0, twisted=True) == 0


def test_lowering_examples():
    a = ToppType(3, 1)
    assert r_minus1(cvar(1, 1), a) == Polynomial.const(cvar(1, 1).table, 3)
    # c_1(0) has degree 0 and pairs to zero after normalization
    assert not r_minus1(cvar(2, 0), a).terms
    assert r_minus1(cvar(1, 2), a) == cvar(0, 2)
    assert not r_minus1(cvar(0, 2), a).terms


def test_realization_examples():
    a = ToppType(2, 1)
    assert ch(1, 1, a, SPACE) == cvar(0, 2).scale(-a.r)
    assert ch(1, 2, a) == cvar(0, 2)
    assert ch(0, 1, a) == Polynomial.const(cvar(0, 2).table, 2)
    # ch_0(td) pairs with the class: chi
    assert ch_td(0, ToppType(3, -2)) == Polynomial.const(cvar(0, 2).table, -2)


@settings(max_examples=25, deadline=None)
@given(types, polys())
def test_eta_kills_lowering_and_is_multiplicative(a, p):
    e = eta(p, a)
    assert not r_minus1(e, a).terms
    q = cvar(0, 2) + cvar(2, 0).scale(3)
    assert eta(p * q, a) == e * eta(q, a)


@settings(max_examples=25, deadline=None)
@given(types, polys())
def test_eta_two_routes(a, p):
    # series in the lowering operator vs substituting eta of each variable
    images = {}
    for m in p.terms:
        for i, _ in p.table.support(m):
            images[i] = eta(Polynomial._raw(p.table, {p.table.units[i]: mpq(1)}), a)
    assert eta(p, a) == p.substitute(images)


@settings(max_examples=20, deadline=None)
@given(types, polys())
def test_phi_round_trip(a, p):
    assert phi(phi_inverse(p, a), a) == p


@settings(max_examples=25, deadline=None)
@given(types, polys())
def test_dictionary_invertible(a, p):
    assert ch_to_c(c_to_ch(p, a), a) == p


@settings(max_examples=25, deadline=None)
@given(polys())
def test_sigma_involution(p):
    assert sigma(sigma(p)) == p
    assert sigma(cvar(1, 1)) == -cvar(1, 1)
    assert sigma(cvar(2, 0)) == cvar(2, 0)


def test_drop_c11():
    p = cvar(1, 1) * cvar(2, 0) + cvar(0, 2)
    assert drop_c11(p) == cvar(0, 2)


def test_twist_by_rho():
    p = ch_symbol(2, 0)
    out = f_rho_twist(p, mpq(1, 2), CH_TABLE)
    assert out == ch_symbol(2, 0) + ch_symbol(2, 1).scale(mpq(1, 2)) + ch_symbol(2, 2).scale(mpq(1, 8))

@settings(max_examples=15, deadline=None)
@given(types)
def test_twist_matches_shifted_type(a):
    # twisting by rho then realizing for chi equals realizing for chi + rho d
    q = ch_symbol(3, 0) * ch_symbol(1, 1) + ch_symbol(2, 2)
    for rho in (1, -1, 2):
        b = ToppType(a.d, a.chi + rho * a.d)
        assert ch_to_c(f_rho_twist(q, rho, CH_TABLE), a, STACK) == ch_to_c(q, b, STACK)
