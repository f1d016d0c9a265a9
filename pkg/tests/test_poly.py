from __future__ import annotations

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from tautring import kernel
from tautring.graded import GradedIdeal, TruncationError, ideal_slice, normal_form
from tautring.poly import (C_TABLE, Polynomial, VariableTable, cvar, free_series, from_text,
                           monomials_of_degree, rref, to_text)


def _table(degs):
    return VariableTable([(f"x{i}", d, 0) for i, d in enumerate(degs)])


def _series_count(degs, D):
    q = sympy.symbols("q")
    f = 1
    for d in degs:
        f *= 1 / (1 - q ** d)
    return int(sympy.series(f, q, 0, D + 1).removeO().coeff(q, D))


def test_monomials_small_table():
    tb = VariableTable([("x", 1, 0), ("y", 1, 0), ("z", 2, 0)])
    assert monomials_of_degree(tb, 0) == [0]
    got = {tb.mono_str(m) for m in monomials_of_degree(tb, 2)}
    assert got == {"x^2", "x*y", "y^2", "z"}


def test_monomial_count_free_stack_ring():
    tb = _table((1, 1, 1, 2, 2, 2))
    assert len(monomials_of_degree(tb, 4)) == 39
    assert free_series((1, 1, 1, 2, 2, 2), 6) == [1, 3, 9, 19, 39, 69, 119]


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=1, max_size=4), st.integers(0, 7))
def test_monomial_count_matches_series(degs, D):
    assert len(monomials_of_degree(_table(degs), D)) == _series_count(degs, D)


def test_monomial_order_weighted_then_fewer_factors():
    tb = _table((1, 2))
    ms = monomials_of_degree(tb, 2)
    # largest first under the key: the single variable of degree 2 beats x0^2
    assert tb.mono_str(max(ms, key=tb.key)) == "x1"


def test_rref_examples():
    tb = VariableTable([("x", 1, 0), ("y", 1, 0)])
    x, y = Polynomial.var(tb, "x"), Polynomial.var(tb, "y")
    basis, rank = rref([x - y.scale(2), x.scale(2) - y.scale(4)], 1)
    assert rank == 1 and basis[0].monic() == (x - y.scale(2)).monic()
    assert rref([]) == ([], 0)
    with pytest.raises(ValueError):
        rref([x + x * y])


def test_rref_multiples_of_r1():
    r1 = cvar(2, 0) - cvar(0, 2).scale(mpq(1, 8))
    stack_vars = [i for i in range(C_TABLE.nvars) if C_TABLE.degrees[i] == 1]
    rows = [r1 * Polynomial._raw(C_TABLE, {C_TABLE.units[i]: mpq(1)}) for i in stack_vars]
    _, rank = rref(rows, 2)
    assert rank == 3
    # r1 sits in degree 1, so its degree-2 slice is spanned by those three multiples
    I = GradedIdeal(C_TABLE, 2, [i for i in range(C_TABLE.nvars) if C_TABLE.degrees[i] <= 2])
    I.extend([r1])
    assert I.slice_rank(2) == 3
    # adding the second relation brings the rank to 4 and the quotient to 5
    r2 = cvar(1, 2).scale(mpq(-1, 4)) + cvar(3, 0).scale(2)
    assert rref(rows + [r2], 2)[1] == 4
    assert I.hilbert_function() == [1, 2, 6]


@settings(max_examples=30, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=5))
def test_rref_projection(rows):
    tb = _table((1, 1, 1, 1))
    polys = [Polynomial(tb, {tb.units[i]: c for i, c in enumerate(r) if c}) for r in rows]
    polys = [p for p in polys if p.terms] or [Polynomial.var(tb, "x0")]
    basis, rank = rref(polys, 1)
    again, rank2 = rref(basis, 1)
    assert rank == rank2 and again == basis
    piv = {}
    for b in basis:
        kernel.insert_row(dict(b.terms), piv)
    for p in polys:
        assert not kernel.reduce_row(dict(p.terms), piv)


def test_ideal_slice_examples():
    tb = VariableTable([("h", 1, 0)])
    h = Polynomial.var(tb, "h")
    I = GradedIdeal(tb, 3)
    I.extend([], upto=2)
    assert len(ideal_slice([h ** 3], 3, I)) == 1
    tb2 = VariableTable([("a", 1, 0), ("b", 1, 0)])
    a, b = Polynomial.var(tb2, "a"), Polynomial.var(tb2, "b")
    J = GradedIdeal.from_generators(tb2, [(a + b) ** 3], 4)
    assert J.slice_rank(4) == 2
    assert J.hilbert_function() == [1, 2, 3, 3, 3]


def test_normal_form_examples():
    act = [i for i in range(C_TABLE.nvars) if C_TABLE.degrees[i] <= 1]
    I = GradedIdeal.from_generators(C_TABLE, [cvar(0, 2) - cvar(2, 0).scale(2)], 1, act)
    assert normal_form(cvar(0, 2), I) == cvar(2, 0).scale(2)
    assert not normal_form(Polynomial.zero(C_TABLE), I).terms
    with pytest.raises(TruncationError):
        I.reduce(cvar(0, 2) ** 2)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=6, max_size=6), st.lists(st.integers(-4, 4), min_size=6, max_size=6))
def test_normal_form_linear_idempotent(u, v):
    tb = _table((1, 1, 1))
    x = [Polynomial.var(tb, f"x{i}") for i in range(3)]
    I = GradedIdeal.from_generators(tb, [x[0] ** 2 - x[1] * x[2], x[0] * x[1]], 3)
    mons = monomials_of_degree(tb, 2)
    p = Polynomial(tb, {m: c for m, c in zip(mons, u) if c})
    q = Polynomial(tb, {m: c for m, c in zip(mons, v) if c})
    assert I.reduce(p + q) == I.reduce(p) + I.reduce(q)
    assert I.reduce(I.reduce(p)) == I.reduce(p)
    assert I.contains(p - I.reduce(p))


def test_free_ring_hilbert():
    act = [i for i in range(C_TABLE.nvars) if C_TABLE.degrees[i] <= 2]
    I = GradedIdeal.from_generators(C_TABLE, [], 6, act)
    assert I.hilbert_function() == [1, 3, 9, 19, 39, 69, 119]


def test_text_round_trip():
    p = cvar(2, 0) - cvar(0, 2).scale(mpq(1, 8))
    s = to_text(p)
    assert s == "-1/8*c0(2) + c2(0)"
    assert from_text(C_TABLE, s) == p
    q = (cvar(1, 1) * cvar(2, 0) ** 4).scale(3) - cvar(2, 0) ** 3 * cvar(3, 0).scale(mpq(2, 7))
    assert from_text(C_TABLE, to_text(q)) == q


def test_table_rejects_bad_entries():
    with pytest.raises(ValueError):
        VariableTable([("x", 0, 0)])
    with pytest.raises(ValueError):
        VariableTable([("x", 1, 0), ("x", 2, 0)])


@settings(max_examples=25, deadline=None)
@given(st.dictionaries(st.integers(0, 20), st.integers(-5, 5), max_size=6),
       st.dictionaries(st.integers(0, 20), st.integers(-5, 5), max_size=6))
def test_backends_agree(a, b):
    from tautring import _kernel_py
    tb = _table((1, 1, 2))
    mons = monomials_of_degree(tb, 3) + monomials_of_degree(tb, 2)
    va = {mons[k % len(mons)]: mpq(c) for k, c in a.items() if c}
    vb = {mons[k % len(mons)]: mpq(c) for k, c in b.items() if c}
    assert kernel.poly_mul(va, vb) == _kernel_py.poly_mul(va, vb)
    x, y = dict(va), dict(va)
    kernel.axpy(x, mpq(3, 2), vb)
    _kernel_py.axpy(y, mpq(3, 2), vb)
    assert x == y
