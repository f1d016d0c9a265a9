from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from tautring.bps import (LSeries, geometric_q, pe, plog, series_from_rational, shifted, stack_series,
                          structural_decompose, unshift)

q = sympy.symbols("q")


def _expand(expr, n):
    s = sympy.series(expr, q, 0, n + 1).removeO()
    return [int(s.coeff(q, i)) for i in range(n + 1)]


def test_pe_of_single_class():
    prec = 40
    f = [LSeries.zero(prec), LSeries.monomial(1, 2, prec)] + [LSeries.zero(prec) for _ in range(5)]
    G = pe(f)
    for d in range(7):
        assert G[d] == LSeries.monomial(1, 2 * d, prec)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.dictionaries(st.integers(-3, 12), st.integers(-3, 3), max_size=4), min_size=1, max_size=4))
def test_plog_inverts_pe(parts):
    prec = 30
    f = [LSeries.zero(prec)] + [LSeries({e: Fraction(c) for e, c in p.items() if c}, prec) for p in parts]
    g = pe(f)
    back = plog(g)
    for a, b in zip(f, back):
        assert a == b


def test_pe_rejects_constant_component():
    with pytest.raises(ValueError):
        pe([LSeries({0: Fraction(1)}, 5)])
    with pytest.raises(ValueError):
        plog([LSeries.zero(5)])


def test_shift_round_trip():
    s = shifted([1, 2, 3], 5, 20)
    assert s.coefficient(-5) == -1
    assert unshift(s, 5) == LSeries.from_q_poly([1, 2, 3], 20)
    assert geometric_q(6).coeffs == {0: 1, 2: 1, 4: 1, 6: 1}


def test_stack_series_degree_one():
    out = stack_series({1: [1, 1, 1]}, 1, 1, 8)
    assert out[1] == _expand((1 + q + q ** 2) / (1 - q), 8)


def test_stack_series_degree_two():
    out = stack_series({1: [1, 1, 1], 2: [1] * 6}, 1, 2, 12)
    A = 1 + q + 2 * q ** 2 + 2 * q ** 3 + 3 * q ** 4 + q ** 5 - q ** 7
    assert out[2] == _expand(A / ((1 - q) * (1 - q ** 2)), 12)
    assert out[2][:10] == [1, 2, 5, 8, 14, 18, 24, 27, 33, 36]


def test_structural_examples():
    E1 = stack_series({1: [1, 1, 1]}, 1, 1, 6)[1]
    assert structural_decompose(E1, 1, 1) == [1, 1, 1]
    E2 = stack_series({1: [1, 1, 1], 2: [1] * 6}, 1, 2, 12)[2]
    assert structural_decompose(E2, 2, 2) == [1, 1, 2, 2, 3, 1, 0, -1]
    with pytest.raises(ValueError):
        structural_decompose(E2[:5], 2, 2)
    with pytest.raises(ValueError):
        structural_decompose([1, 2, 4, 4, 4, 4], 1, 1)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=6), st.lists(st.integers(1, 4), max_size=3))
def test_series_from_rational(num, dens):
    expr = sum(c * q ** i for i, c in enumerate(num))
    for j in dens:
        expr = expr / (1 - q ** j)
    assert series_from_rational(num, dens, 10) == _expand(expr, 10)
