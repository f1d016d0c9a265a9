from __future__ import annotations

from fractions import Fraction

import pytest
import sympy

from tautring import filtrations as F
from tautring.descendent import SPACE
from tautring.poly import C_TABLE
from tautring.graded import GradedIdeal

q, t = sympy.symbols("q t")


@pytest.fixture(scope="module")
def omegas(rings):
    return {d: F.omega(d, F.perverse_filtration(rings.space(d))) for d in (1, 2, 3)}


@pytest.mark.parametrize("b", [1, 2, 3, 5])
def test_oracles(b):
    I, h = F.oracle_identity(b)
    assert F.perverse_filtration(ideal=I, xi=h, b=b, top=b).bigraded() == {(0, 2 * D): 1 for D in range(b + 1)}
    I, h = F.oracle_product(b)
    tab = F.perverse_filtration(ideal=I, xi=h, b=b, top=b + 1)
    assert tab.bigraded() == {(i, j): 1 for i in (0, 2) for j in range(0, 2 * b + 1, 2)}
    F.run_calibration()


def test_oracle_detects_wrong_base_dimension():
    I, h = F.oracle_identity(2)
    tab = F.perverse_filtration(ideal=I, xi=h, b=3, top=2, calibrate=False)
    assert tab.bigraded() != {(0, 2 * D): 1 for D in range(3)}


def test_omega_low_degree(omegas):
    assert omegas[1] == {(0, -2): 1, (0, 0): 1, (0, 2): 1}
    assert F.gv_extract(omegas[1]) == {(Fraction(0), Fraction(1)): 1}
    assert F.maulik_toda(omegas[1]) == {0: 3}


def test_gv_literature_values(omegas):
    # classical genus 0/1 invariants of local P^2
    assert F.maulik_toda(omegas[2]) == {0: -6}
    assert F.maulik_toda(omegas[3]) == {0: 27, 1: -10}
    assert F.gv_extract(omegas[2]) == {(Fraction(0), Fraction(5, 2)): 1}
    assert F.gv_extract(omegas[3]) == {(Fraction(1, 2), Fraction(9, 2)): 1, (Fraction(0), Fraction(3)): 1}


def test_symmetry_and_reconstruction(omegas):
    for om in omegas.values():
        assert F.is_symmetric(om)
        assert F.gv_reconstruct(F.gv_extract(om)) == om
    with pytest.raises(ValueError):
        F.gv_extract({(1, 0): 1})


def test_gvpt_first_order(omegas):
    rhs = F.gvpt_rhs(omegas, 1, 6)
    om1 = sum(v * q ** a * t ** c for (a, c), v in omegas[1].items())
    closed = sympy.series(-q * om1 / ((1 - q * t) * (1 - q / t)), q, 0, 7).removeO()
    want = {}
    for term in sympy.Add.make_args(sympy.expand(closed)):
        c, mon = term.as_coeff_Mul()
        a = sympy.degree(mon, q)
        e = sympy.Poly(mon * t ** 20, t).degree() - 20
        want[(int(a), int(e))] = want.get((int(a), int(e)), 0) + Fraction(int(c))
    assert rhs[1].coeffs == {k: v for k, v in want.items() if v}


def test_gvpt_t1_matches_mt(omegas):
    rhs = F.gvpt_rhs(omegas, 3, 6)
    mt = {d: F.maulik_toda(omegas[d]) for d in (1, 2, 3)}
    t1 = F.gvpt_t1_from_mt(mt, 3, 6)
    for d in (1, 2, 3):
        assert rhs[d].at_t1() == t1[d]


def test_pt_file_round_trip(omegas, tmp_path):
    rhs = F.gvpt_rhs(omegas, 2, 4)
    lines = []
    for d in (1, 2):
        for n in range(0, 5):
            poly = {}
            for (a, b), v in rhs[d].coeffs.items():
                if a == n:
                    poly[b] = poly.get(b, 0) + int(v)
            if poly:
                lines.append(f"{d} {n} : " + " ".join(f"{e}/{c}" for e, c in sorted(poly.items()) if c))
    path = tmp_path / "pt.txt"
    path.write_text("# Q-degree q-degree : t-exponent/coefficient\n" + "\n".join(lines) + "\n")
    pt = F.read_pt_file(str(path))
    assert F.compare_pt(rhs, pt) is None
    bad = dict(pt)
    key = sorted(bad)[-1]
    bad[key] = {e: c + 1 for e, c in bad[key].items()}
    assert F.compare_pt(rhs, bad)[:2] == key


@pytest.mark.parametrize("d,chi", [(1, 0), (2, 1), (3, 1), (3, 2)])
def test_p_equals_c(rings, d, chi):
    v = F.pc_check(rings.space(d, chi))
    assert v.ok, v.first_violation


def test_chern_table_independent_of_chi(rings):
    a = F.chern_filtration(rings.space(3, 1)).gr_table()
    b = F.chern_filtration(rings.space(3, 2)).gr_table()
    assert a == b


def test_vanishing_window(rings):
    for d in (1, 2, 3):
        assert all(F.vanishing_window_check(rings.space(d)).values())


def test_stacky_p_equals_c(rings, omegas):
    for d, dmax in ((1, 6), (2, 10)):
        ok, want, got = F.stack_pc_check(rings.stack(d, dmax), omegas, dmax)
        assert ok, (want, got)


def test_chern_filtration_of_free_example():
    act = [C_TABLE.index["c1(1)"], C_TABLE.index["c2(0)"]]
    I = GradedIdeal.from_generators(C_TABLE, [], 2, act)
    tab = F.chern_filtration(ideal=I, top=2)
    # c1(1) has chern weight 1 and c2(0) weight 2
    assert tab.gr(1, 1) == 1 and tab.gr(2, 1) == 1
    assert [tab.gr(k, 2) for k in range(5)] == [0, 0, 1, 1, 1]
