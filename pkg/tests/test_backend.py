from __future__ import annotations

import os
import subprocess
import sys

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from tautring import _kernel_py, kernel

ck = pytest.importorskip("tautring._ckernel")

vecs = st.dictionaries(st.integers(0, 60), st.builds(mpq, st.integers(-9, 9), st.integers(1, 5)), max_size=12)


def _clean(v):
    return {k: c for k, c in v.items() if c}


@settings(max_examples=60, deadline=None)
@given(vecs, vecs, st.integers(-4, 4))
def test_axpy_and_mul_agree(a, b, c):
    a, b = _clean(a), _clean(b)
    x, y = dict(a), dict(a)
    ck.axpy(x, mpq(c, 3), b)
    _kernel_py.axpy(y, mpq(c, 3), b)
    assert x == y
    assert ck.poly_mul(a, b) == _kernel_py.poly_mul(a, b)
    assert ck.combine([(mpq(2), a), (mpq(-1), b)]) == _kernel_py.combine([(mpq(2), a), (mpq(-1), b)])


@settings(max_examples=40, deadline=None)
@given(st.lists(vecs, max_size=8), vecs)
def test_elimination_agrees(rows, probe):
    pc, pp = {}, {}
    for r in rows:
        r = _clean(r)
        assert ck.insert_row(dict(r), pc) == _kernel_py.insert_row(dict(r), pp)
    assert pc == pp
    probe = _clean(probe)
    assert ck.reduce_row(dict(probe), pc) == _kernel_py.reduce_row(dict(probe), pp)


def test_selection_respects_environment():
    env = dict(os.environ, TAUTRING_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from tautring import kernel; print(kernel.BACKEND)"],
                         capture_output=True, text=True, env=env)
    assert out.stdout.strip() == "python"
    assert kernel.BACKEND in ("cython", "python")


def test_same_ring_under_both_backends():
    code = ("from tautring import pipeline; from tautring.descendent import ToppType, STACK;"
            "p = pipeline.ensure_ring(pipeline.RingRegistry(), ToppType(2, 0), STACK, 10);"
            "print(p.hilbert_function(), p.trimmed())")
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, TAUTRING_PURE_PYTHON=flag)
        outs.append(subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env).stdout)
    assert outs[0] == outs[1] and outs[0]
