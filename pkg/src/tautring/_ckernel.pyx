# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the sparse row kernels in ``_kernel_py``.

Same semantics; dictionary access goes through the C API and loops are
typed, while coefficient arithmetic stays on gmpy2 ``mpq`` objects.
"""

from cpython.dict cimport PyDict_GetItem, PyDict_SetItem, PyDict_DelItem, PyDict_Next
from cpython.object cimport PyObject


cpdef void axpy(dict acc, object c, dict vec):
    cdef Py_ssize_t pos = 0
    cdef PyObject* kp
    cdef PyObject* vp
    cdef PyObject* sp
    cdef object k, s
    while PyDict_Next(vec, &pos, &kp, &vp):
        k = <object>kp
        sp = PyDict_GetItem(acc, k)
        if sp is NULL:
            PyDict_SetItem(acc, k, c * <object>vp)
        else:
            s = <object>sp + c * <object>vp
            if s:
                PyDict_SetItem(acc, k, s)
            else:
                PyDict_DelItem(acc, k)


def combine(pairs):
    cdef dict acc = {}
    for c, vec in pairs:
        axpy(acc, c, vec)
    return acc


cpdef dict poly_mul(dict a, dict b):
    if len(a) > len(b):
        a, b = b, a
    cdef dict out = {}
    cdef Py_ssize_t pa = 0, pb
    cdef PyObject *ka
    cdef PyObject *va
    cdef PyObject *kb
    cdef PyObject *vb
    cdef PyObject *sp
    cdef object k, s, ca
    while PyDict_Next(a, &pa, &ka, &va):
        ca = <object>va
        pb = 0
        while PyDict_Next(b, &pb, &kb, &vb):
            k = <object>ka + <object>kb
            sp = PyDict_GetItem(out, k)
            if sp is NULL:
                PyDict_SetItem(out, k, ca * <object>vb)
            else:
                s = <object>sp + ca * <object>vb
                if s:
                    PyDict_SetItem(out, k, s)
                else:
                    PyDict_DelItem(out, k)
    return out


cpdef dict reduce_row(dict row, dict pivots):
    cdef list hits = [k for k in row if k in pivots]
    cdef object c, k, s, nc
    cdef dict piv
    cdef Py_ssize_t pos
    cdef PyObject *kp
    cdef PyObject *vp
    cdef PyObject *sp
    for k in hits:
        c = row.pop(k)
        nc = -c
        piv = <dict>pivots[k]
        pos = 0
        while PyDict_Next(piv, &pos, &kp, &vp):
            if <object>kp == k:
                continue
            sp = PyDict_GetItem(row, <object>kp)
            if sp is NULL:
                PyDict_SetItem(row, <object>kp, nc * <object>vp)
            else:
                s = <object>sp + nc * <object>vp
                if s:
                    PyDict_SetItem(row, <object>kp, s)
                else:
                    PyDict_DelItem(row, <object>kp)
    return row


cpdef object insert_row(dict row, dict pivots):
    reduce_row(row, pivots)
    if not row:
        return None
    lead = min(row)
    inv = 1 / row[lead]
    if inv != 1:
        for k in row:
            row[k] *= inv
    cdef dict piv
    for piv in pivots.values():
        c = piv.get(lead)
        if c is not None:
            axpy(piv, -c, row)
    pivots[lead] = row
    return lead
