# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled step kernels; same contracts as ``_kernels_py``."""

import numpy as np


def apply_float(const Py_ssize_t[::1] colptr, const Py_ssize_t[::1] rows,
                const double[::1] vals, const double[::1] v):
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t j, p
    cdef double x
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] o = out
    for j in range(n):
        x = v[j]
        if x == 0.0:
            continue
        for p in range(colptr[j], colptr[j + 1]):
            o[rows[p]] += vals[p] * x
    return out


def apply_exact(const Py_ssize_t[::1] colptr, const Py_ssize_t[::1] rows,
                const signed char[::1] kind, list oa, list ob, list a, list b):
    cdef Py_ssize_t n = len(a)
    cdef Py_ssize_t j, p, r
    cdef signed char t
    cdef list na = [0] * n
    cdef list nb = [0] * n
    cdef object x, y, ca, cb
    for j in range(n):
        x = a[j]
        y = b[j]
        if not x and not y:
            continue
        for p in range(colptr[j], colptr[j + 1]):
            r = rows[p]
            t = kind[p]
            if t == 0:
                ca = oa[p]
                na[r] = na[r] + ca * x
                nb[r] = nb[r] + ca * y
            elif t == 1:
                cb = ob[p]
                na[r] = na[r] + 2 * cb * y
                nb[r] = nb[r] + cb * x
            else:
                ca = oa[p]
                cb = ob[p]
                na[r] = na[r] + ca * x + 2 * cb * y
                nb[r] = nb[r] + ca * y + cb * x
    return na, nb
