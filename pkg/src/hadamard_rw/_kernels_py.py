"""Reference (pure Python / NumPy) implementations of the step kernels.

Operators arrive in compressed-column form: entries of column ``j`` occupy
``colptr[j]:colptr[j+1]`` of ``rows`` and the value arrays. Exact entries are
``(oa + ob*sqrt2) / 2**kop`` with one shared ``kop``; ``kind`` caches which
numerator is zero (0: ``ob == 0``, 1: ``oa == 0``, 2: neither).
"""

import numpy as np


def apply_float(colptr, rows, vals, v):
    n = v.shape[0]
    cols = np.repeat(np.arange(n, dtype=np.intp), np.diff(colptr))
    return np.bincount(rows, weights=vals * v[cols], minlength=n).astype(np.float64)


def apply_exact(colptr, rows, kind, oa, ob, a, b):
    n = len(a)
    na = [0] * n
    nb = [0] * n
    for j in range(n):
        x = a[j]
        y = b[j]
        if not x and not y:
            continue
        for p in range(colptr[j], colptr[j + 1]):
            r = rows[p]
            t = kind[p]
            if t == 0:
                c = oa[p]
                na[r] += c * x
                nb[r] += c * y
            elif t == 1:
                c = ob[p]
                na[r] += 2 * c * y
                nb[r] += c * x
            else:
                ca = oa[p]
                cb = ob[p]
                na[r] += ca * x + 2 * cb * y
                nb[r] += ca * y + cb * x
    return na, nb
