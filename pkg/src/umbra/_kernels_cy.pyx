# cython: language_level=3
"""Compiled integer matrix kernels.

Same contract as ``_kernels_py``: inputs are sequences of row sequences
of Python ints (arbitrary precision), outputs are fresh lists.  The win
over the pure version comes from typed index loops; the arithmetic
itself stays on PyLong objects so nothing overflows.
"""

from math import gcd

BACKEND = "cython"


def imat_mul(a, b):
    """Product of integer matrices, (n x k) @ (k x m)."""
    cdef Py_ssize_t n = len(a)
    cdef Py_ssize_t k = len(b)
    cdef Py_ssize_t m = len(b[0]) if k else 0
    cdef Py_ssize_t i, j, t
    cdef list cols = [list(zcol) for zcol in zip(*b)]
    cdef list out = []
    cdef list row, col, orow
    for i in range(n):
        row = list(a[i])
        orow = []
        for j in range(m):
            col = <list> cols[j]
            acc = 0
            for t in range(k):
                acc = acc + row[t] * col[t]
            orow.append(acc)
        out.append(orow)
    return out


def imat_vec(a, v):
    """Matrix times column vector."""
    cdef Py_ssize_t n = len(a)
    cdef Py_ssize_t k = len(v)
    cdef Py_ssize_t i, t
    cdef list vv = list(v)
    cdef list out = []
    cdef list row
    for i in range(n):
        row = list(a[i])
        acc = 0
        for t in range(k):
            acc = acc + row[t] * vv[t]
        out.append(acc)
    return out


def ivec_mat(v, a):
    """Row vector times matrix."""
    cdef Py_ssize_t n = len(a)
    cdef Py_ssize_t i, t
    cdef list vv = list(v)
    cdef list cols = [list(zcol) for zcol in zip(*a)]
    cdef Py_ssize_t m = len(cols)
    cdef list out = []
    cdef list col
    for i in range(m):
        col = <list> cols[i]
        acc = 0
        for t in range(n):
            acc = acc + vv[t] * col[t]
        out.append(acc)
    return out


def imat_comb(a, b, ca, cb):
    """Entrywise ca*a + cb*b."""
    cdef Py_ssize_t n = len(a)
    cdef Py_ssize_t m = len(a[0]) if n else 0
    cdef Py_ssize_t i, j
    cdef list out = []
    cdef list ra, rb, orow
    for i in range(n):
        ra = list(a[i])
        rb = list(b[i])
        orow = []
        for j in range(m):
            orow.append(ca * ra[j] + cb * rb[j])
        out.append(orow)
    return out


def imat_div(a, g):
    """Entrywise exact division by a positive int."""
    cdef Py_ssize_t n = len(a)
    cdef Py_ssize_t m = len(a[0]) if n else 0
    cdef Py_ssize_t i, j
    cdef list out = []
    cdef list row, orow
    for i in range(n):
        row = list(a[i])
        orow = []
        for j in range(m):
            orow.append(row[j] // g)
        out.append(orow)
    return out


def iseq_gcd(rows, seed):
    """gcd of ``seed`` and every matrix entry; early exit at 1."""
    g = abs(seed)
    cdef Py_ssize_t i, j, n, m
    n = len(rows)
    cdef list row
    for i in range(n):
        row = list(rows[i])
        m = len(row)
        for j in range(m):
            x = row[j]
            if x:
                g = gcd(g, x)
                if g == 1:
                    return 1
    return g
