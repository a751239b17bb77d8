# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: tridiagonal LDL^T factor/solve and the theta-scheme march."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def ldl_factor(diag, off):
    cdef const double[::1] a = np.ascontiguousarray(diag, dtype=np.float64)
    cdef const double[::1] b = np.ascontiguousarray(off, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i
    d_arr = np.empty(n)
    l_arr = np.empty(max(n - 1, 0))
    cdef double[::1] d = d_arr
    cdef double[::1] l = l_arr
    d[0] = a[0]
    if not d[0] > 0.0:
        raise ZeroDivisionError("non-positive pivot at row 0")
    for i in range(1, n):
        l[i - 1] = b[i - 1] / d[i - 1]
        d[i] = a[i] - l[i - 1] * b[i - 1]
        if not d[i] > 0.0:
            raise ZeroDivisionError("non-positive pivot at row %d" % i)
    return d_arr, l_arr


cdef void _solve_inplace(const double[::1] d, const double[::1] l,
                         double* x, Py_ssize_t stride) noexcept nogil:
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t i
    for i in range(1, n):
        x[i * stride] -= l[i - 1] * x[(i - 1) * stride]
    for i in range(n):
        x[i * stride] /= d[i]
    for i in range(n - 2, -1, -1):
        x[i * stride] -= l[i] * x[(i + 1) * stride]


def ldl_solve(d, l, rhs):
    cdef const double[::1] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef const double[::1] lv = np.ascontiguousarray(l, dtype=np.float64)
    x_arr = np.array(rhs, dtype=np.float64, order="C", copy=True)
    cdef double[::1] x1
    cdef double[:, ::1] x2
    cdef Py_ssize_t j, m
    if x_arr.ndim == 1:
        x1 = x_arr
        with nogil:
            _solve_inplace(dv, lv, &x1[0], 1)
    else:
        x2 = x_arr
        m = x2.shape[1]
        with nogil:
            for j in range(m):
                _solve_inplace(dv, lv, &x2[0, j], m)
    return x_arr


def tridiag_matvec(diag, off, x):
    diag_arr = np.ascontiguousarray(diag, dtype=np.float64)
    off_arr = np.ascontiguousarray(off, dtype=np.float64)
    xa = np.ascontiguousarray(x, dtype=np.float64)
    if xa.ndim != 1:
        # column blocks: numpy broadcasting is already memory-bound here
        y2 = diag_arr[:, None] * xa
        if off_arr.shape[0]:
            y2[:-1] += off_arr[:, None] * xa[1:]
            y2[1:] += off_arr[:, None] * xa[:-1]
        return y2
    cdef const double[::1] a = diag_arr
    cdef const double[::1] b = off_arr
    cdef const double[::1] xv = xa
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i
    y_arr = np.empty(n)
    cdef double[::1] y = y_arr
    with nogil:
        _matvec(a, b, &xv[0], &y[0])
    return y_arr


cdef void _matvec(const double[::1] a, const double[::1] b,
                  const double* x, double* y) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i
    for i in range(n):
        y[i] = a[i] * x[i]
    for i in range(n - 1):
        y[i] += b[i] * x[i + 1]
        y[i + 1] += b[i] * x[i]


def heat_march(d, l, b_diag, b_off, u0, source, out):
    cdef const double[::1] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef const double[::1] lv = np.ascontiguousarray(l, dtype=np.float64)
    cdef const double[::1] a = np.ascontiguousarray(b_diag, dtype=np.float64)
    cdef const double[::1] b = np.ascontiguousarray(b_off, dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef const double[:, ::1] s
    cdef bint has_source = source is not None
    if has_source:
        s = np.ascontiguousarray(source, dtype=np.float64)
    cdef Py_ssize_t steps = o.shape[0] - 1
    cdef Py_ssize_t n = o.shape[1]
    cdef Py_ssize_t k, i
    out[0] = u0
    with nogil:
        for k in range(steps):
            _matvec(a, b, &o[k, 0], &o[k + 1, 0])
            if has_source:
                for i in range(n):
                    o[k + 1, i] += s[k, i]
            _solve_inplace(dv, lv, &o[k + 1, 0], 1)
    return out
