# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled dense-tableau simplex loop (Bland's rule).

Arithmetic mirrors ``_kernel_py`` operation for operation so both kernels
produce identical pivot sequences and bit-identical tableaux.
"""

from libc.stdint cimport int64_t
from libc.math cimport INFINITY

cdef enum:
    C_OPTIMAL = 0
    C_UNBOUNDED = 1
    C_ITERATION_LIMIT = 2

OPTIMAL = C_OPTIMAL
UNBOUNDED = C_UNBOUNDED
ITERATION_LIMIT = C_ITERATION_LIMIT


cdef void _pivot(double[:, ::1] T, int64_t[::1] basis, Py_ssize_t r, Py_ssize_t c) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef Py_ssize_t nr = T.shape[0]
    cdef Py_ssize_t nc = T.shape[1]
    cdef double p = T[r, c]
    cdef double f
    for j in range(nc):
        T[r, j] = T[r, j] / p
    for i in range(nr):
        if i == r:
            continue
        f = T[i, c]
        if f != 0.0:
            for j in range(nc):
                T[i, j] = T[i, j] - f * T[r, j]
    basis[r] = c


def pivot(double[:, ::1] T, int64_t[::1] basis, Py_ssize_t row, Py_ssize_t col):
    """Pivot the tableau in place on ``(row, col)``."""
    with nogil:
        _pivot(T, basis, row, col)


def simplex_loop(double[:, ::1] T, int64_t[::1] basis, Py_ssize_t n_enter,
                 double tol, Py_ssize_t max_iter):
    """Run Bland's-rule primal simplex pivots until no column improves.

    The last row of ``T`` holds reduced costs, the last column the basic
    values. Only columns ``< n_enter`` may enter. Returns
    ``(status, iterations, entering_column)``.
    """
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t rhs = T.shape[1] - 1
    cdef Py_ssize_t it = 0, i, j, col = -1, row
    cdef int status = C_OPTIMAL
    cdef double a, v, ratio, theta
    cdef int64_t best
    with nogil:
        while True:
            col = -1
            for j in range(n_enter):
                if T[m, j] < -tol:
                    col = j
                    break
            if col < 0:
                status = C_OPTIMAL
                break
            if it >= max_iter:
                status = C_ITERATION_LIMIT
                break
            theta = INFINITY
            for i in range(m):
                a = T[i, col]
                if a > tol:
                    v = T[i, rhs]
                    if v < 0.0:
                        v = 0.0
                    ratio = v / a
                    if ratio < theta:
                        theta = ratio
            if theta == INFINITY:
                status = C_UNBOUNDED
                break
            row = -1
            best = -1
            for i in range(m):
                a = T[i, col]
                if a > tol:
                    v = T[i, rhs]
                    if v < 0.0:
                        v = 0.0
                    ratio = v / a
                    if ratio <= theta + tol and (row < 0 or basis[i] < best):
                        row = i
                        best = basis[i]
            _pivot(T, basis, row, col)
            it += 1
    return status, it, col
