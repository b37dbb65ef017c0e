# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: sparse tensor contraction and triangular substitution."""

import numpy as np
from libc.stdint cimport int64_t


def contract(const int64_t[:, ::1] idx, const double[::1] vals,
             const double[::1] x, Py_ssize_t n):
    cdef Py_ssize_t nnz = idx.shape[0], m = idx.shape[1]
    cdef Py_ssize_t e, c
    cdef double t
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] o = out
    for e in range(nnz):
        t = vals[e]
        for c in range(1, m):
            t *= x[idx[e, c]]
        o[idx[e, 0]] += t
    return out


def contract_matrix(const int64_t[:, ::1] idx, const double[::1] vals,
                    const double[::1] x, Py_ssize_t n):
    cdef Py_ssize_t nnz = idx.shape[0], m = idx.shape[1]
    cdef Py_ssize_t e, c
    cdef double t
    out = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    for e in range(nnz):
        t = vals[e]
        for c in range(2, m):
            t *= x[idx[e, c]]
        o[idx[e, 0], idx[e, 1]] += t
    return out


def forward_sub(const double[:, ::1] T, const double[::1] r, bint unit_diagonal=False):
    cdef Py_ssize_t n = T.shape[0], i, j
    cdef double s
    y = np.zeros(n, dtype=np.float64)
    cdef double[::1] yv = y
    for i in range(n):
        s = r[i]
        for j in range(i):
            s -= T[i, j] * yv[j]
        yv[i] = s if unit_diagonal else s / T[i, i]
    return y


def back_sub(const double[:, ::1] T, const double[::1] r):
    cdef Py_ssize_t n = T.shape[0], i, j
    cdef double s
    y = np.zeros(n, dtype=np.float64)
    cdef double[::1] yv = y
    for i in range(n - 1, -1, -1):
        s = r[i]
        for j in range(i + 1, n):
            s -= T[i, j] * yv[j]
        yv[i] = s / T[i, i]
    return y
