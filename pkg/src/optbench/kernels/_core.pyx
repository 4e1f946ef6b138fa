# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel core: CSR matmul, decision-tree traversal, direct conv2d."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "compiled"


def csr_from_dense(cnp.ndarray[cnp.float64_t, ndim=2] x):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1]
    cdef Py_ssize_t i, j, k = 0
    cdef cnp.ndarray[cnp.int64_t, ndim=1] indptr = np.zeros(n + 1, dtype=np.int64)
    cdef Py_ssize_t nnz = 0
    for i in range(n):
        for j in range(d):
            if x[i, j] != 0.0:
                nnz += 1
        indptr[i + 1] = nnz
    cdef cnp.ndarray[cnp.float64_t, ndim=1] data = np.empty(nnz, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cols = np.empty(nnz, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] rows = np.empty(nnz, dtype=np.int64)
    for i in range(n):
        for j in range(d):
            if x[i, j] != 0.0:
                data[k] = x[i, j]
                cols[k] = j
                rows[k] = i
                k += 1
    return data, cols, indptr, rows


def csr_matmul(cnp.ndarray[cnp.float64_t, ndim=2] x,
               cnp.ndarray[cnp.float64_t, ndim=2] w):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1], m = w.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((n, m), dtype=np.float64)
    cdef Py_ssize_t i, j, k
    cdef double v
    for i in range(n):
        for k in range(d):
            v = x[i, k]
            if v != 0.0:
                for j in range(m):
                    out[i, j] += v * w[k, j]
    return out


def dense_matmul(cnp.ndarray[cnp.float64_t, ndim=2] x,
                 cnp.ndarray[cnp.float64_t, ndim=2] w):
    # BLAS already wins for dense; kept so both backends expose one surface.
    return x @ w


def tree_predict(cnp.ndarray[cnp.float64_t, ndim=2] x,
                 cnp.ndarray[cnp.int64_t, ndim=1] feature,
                 cnp.ndarray[cnp.float64_t, ndim=1] threshold,
                 cnp.ndarray[cnp.int64_t, ndim=1] left,
                 cnp.ndarray[cnp.int64_t, ndim=1] right,
                 cnp.ndarray[cnp.float64_t, ndim=1] value):
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i
    cdef long node, f
    for i in range(n):
        node = 0
        f = feature[node]
        while f >= 0:
            if x[i, f] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
            f = feature[node]
        out[i] = value[node]
    return out


def conv2d(cnp.ndarray[cnp.float64_t, ndim=3] images,
           cnp.ndarray[cnp.float64_t, ndim=3] filters):
    cdef Py_ssize_t n = images.shape[0], h = images.shape[1], w = images.shape[2]
    cdef Py_ssize_t f = filters.shape[0], fh = filters.shape[1], fw = filters.shape[2]
    cdef Py_ssize_t oh = h - fh + 1, ow = w - fw + 1
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((n, f * oh * ow), dtype=np.float64)
    cdef Py_ssize_t i, q, y, x_, a, b
    cdef double acc
    for i in range(n):
        for q in range(f):
            for y in range(oh):
                for x_ in range(ow):
                    acc = 0.0
                    for a in range(fh):
                        for b in range(fw):
                            acc += images[i, y + a, x_ + b] * filters[q, a, b]
                    out[i, q * oh * ow + y * ow + x_] = acc
    return out
