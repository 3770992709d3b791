# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled weighted least-squares scan kernel (see _gls_numpy for the contract)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def weighted_scan(counts, weights, model):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] c = np.ascontiguousarray(counts, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] m = np.ascontiguousarray(model, dtype=np.float64)
    if c.shape[0] != w.shape[0] or c.shape[0] != m.shape[1]:
        raise ValueError("shape mismatch between counts, weights and model")

    cdef Py_ssize_t J = m.shape[0]
    cdef Py_ssize_t K = m.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(J, dtype=np.float64)
    cdef Py_ssize_t j, k
    cdef double acc, r
    for j in range(J):
        acc = 0.0
        for k in range(K):
            r = c[k] - m[j, k]
            acc += w[k] * r * r
        out[j] = acc
    return out
