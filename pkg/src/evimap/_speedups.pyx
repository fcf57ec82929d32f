# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the stress-majorization inner loops.

Same contract as evimap._kernels_py; selected at import by evimap.kernels.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def layout_distances(cnp.ndarray[cnp.float64_t, ndim=2] x):
    """Pairwise Euclidean distances between layout rows."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t p = x.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((n, n), dtype=np.float64)
    cdef Py_ssize_t i, j, c
    cdef double acc, diff
    for i in range(n):
        for j in range(i + 1, n):
            acc = 0.0
            for c in range(p):
                diff = x[i, c] - x[j, c]
                acc += diff * diff
            acc = sqrt(acc)
            out[i, j] = acc
            out[j, i] = acc
    return out


def squared_residual(cnp.ndarray[cnp.float64_t, ndim=2] d,
                     cnp.ndarray[cnp.float64_t, ndim=2] delta):
    """Sum over unordered pairs of (d_ij - delta_ij)^2."""
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t i, j
    cdef double acc = 0.0, r
    for i in range(n):
        for j in range(i + 1, n):
            r = d[i, j] - delta[i, j]
            acc += r * r
    return acc


def guttman_step(cnp.ndarray[cnp.float64_t, ndim=2] d,
                 cnp.ndarray[cnp.float64_t, ndim=2] x):
    """One Guttman transform update of the layout (unit weights).

    x_new[i] = (1/n) * sum_{j != i, delta_ij > 0} (d_ij / delta_ij) * (x[i] - x[j])

    Coincident pairs contribute nothing, the standard majorization
    convention for the undefined ratio.
    """
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t p = x.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((n, p), dtype=np.float64)
    cdef Py_ssize_t i, j, c
    cdef double acc, diff, w
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            acc = 0.0
            for c in range(p):
                diff = x[i, c] - x[j, c]
                acc += diff * diff
            acc = sqrt(acc)
            if acc > 0.0:
                w = d[i, j] / acc
                for c in range(p):
                    out[i, c] += w * (x[i, c] - x[j, c])
        for c in range(p):
            out[i, c] /= n
    return out
