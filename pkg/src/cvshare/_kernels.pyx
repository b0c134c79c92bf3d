# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sampling and accumulation kernels.

Standard-normal draws are taken from the generator's underlying bit
stream in the same order numpy's ``Generator.standard_normal`` fills a
C-ordered (n, d) array, so the pure numpy backend consumes an identical
stream and produces the same outcomes up to floating-point summation
order.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport random_standard_normal

cnp.import_array()

BACKEND = "compiled"

cdef const char *CAPSULE_NAME = "BitGenerator"


cdef bitgen_t *_bitgen(object bit_generator) except NULL:
    return <bitgen_t *> PyCapsule_GetPointer(bit_generator.capsule, CAPSULE_NAME)


def standard_normal_matrix(object gen, Py_ssize_t n_rows, Py_ssize_t n_cols):
    """Draw an (n_rows, n_cols) matrix of standard normals."""
    cdef object bg = gen.bit_generator
    cdef bitgen_t *rng = _bitgen(bg)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n_rows, n_cols), dtype=np.float64)
    cdef Py_ssize_t i, j
    with bg.lock:
        for i in range(n_rows):
            for j in range(n_cols):
                out[i, j] = random_standard_normal(rng)
    return out


def mvn_sample(object gen, cnp.ndarray[cnp.float64_t, ndim=1] mean,
               cnp.ndarray[cnp.float64_t, ndim=2] chol, Py_ssize_t n_shots):
    """Sample n_shots rows from N(mean, chol @ chol.T).

    Fuses the normal draw with the Cholesky transform so no (n, d)
    scratch matrix is materialized.
    """
    cdef Py_ssize_t d = mean.shape[0]
    if chol.shape[0] != d or chol.shape[1] != d:
        raise ValueError("chol must be d x d for a length-d mean")
    cdef object bg = gen.bit_generator
    cdef bitgen_t *rng = _bitgen(bg)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n_shots, d), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] z = np.empty(d, dtype=np.float64)
    cdef double acc
    cdef Py_ssize_t i, j, k
    with bg.lock:
        for i in range(n_shots):
            for j in range(d):
                z[j] = random_standard_normal(rng)
            for j in range(d):
                acc = mean[j]
                for k in range(j + 1):  # chol is lower triangular
                    acc += chol[j, k] * z[k]
                out[i, j] = acc
    return out


def linear_mse_batches(cnp.ndarray[cnp.float64_t, ndim=2] outcomes,
                       cnp.ndarray[cnp.float64_t, ndim=1] weights,
                       cnp.ndarray[cnp.float64_t, ndim=1] truths,
                       Py_ssize_t n_batches):
    """Per-batch mean squared error of a linear estimator.

    Rows of ``outcomes`` are grouped into n_batches equal consecutive
    batches; returns, per batch, mean((outcomes @ weights - truths)^2).
    """
    cdef Py_ssize_t n = outcomes.shape[0]
    cdef Py_ssize_t d = outcomes.shape[1]
    if weights.shape[0] != d:
        raise ValueError("weights length must match outcome columns")
    if truths.shape[0] != n:
        raise ValueError("truths length must match outcome rows")
    if n_batches < 1 or n % n_batches != 0:
        raise ValueError("row count must divide evenly into n_batches")
    cdef Py_ssize_t m = n // n_batches
    cdef cnp.ndarray[cnp.float64_t, ndim=1] res = np.empty(n_batches, dtype=np.float64)
    cdef double acc, err
    cdef Py_ssize_t b, i, k, row
    for b in range(n_batches):
        acc = 0.0
        for i in range(m):
            row = b * m + i
            err = -truths[row]
            for k in range(d):
                err += outcomes[row, k] * weights[k]
            acc += err * err
        res[b] = acc / m
    return res
