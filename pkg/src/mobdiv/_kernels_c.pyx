# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled trial kernel. Same draw layout as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, cos, sqrt, fabs, INFINITY
from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double TWO_PI = 6.283185307179586
cdef double TWO_M53 = 1.1102230246251565e-16


cdef inline uint64_t mix(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double uniform(uint64_t tkey, uint64_t lane, uint64_t idx) noexcept nogil:
    cdef uint64_t h = mix(tkey ^ mix((lane << 40) + idx))
    return (<double>(h >> 11) + 0.5) * TWO_M53


cdef inline double normal(uint64_t tkey, uint64_t lane, uint64_t idx) noexcept nogil:
    cdef double u1 = uniform(tkey, lane, 2 * idx)
    cdef double u2 = uniform(tkey, lane, 2 * idx + 1)
    return sqrt(-2.0 * log(u1)) * cos(TWO_PI * u2)


cdef inline int64_t invert_count(double u, const double[::1] cdf) noexcept nogil:
    # number of entries <= u (cdf is nondecreasing)
    cdef int64_t lo = 0, hi = cdf.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if cdf[mid] <= u:
            lo = mid + 1
        else:
            hi = mid
    return lo


def min_gaps(uint64_t key, int64_t start, int64_t stop, times, double sigma0,
             double sigma_sink, double drift, double D, double h, cdf):
    cdef const double[::1] t = np.ascontiguousarray(times, dtype=np.float64)
    cdef const double[::1] table = np.ascontiguousarray(cdf, dtype=np.float64)
    cdef Py_ssize_t n = t.shape[0]
    out_arr = np.empty((stop - start, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double half = D - h
    cdef double *scale = <double *> malloc(n * sizeof(double))
    cdef double *shift = <double *> malloc(n * sizeof(double))
    cdef double *sensor = <double *> malloc(n * sizeof(double))
    if scale == NULL or shift == NULL or sensor == NULL:
        free(scale); free(shift); free(sensor)
        raise MemoryError()

    cdef Py_ssize_t k
    cdef int64_t trial, j, m
    cdef uint64_t tkey
    cdef double prev = 0.0, acc, v, y0, y, gap
    for k in range(n):
        scale[k] = sqrt(t[k] - prev)
        shift[k] = drift * t[k]
        prev = t[k]

    with nogil:
        for trial in range(start, stop):
            tkey = mix(<uint64_t> key + (<uint64_t> trial) * GOLDEN)
            acc = 0.0
            for k in range(n):
                acc = acc + normal(tkey, 2, k) * (sigma0 * scale[k])
                sensor[k] = shift[k] + acc
                out[trial - start, k] = INFINITY
            m = invert_count(uniform(tkey, 0, 0), table)
            for j in range(m):
                v = uniform(tkey, 1, j) * (2.0 * half)
                if v < half:
                    y0 = v - D
                else:
                    y0 = h + (v - half)
                acc = 0.0
                for k in range(n):
                    acc = acc + normal(tkey, 3, j * n + k) * (sigma_sink * scale[k])
                    y = (y0 + shift[k]) + acc
                    gap = fabs(y - sensor[k])
                    if gap < out[trial - start, k]:
                        out[trial - start, k] = gap
    free(scale); free(shift); free(sensor)
    return out_arr
