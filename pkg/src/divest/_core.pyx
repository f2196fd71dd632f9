# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled product-kernel summation.

Same contract as ``divest._fallback.kde_sum``.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline Py_ssize_t _left(const double[:, ::1] xs, double v, Py_ssize_t n) nogil:
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if xs[mid, 0] <= v:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline Py_ssize_t _left_strict(const double[:, ::1] xs, double v, Py_ssize_t n) nogil:
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if xs[mid, 0] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo


def kde_sum(samples, queries, coeffs, double h):
    cdef const double[:, ::1] xs = np.ascontiguousarray(samples, dtype=np.float64)
    cdef const double[:, ::1] qs = np.ascontiguousarray(queries, dtype=np.float64)
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef Py_ssize_t n = xs.shape[0], d = xs.shape[1], nq = qs.shape[0]
    cdef Py_ssize_t deg = c.shape[0] - 1
    if qs.shape[1] != d:
        raise ValueError("queries and samples differ in dimension")
    out_arr = np.zeros(nq, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t q, i, j, r, start, stop
    cdef double inv_h = 1.0 / h, acc, prod, u, kv
    with nogil:
        for q in range(nq):
            # samples with |x0 - X0| < h
            start = _left(xs, qs[q, 0] - h, n)
            stop = _left_strict(xs, qs[q, 0] + h, n)
            acc = 0.0
            for i in range(start, stop):
                prod = 1.0
                for j in range(d):
                    u = (qs[q, j] - xs[i, j]) * inv_h
                    if u <= -1.0 or u >= 1.0:
                        prod = 0.0
                        break
                    kv = c[deg]
                    for r in range(deg - 1, -1, -1):
                        kv = kv * u + c[r]
                    prod *= kv
                acc += prod
            out[q] = acc
    return out_arr
