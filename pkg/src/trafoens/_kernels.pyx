# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Semantics mirror ``_kernels_py`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, INFINITY

cnp.import_array()


def rps_rows(const double[:, ::1] F, const long long[::1] y):
    cdef Py_ssize_t n = F.shape[0], K = F.shape[1], i, k
    cdef double acc, d
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] res = out
    for i in range(n):
        acc = 0.0
        for k in range(K - 1):
            d = F[i, k] - (1.0 if y[i] <= k else 0.0)
            acc += d * d
        res[i] = acc / (K - 1)
    return out


def binary_regret_scan(double avg_fail, double avg_success, Py_ssize_t count, double rho):
    """Minimize max NLL-regret over p in {rho, 2 rho, ..., count * rho}."""
    cdef Py_ssize_t j, best = -1
    cdef double p, r1, r0, r, best_val = INFINITY
    for j in range(count):
        p = (j + 1) * rho
        r1 = -log(p) - avg_success
        r0 = -log(1.0 - p) - avg_fail
        r = r1 if r1 > r0 else r0
        if r < best_val:
            best_val = r
            best = j
    return best, best_val


def rps3_regret_scan(const double[::1] avg, Py_ssize_t n_steps):
    """Minimize max RPS-regret over CDFs (i/n, j/n, 1) with i <= j."""
    cdef Py_ssize_t i, j, bi = -1, bj = -1
    cdef double f1, f2, a, b, r0, r1, r2, r, best_val = INFINITY
    for i in range(n_steps + 1):
        f1 = <double>i / n_steps
        for j in range(i, n_steps + 1):
            f2 = <double>j / n_steps
            a = f1 - 1.0
            b = f2 - 1.0
            r0 = 0.5 * (a * a + b * b) - avg[0]
            r1 = 0.5 * (f1 * f1 + b * b) - avg[1]
            r2 = 0.5 * (f1 * f1 + f2 * f2) - avg[2]
            r = r0
            if r1 > r:
                r = r1
            if r2 > r:
                r = r2
            if r < best_val:
                best_val = r
                bi = i
                bj = j
    return bi, bj, best_val
