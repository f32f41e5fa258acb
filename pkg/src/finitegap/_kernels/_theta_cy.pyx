# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled theta-series kernel (hot inner loop of every potential and
Floquet evaluation).  Mirrors theta_fallback exactly."""

import numpy as np

from libc.math cimport cos, sin, exp, M_PI

COMPILED = True


cdef inline double complex cexp_fast(double re, double im) nogil:
    cdef double r = exp(re)
    return r * cos(im) + 1j * (r * sin(im))


def theta_sums(double complex[::1] quad, double[:, ::1] lattice,
               double complex[::1] z, double complex[::1] d):
    cdef Py_ssize_t N = quad.shape[0]
    cdef Py_ssize_t g = lattice.shape[1]
    cdef Py_ssize_t i, k
    cdef double complex s0 = 0, s1 = 0, s2 = 0
    cdef double complex ip, fac, term, ex
    cdef double nk
    with nogil:
        for i in range(N):
            ip = 0
            fac = 0
            for k in range(g):
                nk = lattice[i, k]
                ip = ip + nk * z[k]
                fac = fac + nk * d[k]
            ip = quad[i] + 2j * M_PI * ip
            fac = 2j * M_PI * fac
            term = cexp_fast(ip.real, ip.imag)
            s0 = s0 + term
            s1 = s1 + fac * term
            s2 = s2 + fac * fac * term
    return s0, s1, s2


def theta_sums_batch(double complex[::1] quad, double[:, ::1] lattice,
                     double complex[:, ::1] Z, double complex[::1] d):
    cdef Py_ssize_t N = quad.shape[0]
    cdef Py_ssize_t g = lattice.shape[1]
    cdef Py_ssize_t M = Z.shape[0]
    cdef Py_ssize_t i, k, m
    out0 = np.empty(M, dtype=complex)
    out1 = np.empty(M, dtype=complex)
    out2 = np.empty(M, dtype=complex)
    cdef double complex[::1] v0 = out0, v1 = out1, v2 = out2
    cdef double complex ip, fac, term, s0, s1, s2
    cdef double nk
    with nogil:
        for m in range(M):
            s0 = 0
            s1 = 0
            s2 = 0
            for i in range(N):
                ip = 0
                fac = 0
                for k in range(g):
                    nk = lattice[i, k]
                    ip = ip + nk * Z[m, k]
                    fac = fac + nk * d[k]
                ip = quad[i] + 2j * M_PI * ip
                fac = 2j * M_PI * fac
                term = cexp_fast(ip.real, ip.imag)
                s0 = s0 + term
                s1 = s1 + fac * term
                s2 = s2 + fac * fac * term
            v0[m] = s0
            v1[m] = s1
            v2[m] = s2
    return out0, out1, out2
