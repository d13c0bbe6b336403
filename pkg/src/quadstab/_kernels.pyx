# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid kernels for the optomechanical sweeps.

Both kernels return the largest real part of the spectrum of ``A = J V`` on a
parameter grid, using the closed-form polynomial in ``s = lambda^2``.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex csqrt(double complex)
    double complex cpow(double complex, double complex)
    double creal(double complex)
    double cabs(double complex)

cdef extern from "math.h" nogil:
    double fabs(double)
    double sqrt(double)


cdef inline double _re_sqrt(double complex s) noexcept nogil:
    return fabs(creal(csqrt(s)))


cdef inline double complex _polish(double complex s, double a2, double a1, double a0) noexcept nogil:
    cdef double complex f, df
    cdef int it
    for it in range(2):
        f = ((s + a2) * s + a1) * s + a0
        df = (3.0 * s + 2.0 * a2) * s + a1
        if cabs(df) == 0.0:
            break
        s = s - f / df
    return s


cdef double _cubic_max_re(double a2, double a1, double a0) noexcept nogil:
    cdef double p = a1 - a2 * a2 / 3.0
    cdef double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0
    cdef double complex d = csqrt(q * q / 4.0 + p * p * p / 27.0 + 0j)
    cdef double complex u3 = -q / 2.0 + d
    cdef double complex u3b = -q / 2.0 - d
    cdef double complex u, v, y, w = -0.5 + 0.8660254037844386j
    cdef double complex roots[3]
    cdef double best = 0.0, r
    cdef int k
    if cabs(u3b) > cabs(u3):
        u3 = u3b
    if cabs(u3) == 0.0:
        roots[0] = roots[1] = roots[2] = -a2 / 3.0
    else:
        u = cpow(u3, 1.0 / 3.0)
        for k in range(3):
            v = -p / (3.0 * u)
            roots[k] = u + v - a2 / 3.0
            u = u * w
    for k in range(3):
        r = _re_sqrt(_polish(roots[k], a2, a1, a0))
        if r > best:
            best = r
    return best


def two_mode_max_re(double[::1] deltas, double Omega, double[::1] kappas):
    """Grid ``(len(deltas), len(kappas))`` of max Re lambda for the two-mode model."""
    cdef Py_ssize_t i, j, n = deltas.shape[0], m = kappas.shape[0]
    out = np.empty((n, m))
    cdef double[:, ::1] o = out
    cdef double D, K2, b, disc, r1, r2
    cdef double complex sd
    with nogil:
        for i in range(n):
            D = deltas[i]
            for j in range(m):
                K2 = kappas[j] * kappas[j]
                b = D * D + Omega * Omega
                disc = (D * D - Omega * Omega) ** 2 + 16.0 * D * Omega * K2
                sd = csqrt(disc + 0j)
                r1 = _re_sqrt((-b + sd) / 2.0)
                r2 = _re_sqrt((-b - sd) / 2.0)
                o[i, j] = r1 if r1 > r2 else r2
    return out


def three_mode_max_re(double Delta1, double Delta2, double Omega, double[::1] k1, double[::1] k2):
    """Grid ``(len(k1), len(k2))`` of max Re lambda for the three-mode model."""
    cdef Py_ssize_t i, j, n = k1.shape[0], m = k2.shape[0]
    out = np.empty((n, m))
    cdef double[:, ::1] o = out
    cdef double D1s = Delta1 * Delta1, D2s = Delta2 * Delta2, Os = Omega * Omega
    cdef double K1, K2, a2, a1, a0
    with nogil:
        for i in range(n):
            K1 = k1[i] * k1[i]
            for j in range(m):
                K2 = k2[j] * k2[j]
                a2 = D1s + D2s + Os
                a1 = D1s * D2s + (D1s + D2s) * Os - 4.0 * Omega * (Delta1 * K1 + Delta2 * K2)
                a0 = D1s * D2s * Os - 4.0 * Delta1 * Delta2 * Omega * (Delta2 * K1 + Delta1 * K2)
                o[i, j] = _cubic_max_re(a2, a1, a0)
    return out
