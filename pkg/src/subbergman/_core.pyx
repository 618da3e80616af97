# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror ``_fallback`` exactly."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


# Complex products are spelled out in real arithmetic: C99 complex multiply
# goes through __muldc3 (NaN/Inf recovery), which is several times slower.

def horner(const double complex[::1] coeffs, const double complex[::1] z):
    cdef Py_ssize_t n = coeffs.shape[0], m = z.shape[0], i, j, k, b
    out = np.zeros(m, dtype=np.complex128)
    cdef double complex[::1] res = out
    cdef double[4] xr, xi, ar, ai
    cdef double cr, ci, t
    if n == 0:
        return out
    # four independent points per pass keep the multiply pipeline busy
    for i in range(0, m, 4):
        b = m - i if m - i < 4 else 4
        for j in range(4):
            # a short final block pads with zeros and discards those lanes
            xr[j] = z[i + j].real if j < b else 0.0
            xi[j] = z[i + j].imag if j < b else 0.0
            ar[j] = coeffs[n - 1].real
            ai[j] = coeffs[n - 1].imag
        for k in range(n - 2, -1, -1):
            cr = coeffs[k].real
            ci = coeffs[k].imag
            for j in range(4):
                t = ar[j] * xr[j] - ai[j] * xi[j] + cr
                ai[j] = ar[j] * xi[j] + ai[j] * xr[j] + ci
                ar[j] = t
        for j in range(b):
            res[i + j] = ar[j] + 1j * ai[j]
    return out


def series_divide(const double complex[::1] num, const double complex[::1] den,
                  Py_ssize_t degree):
    cdef Py_ssize_t p = num.shape[0], q = den.shape[0], k, j, jmax
    cdef double complex d0 = den[0], acc
    out = np.zeros(degree + 1, dtype=np.complex128)
    cdef double complex[::1] c = out
    for k in range(degree + 1):
        acc = num[k] if k < p else 0
        jmax = k if k < q - 1 else q - 1
        for j in range(1, jmax + 1):
            acc = acc - den[j] * c[k - j]
        c[k] = acc / d0
    return out


def multiplication_matrix(const double complex[::1] symbol, const double[::1] norms,
                          Py_ssize_t size):
    cdef Py_ssize_t nb = symbol.shape[0], m, n, k
    out = np.zeros((size, size), dtype=np.complex128)
    cdef double complex[:, ::1] t = out
    for n in range(size):
        for m in range(n, size):
            k = m - n
            if k >= nb:
                break
            t[m, n] = symbol[k] * (norms[m] / norms[n])
    return out


def gap_series(const double complex[::1] z, Py_ssize_t terms):
    cdef Py_ssize_t m = z.shape[0], i, k
    out = np.zeros(m, dtype=np.complex128)
    cdef double complex[::1] res = out
    cdef double pr, pi, sr, si, t
    for i in range(m):
        pr = z[i].real
        pi = z[i].imag
        sr = 0.0
        si = 0.0
        for k in range(terms):
            sr += pr
            si += pi
            t = pr * pr - pi * pi
            pi = 2.0 * pr * pi
            pr = t
        res[i] = sr + 1j * si
    return out
