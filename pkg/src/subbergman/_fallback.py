"""Pure numpy versions of the compiled kernels in ``_core.pyx``."""

import numpy as np


def horner(coeffs, z):
    out = np.zeros(z.shape, dtype=np.complex128)
    for c in coeffs[::-1]:
        out = out * z + c
    return out


def series_divide(num, den, degree):
    c = np.zeros(degree + 1, dtype=np.complex128)
    q = len(den)
    rev = den[1:][::-1]
    for k in range(degree + 1):
        acc = num[k] if k < len(num) else 0.0
        j = min(k, q - 1)
        if j:
            acc = acc - np.dot(rev[q - 1 - j:], c[k - j:k])
        c[k] = acc / den[0]
    return c


def multiplication_matrix(symbol, norms, size):
    m, n = np.indices((size, size))
    k = m - n
    valid = (k >= 0) & (k < len(symbol))
    out = np.zeros((size, size), dtype=np.complex128)
    out[valid] = symbol[k[valid]] * (norms[m[valid]] / norms[n[valid]])
    return out


def gap_series(z, terms):
    acc = np.zeros(z.shape, dtype=np.complex128)
    p = z.copy()
    for _ in range(terms):
        acc += p
        p = p * p
    return acc
