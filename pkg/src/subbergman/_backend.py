"""Select the compiled kernels when available.

Set ``SUBBERGMAN_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

import numpy as np

from . import _fallback

if os.environ.get("SUBBERGMAN_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
        BACKEND = "python"


def _c1(x):
    return np.ascontiguousarray(x, dtype=np.complex128).ravel()


def horner(coeffs, z):
    """Evaluate sum(coeffs[n] * z**n) at every point of ``z`` (any shape)."""
    z = np.asarray(z, dtype=np.complex128)
    return _impl.horner(_c1(coeffs), _c1(z)).reshape(z.shape)


def series_divide(num, den, degree):
    """First ``degree + 1`` Taylor coefficients of num/den (den[0] != 0)."""
    return _impl.series_divide(_c1(num), _c1(den), int(degree))


def multiplication_matrix(symbol, norms, size):
    """Lower-triangular matrix of multiplication by ``symbol`` in the basis z**n / norms[n]."""
    norms = np.ascontiguousarray(norms, dtype=np.float64)
    return _impl.multiplication_matrix(_c1(symbol), norms, int(size))


def gap_series(z, terms):
    z = np.asarray(z, dtype=np.complex128)
    return _impl.gap_series(_c1(z), int(terms)).reshape(z.shape)
