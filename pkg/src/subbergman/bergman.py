"""Weighted Bergman spaces on the unit disk.

The measure is the probability measure ``dA_alpha = (alpha+1)/pi (1-|z|^2)^alpha dA``,
so the reproducing kernel is exactly ``1 / (1 - z conj(w))**(2 + alpha)`` and
``||z^n||^2 = n! Gamma(alpha+2) / Gamma(n+alpha+2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln, roots_jacobi

from .analytic import BlaschkeProduct, MoebiusMap, PowerSeriesPoly, eval_map
from .errors import DomainError


def monomial_norms_sq(alpha: float, n) -> np.ndarray:
    """``||z^n||_alpha^2`` for an integer or integer array ``n`` (log-Gamma, no overflow)."""
    n = np.asarray(n, dtype=np.float64)
    return np.exp(gammaln(n + 1) + gammaln(alpha + 2) - gammaln(n + alpha + 2))


def monomial_norms(alpha: float, size: int) -> np.ndarray:
    return np.sqrt(monomial_norms_sq(alpha, np.arange(size)))


@dataclass(frozen=True, eq=False)
class BergmanSpaceModel:
    """A^2_alpha truncated to polynomials of degree at most ``truncation``."""

    alpha: float
    truncation: int = 200
    norms: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.alpha > -1:
            raise ValueError(f"weight must satisfy alpha > -1, got {self.alpha}")
        if self.truncation < 1:
            raise ValueError("truncation must be at least 1")
        nrm = monomial_norms(self.alpha, self.truncation + 1)
        nrm.setflags(write=False)
        object.__setattr__(self, "norms", nrm)

    def to_orthonormal(self, f: PowerSeriesPoly, size: int | None = None) -> np.ndarray:
        """Coordinates of ``f`` in the basis ``e_n = z^n / ||z^n||``."""
        size = self.truncation + 1 if size is None else size
        if f.degree >= size:
            raise ValueError(f"degree {f.degree} does not fit in a basis of size {size}")
        return f.coefficients(size) * self._norms(size)

    def from_orthonormal(self, x) -> PowerSeriesPoly:
        x = np.asarray(x)
        return PowerSeriesPoly(x / self._norms(len(x)))

    def _norms(self, size: int) -> np.ndarray:
        if size <= len(self.norms):
            return self.norms[:size]
        return monomial_norms(self.alpha, size)

    def inner(self, f: PowerSeriesPoly, g: PowerSeriesPoly) -> complex:
        """Closed-form inner product ``sum f_n conj(g_n) ||z^n||^2``."""
        n = min(len(f.coeffs), len(g.coeffs))
        if n == 0:
            return 0j
        return complex(np.sum(f.coeffs[:n] * np.conj(g.coeffs[:n]) * monomial_norms_sq(self.alpha, np.arange(n))))

    def norm(self, f: PowerSeriesPoly) -> float:
        return math.sqrt(max(self.inner(f, f).real, 0.0))


def monomial_norm(space: BergmanSpaceModel, n: int) -> float:
    if not 0 <= n <= space.truncation:
        raise ValueError(f"monomial index {n} outside 0..{space.truncation}")
    return float(space.norms[n])


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Product rule for the normalized weighted area measure.

    Gauss-Jacobi in ``t = r^2`` with weight ``(1-t)^alpha`` times the trapezoid
    rule on ``M`` equispaced angles. Exact for ``z^n conj(z)^m`` with
    ``n + m <= degree``.
    """

    alpha: float
    degree: int
    points: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @classmethod
    def for_degree(cls, alpha: float, degree: int) -> QuadratureRule:
        n_radial = math.ceil((degree + 2) / 2) + 2
        n_angular = degree + 3
        x, wx = roots_jacobi(n_radial, alpha, 0.0)
        t = (1 + x) / 2
        wt = wx / 2 ** (alpha + 1)
        theta = 2 * np.pi * np.arange(n_angular) / n_angular
        pts = np.sqrt(t)[:, None] * np.exp(1j * theta)[None, :]
        w = (alpha + 1) * np.repeat(wt[:, None], n_angular, axis=1) / n_angular
        return cls(alpha, degree, pts.ravel(), w.ravel())

    def integrate(self, values) -> complex:
        return complex(np.sum(self.weights * values))


def inner_product_quadrature(
    f: PowerSeriesPoly, g: PowerSeriesPoly, space: BergmanSpaceModel, rule: QuadratureRule | None = None
) -> complex:
    """Inner product of A^2_alpha computed as an area integral (oracle for the closed form)."""
    need = max(f.degree, 0) + max(g.degree, 0)
    if rule is None:
        rule = QuadratureRule.for_degree(space.alpha, need)
    elif rule.alpha != space.alpha:
        raise ValueError("quadrature weight does not match the space")
    if need > rule.degree:
        raise ValueError(f"integrand degree {need} exceeds quadrature exactness {rule.degree}")
    z = rule.points
    return rule.integrate(f(z) * np.conj(g(z)))


# ---- kernels ---------------------------------------------------------------


def _check_bidisk(z, w):
    if np.any(np.abs(z) >= 1) or np.any(np.abs(w) >= 1):
        raise DomainError("kernel arguments must lie in the open unit disk")


@dataclass(frozen=True)
class GeneralizedBergman:
    """``(1 - z conj(w))**(-s)``; ``s = 1`` is the Hardy kernel, ``s = alpha + 2`` is A^2_alpha."""

    s: float

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError(f"kernel exponent must be positive, got {self.s}")

    def __call__(self, z, w):
        z = np.asarray(z, dtype=np.complex128)
        w = np.asarray(w, dtype=np.complex128)
        out = np.power(1 - z * np.conj(w), -self.s)
        return out.item() if out.ndim == 0 else out


@dataclass(frozen=True)
class SubBergman:
    """Reproducing kernel of H^alpha(phi): ``(1 - phi(z) conj(phi(w))) / (1 - z conj(w))**(2+alpha)``."""

    alpha: float
    phi: MoebiusMap | BlaschkeProduct

    def __post_init__(self):
        if not self.alpha > -1:
            raise ValueError(f"weight must satisfy alpha > -1, got {self.alpha}")

    def __call__(self, z, w):
        z = np.asarray(z, dtype=np.complex128)
        w = np.asarray(w, dtype=np.complex128)
        num = 1 - eval_map(self.phi, z) * np.conj(eval_map(self.phi, w))
        out = num * np.power(1 - z * np.conj(w), -(2 + self.alpha))
        return out.item() if np.ndim(out) == 0 else out


KernelSpec = GeneralizedBergman | SubBergman


def kernel_eval(k, z, w):
    """Evaluate a kernel on the open bidisk (principal branch for fractional powers)."""
    _check_bidisk(np.asarray(z), np.asarray(w))
    return k(z, w)


class SeriesValue(NamedTuple):
    value: complex
    tail_bound: float


def kernel_series_oracle(s: float, z: complex, w: complex, terms: int) -> SeriesValue:
    """Binomial series of ``(1 - z conj(w))**(-s)`` with a geometric tail bound."""
    x = complex(z) * np.conj(complex(w))
    if not abs(x) < 1:
        raise DomainError("series oracle needs |z w| < 1")
    total = 0j
    c = 1.0
    xn = 1.0 + 0j
    for n in range(terms):
        total += c * xn
        c *= (n + s) / (n + 1)
        xn *= x
    # c, xn now hold the first omitted term's coefficient and power
    ratio = abs(x) * max(1.0, (terms + s) / (terms + 1))
    bound = abs(c * xn) / (1 - ratio) if ratio < 1 else math.inf
    return SeriesValue(total, bound)


def kernel_from_norms(alpha: float, z, w, terms: int) -> complex:
    """``sum_{n<terms} (z conj(w))^n / ||z^n||^2``: the kernel rebuilt from the norm table."""
    x = complex(z) * np.conj(complex(w))
    n = np.arange(terms)
    return complex(np.sum(x**n / monomial_norms_sq(alpha, n)))
