"""Coefficient arithmetic and evaluation for polynomials, disk automorphisms,
finite Blaschke products and rational quotients.

Coefficient vectors are dense and indexed from the constant term. All objects
are immutable; evaluation accepts scalars or numpy arrays of points.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import _backend
from .errors import DomainError

XI_TOL = 1e-6
DISTINCT_ZEROS_TOL = 1e-9
_CLOSED_DISK_SLACK = 1e-12


def _as_complex_array(z):
    return np.asarray(z, dtype=np.complex128)


def _scalar_or_array(out, z):
    return out.item() if np.ndim(z) == 0 else out


@dataclass(frozen=True, eq=False)
class PowerSeriesPoly:
    """Truncated power series ``sum(coeffs[n] * z**n)``.

    Trailing exact zeros are dropped, so ``degree == -1`` is the zero function.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128).ravel()
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:0]
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls) -> PowerSeriesPoly:
        return cls(np.zeros(0))

    @classmethod
    def monomial(cls, n: int, coeff: complex = 1.0) -> PowerSeriesPoly:
        c = np.zeros(n + 1, dtype=np.complex128)
        c[n] = coeff
        return cls(c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coefficients(self, size: int) -> np.ndarray:
        """Coefficient vector zero-padded or truncated to length ``size``."""
        out = np.zeros(size, dtype=np.complex128)
        k = min(size, len(self.coeffs))
        out[:k] = self.coeffs[:k]
        return out

    def truncate(self, degree: int) -> PowerSeriesPoly:
        return PowerSeriesPoly(self.coeffs[: degree + 1])

    def derivative(self) -> PowerSeriesPoly:
        if self.degree < 1:
            return PowerSeriesPoly.zero()
        return PowerSeriesPoly(self.coeffs[1:] * np.arange(1, len(self.coeffs)))

    def __call__(self, z):
        return eval_poly(self, z)

    def __add__(self, other: PowerSeriesPoly) -> PowerSeriesPoly:
        n = max(len(self.coeffs), len(other.coeffs))
        return PowerSeriesPoly(self.coefficients(n) + other.coefficients(n))

    def __sub__(self, other: PowerSeriesPoly) -> PowerSeriesPoly:
        return self + other.scale(-1.0)

    def __mul__(self, other):
        if isinstance(other, PowerSeriesPoly):
            if self.degree < 0 or other.degree < 0:
                return PowerSeriesPoly.zero()
            return PowerSeriesPoly(np.convolve(self.coeffs, other.coeffs))
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c: complex) -> PowerSeriesPoly:
        return PowerSeriesPoly(self.coeffs * c)

    def __repr__(self):
        return f"PowerSeriesPoly(degree={self.degree}, coeffs={np.array2string(self.coeffs[:6], precision=4)}{'...' if self.degree > 5 else ''})"


def poly(*coeffs) -> PowerSeriesPoly:
    """Shorthand: ``poly(1, -0.5)`` is ``1 - 0.5 z``."""
    if len(coeffs) == 1 and np.ndim(coeffs[0]) > 0:
        coeffs = coeffs[0]
    return PowerSeriesPoly(np.asarray(coeffs, dtype=np.complex128))


def _normalize_xi(xi) -> complex:
    xi = complex(xi)
    mod = abs(xi)
    if mod == 0 or not np.isfinite(mod):
        raise ValueError(f"unimodular constant must be nonzero and finite, got {xi}")
    if abs(mod - 1.0) > XI_TOL:
        warnings.warn(f"|xi| = {mod:.3g} deviates from 1; normalizing", stacklevel=3)
    return xi / mod


@dataclass(frozen=True)
class MoebiusMap:
    """Disk automorphism ``xi * (a - z) / (1 - conj(a) z)``."""

    xi: complex = 1.0
    a: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "xi", _normalize_xi(self.xi))
        a = complex(self.a)
        if not abs(a) < 1:
            raise ValueError(f"Moebius parameter must satisfy |a| < 1, got {a}")
        object.__setattr__(self, "a", a)

    def __call__(self, z):
        return eval_map(self, z)

    def derivative(self, z):
        return derivative_at(self, z)

    def as_rational(self, domain_radius: float = 0.999) -> RationalFn:
        return RationalFn(
            PowerSeriesPoly([self.xi * self.a, -self.xi]),
            PowerSeriesPoly([1.0, -np.conj(self.a)]),
            domain_radius,
        )


@dataclass(frozen=True)
class BlaschkeProduct:
    """Finite Blaschke product ``xi * prod_k b_k(z)``.

    Factors use the standard normalization: ``b_k(z) = z`` for a zero at the
    origin, otherwise ``(|a|/a) (a - z) / (1 - conj(a) z)`` so that
    ``b_k(0) = |a_k| >= 0``.

    ``allow_repeated`` admits coincident zeros (e.g. ``z**2``); only kernel
    tests may use this, the explicit Toeplitz formula needs distinct zeros.
    """

    xi: complex = 1.0
    zeros: tuple = (0.0,)
    allow_repeated: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "xi", _normalize_xi(self.xi))
        zs = tuple(complex(a) for a in np.atleast_1d(self.zeros))
        if not zs:
            raise ValueError("a Blaschke product needs at least one zero")
        for a in zs:
            if not abs(a) < 1:
                raise ValueError(f"Blaschke zeros must lie in the open disk, got {a}")
        if not self.allow_repeated:
            gap = min_pairwise_distance(zs)
            if gap <= DISTINCT_ZEROS_TOL:
                raise ValueError(f"Blaschke zeros must be pairwise distinct (min distance {gap:.3g})")
        object.__setattr__(self, "zeros", zs)

    @classmethod
    def from_moebius(cls, m: MoebiusMap) -> BlaschkeProduct:
        a = m.a
        if a == 0:
            return cls(-m.xi, (0.0,))
        return cls(m.xi * a / abs(a), (a,))

    @property
    def order(self) -> int:
        return len(self.zeros)

    def factor_units(self) -> np.ndarray:
        return np.array([1.0 if a == 0 else abs(a) / a for a in self.zeros], dtype=np.complex128)

    def __call__(self, z):
        return eval_map(self, z)

    def derivative(self, z):
        return derivative_at(self, z)

    def as_rational(self, domain_radius: float = 0.999) -> RationalFn:
        num = PowerSeriesPoly([self.xi])
        den = PowerSeriesPoly([1.0])
        for u, a in zip(self.factor_units(), self.zeros):
            if a == 0:
                num = num * PowerSeriesPoly([0.0, 1.0])
            else:
                num = num * PowerSeriesPoly([u * a, -u])
                den = den * PowerSeriesPoly([1.0, -np.conj(a)])
        return RationalFn(num, den, domain_radius)


def min_pairwise_distance(points) -> float:
    p = np.asarray(points, dtype=np.complex128)
    if p.size < 2:
        return np.inf
    d = np.abs(p[:, None] - p[None, :])
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


@dataclass(frozen=True, eq=False)
class RationalFn:
    """Quotient of two power series, valid on the closed disk of radius ``domain_radius``."""

    numerator: PowerSeriesPoly
    denominator: PowerSeriesPoly
    domain_radius: float = 0.999

    def __post_init__(self):
        if not 0 < self.domain_radius <= 1:
            raise ValueError("domain_radius must lie in (0, 1]")
        den = self.denominator
        if den.degree < 0:
            raise DomainError("denominator is identically zero")
        if den.degree >= 1:
            roots = np.roots(den.coeffs[::-1])
            if roots.size and np.min(np.abs(roots)) <= self.domain_radius:
                raise DomainError(
                    f"denominator vanishes at {roots[np.argmin(np.abs(roots))]:.6g}, "
                    f"inside the disk of radius {self.domain_radius}"
                )

    def __call__(self, z):
        return eval_poly(self.numerator, z) / eval_poly(self.denominator, z)


Analytic = Union[MoebiusMap, BlaschkeProduct, PowerSeriesPoly]


def eval_poly(p: PowerSeriesPoly, z):
    """Horner evaluation of ``p`` at a scalar or array ``z``."""
    out = _backend.horner(p.coeffs, z)
    return _scalar_or_array(out, z)


def antiderivative(p: PowerSeriesPoly, c0: complex = 0.0) -> PowerSeriesPoly:
    """The primitive ``F`` of ``p`` with ``F(0) = c0``."""
    n = len(p.coeffs)
    c = np.empty(n + 1, dtype=np.complex128)
    c[0] = c0
    c[1:] = p.coeffs / np.arange(1, n + 1)
    return PowerSeriesPoly(c)


def _check_open_disk(z):
    if np.any(np.abs(z) >= 1):
        raise DomainError("point outside the open unit disk")


def _map_value(phi, z):
    # no domain check: rational continuation off the disk
    if isinstance(phi, MoebiusMap):
        return phi.xi * (phi.a - z) / (1 - np.conj(phi.a) * z)
    if isinstance(phi, BlaschkeProduct):
        out = np.full(np.shape(z), phi.xi, dtype=np.complex128)
        for u, a in zip(phi.factor_units(), phi.zeros):
            out = out * (z if a == 0 else u * (a - z) / (1 - np.conj(a) * z))
        return out
    raise TypeError(f"expected MoebiusMap or BlaschkeProduct, got {type(phi).__name__}")


def _map_derivative(phi, z):
    if isinstance(phi, MoebiusMap):
        return phi.xi * (abs(phi.a) ** 2 - 1) / (1 - np.conj(phi.a) * z) ** 2
    if isinstance(phi, BlaschkeProduct):
        vals, ders = [], []
        for u, a in zip(phi.factor_units(), phi.zeros):
            if a == 0:
                vals.append(z)
                ders.append(np.ones_like(z))
            else:
                den = 1 - np.conj(a) * z
                vals.append(u * (a - z) / den)
                ders.append(u * (abs(a) ** 2 - 1) / den**2)
        out = np.zeros_like(z)
        for k in range(len(vals)):
            term = ders[k]
            for j, v in enumerate(vals):
                if j != k:
                    term = term * v
            out = out + term
        return phi.xi * out
    raise TypeError(f"cannot differentiate {type(phi).__name__}")


def eval_map(phi: MoebiusMap | BlaschkeProduct, z):
    """Evaluate a Moebius map or Blaschke product on the closed unit disk."""
    zz = _as_complex_array(z)
    if np.any(np.abs(zz) > 1 + _CLOSED_DISK_SLACK):
        raise DomainError("point outside the closed unit disk")
    return _scalar_or_array(_map_value(phi, zz), z)


def derivative_at(phi: Analytic, z):
    """Complex derivative of a map or polynomial.

    Moebius maps use ``xi (|a|^2 - 1) / (1 - conj(a) z)^2``; Blaschke products
    apply the product rule factor by factor, which stays exact at the zeros.
    """
    zz = _as_complex_array(z)
    if isinstance(phi, PowerSeriesPoly):
        return eval_poly(phi.derivative(), z)
    _check_open_disk(zz)
    return _scalar_or_array(_map_derivative(phi, zz), z)


def series_expand(r: RationalFn | MoebiusMap | BlaschkeProduct, degree: int, *, with_bound: bool = False):
    """Taylor coefficients ``a_0..a_degree`` about the origin by synthetic division.

    With ``with_bound`` also returns the geometric tail estimate
    ``|a_degree| * rho**degree`` where ``rho`` is the domain radius.
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if isinstance(r, (MoebiusMap, BlaschkeProduct)):
        r = r.as_rational()
    if not isinstance(r, RationalFn):
        raise TypeError(f"cannot expand {type(r).__name__}")
    den = r.denominator.coeffs
    if den[0] == 0:
        raise DomainError("denominator vanishes at the origin")
    num = r.numerator.coeffs if r.numerator.degree >= 0 else np.zeros(1, dtype=np.complex128)
    c = _backend.series_divide(num, den, degree)
    p = PowerSeriesPoly(c)
    if with_bound:
        return p, float(abs(c[degree]) * r.domain_radius**degree)
    return p


def as_series(phi: Analytic, degree: int) -> PowerSeriesPoly:
    """Coefficients of a symbol up to ``degree`` (polynomials are truncated)."""
    if isinstance(phi, PowerSeriesPoly):
        return phi.truncate(degree)
    return series_expand(phi, degree)
