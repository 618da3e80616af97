"""Pick matrices and numerical complete Nevanlinna-Pick diagnostics."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .analytic import min_pairwise_distance
from .errors import DomainError

PSD_TOL = 1e-10
POINT_RADIUS = 0.9
MIN_SEPARATION = 1e-8
SEARCH_RADIUS = 0.8


class Verdict(str, enum.Enum):
    PSD = "PSD"
    NOT_PSD = "NOT_PSD"
    INCONCLUSIVE = "INCONCLUSIVE"


def classify(min_eigenvalue: float, tol: float = PSD_TOL) -> Verdict:
    """PSD above ``-tol``, NOT_PSD below ``-10 tol``, INCONCLUSIVE in between."""
    if min_eigenvalue >= -tol:
        return Verdict.PSD
    if min_eigenvalue < -10 * tol:
        return Verdict.NOT_PSD
    return Verdict.INCONCLUSIVE


def _check_points(points, radius=POINT_RADIUS):
    pts = np.asarray(points, dtype=np.complex128).ravel()
    if pts.size == 0:
        raise ValueError("need at least one point")
    if np.any(np.abs(pts) > radius):
        raise DomainError(f"points must satisfy |z| <= {radius}")
    if min_pairwise_distance(pts) < MIN_SEPARATION:
        raise ValueError("points must be pairwise distinct")
    return pts


@dataclass(frozen=True, eq=False)
class PickInstance:
    kernel: object
    points: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        pts = _check_points(self.points)
        w = np.asarray(self.targets, dtype=np.complex128)
        if w.ndim == 1:
            w = w[:, None, None]
        if w.ndim != 3 or w.shape[0] != pts.size or w.shape[1] != w.shape[2]:
            raise ValueError("targets must be n square r x r matrices (or n scalars)")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "targets", w)

    @property
    def r(self) -> int:
        return self.targets.shape[1]


def pick_matrix(instance: PickInstance) -> np.ndarray:
    """Block matrix ``[K(z_i, z_j) (I - W_i W_j^*)]`` of size ``n r``."""
    z = instance.points
    W = instance.targets
    n, r = z.size, instance.r
    K = np.asarray(instance.kernel(z[:, None], z[None, :]), dtype=np.complex128)
    WW = np.einsum("iab,jcb->ijac", W, W.conj())
    blocks = K[:, :, None, None] * (np.eye(r)[None, None] - WW)
    return blocks.transpose(0, 2, 1, 3).reshape(n * r, n * r)


@dataclass(frozen=True)
class NormalizedKernel:
    """``k(z,w) k(z0,z0) / (k(z,z0) k(z0,w))``, equal to 1 whenever one argument is ``z0``."""

    kernel: object
    z0: complex = 0j

    def __call__(self, z, w):
        z = np.asarray(z, dtype=np.complex128)
        w = np.asarray(w, dtype=np.complex128)
        z0 = np.complex128(self.z0)
        kzz0 = np.asarray(self.kernel(z, z0))
        kz0w = np.asarray(self.kernel(z0, w))
        if np.any(kzz0 == 0) or np.any(kz0w == 0):
            raise ZeroDivisionError("normalizing kernel vanishes at a probe point")
        out = self.kernel(z, w) * self.kernel(z0, z0) / (kzz0 * kz0w)
        return out.item() if np.ndim(out) == 0 else out


def normalized_kernel(k, z0: complex = 0j) -> NormalizedKernel:
    return NormalizedKernel(k, z0)


@dataclass(frozen=True, eq=False)
class PickTestReport:
    min_eigenvalue: float
    verdict: Verdict
    tolerance: float
    points: np.ndarray = field(repr=False)
    matrix: np.ndarray = field(repr=False)

    @property
    def witness(self):
        return self.points if self.verdict is Verdict.NOT_PSD else None


def oneminus_matrix(k, points, z0: complex = 0j) -> np.ndarray:
    """``F_ij = 1 - 1 / k~(z_i, z_j)`` for the kernel normalized at ``z0``."""
    z = np.asarray(points, dtype=np.complex128)
    kt = np.asarray(normalized_kernel(k, z0)(z[:, None], z[None, :]), dtype=np.complex128)
    if np.any(kt == 0):
        raise ZeroDivisionError("normalized kernel vanishes for some pair of points")
    F = 1 - 1 / kt
    return 0.5 * (F + F.conj().T)


def cnp_oneminus_test(k, points, z0: complex = 0j, tol: float = PSD_TOL) -> PickTestReport:
    """Eigenvalue test of the ``1 - 1/k~`` matrix (it is PSD for every point set iff the kernel is CNP)."""
    pts = _check_points(points)
    F = oneminus_matrix(k, pts, z0)
    lam = float(np.linalg.eigvalsh(F)[0])
    return PickTestReport(lam, classify(lam, tol), tol, pts, F)


@dataclass(frozen=True, eq=False)
class Witness:
    points: np.ndarray
    min_eigenvalue: float
    trial: int


def random_disk_points(rng: np.random.Generator, n: int, radius: float = SEARCH_RADIUS) -> np.ndarray:
    r = radius * np.sqrt(rng.uniform(size=n))
    return r * np.exp(2j * np.pi * rng.uniform(size=n))


def trial_points(seed: int, trial: int, n: int, radius: float = SEARCH_RADIUS) -> np.ndarray:
    """Point set for one trial; depends only on ``(seed, trial)``."""
    return random_disk_points(np.random.default_rng([seed, trial]), n, radius)


def cnp_witness_search(
    k, n_points: int, trials: int, seed: int, tol: float = PSD_TOL, z0: complex = 0j, radius: float = SEARCH_RADIUS
) -> Witness | None:
    """First seeded random point set whose ``1 - 1/k~`` matrix has an eigenvalue below ``-10 tol``.

    ``None`` means no witness in the budget, which is evidence for CNP, not proof.
    """
    if n_points < 2:
        raise ValueError("a witness needs at least two points")
    for t in range(trials):
        pts = trial_points(seed, t, n_points, radius)
        lam = float(np.linalg.eigvalsh(oneminus_matrix(k, pts, z0))[0])
        if lam < -10 * tol:
            return Witness(pts, lam, t)
    return None
