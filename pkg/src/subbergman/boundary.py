"""Boundary behaviour probes, the rank-one factorization check for the
rescaled sub-Bergman kernel, and cyclicity residuals.

A "limit" here is always a finite-sampling statement: a probe reports
CONVERGES when the Cauchy oscillation of its last values is below 1e-3.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .analytic import MoebiusMap, PowerSeriesPoly, _map_derivative, _map_value
from .bergman import BergmanSpaceModel, monomial_norms_sq
from .errors import DomainError, ProbeError
from .operators import DEFAULT_BUFFER, defect_matrix

OSC_TOL = 1e-3
MAX_DEPTH = 40
MAX_GAP_TERMS = 30
EIG_CUTOFF = 1e-8
RANGE_TOL = 1e-6
POINT_MARGIN = 0.05
BOUNDARY_SAMPLES = 2048


class BoundaryVerdict(str, enum.Enum):
    CONVERGES = "CONVERGES"
    NO_CONVERGENCE_DETECTED = "NO_CONVERGENCE_DETECTED"


@dataclass(frozen=True, eq=False)
class SmirnovQuotient:
    """``gamma / psi`` with bounded numerator and denominator.

    The sup-norm certificates are maxima over BOUNDARY_SAMPLES equispaced
    points on the circle (the maximum principle puts the sup there).
    """

    numerator: PowerSeriesPoly
    denominator: PowerSeriesPoly
    sup_numerator: float = field(init=False)
    sup_denominator: float = field(init=False)
    min_denominator: float = field(init=False)

    def __post_init__(self):
        if self.denominator.degree < 0:
            raise ValueError("denominator is identically zero")
        circle = np.exp(2j * np.pi * np.arange(BOUNDARY_SAMPLES) / BOUNDARY_SAMPLES)
        den = np.abs(self.denominator(circle))
        object.__setattr__(self, "sup_numerator", float(np.max(np.abs(self.numerator(circle)))))
        object.__setattr__(self, "sup_denominator", float(np.max(den)))
        object.__setattr__(self, "min_denominator", float(np.min(den)))

    def __call__(self, z):
        return self.numerator(z) / self.denominator(z)


def _evaluate_path(f, z):
    try:
        v = np.asarray(f(z), dtype=np.complex128)
    except (ZeroDivisionError, FloatingPointError, DomainError) as exc:
        raise ProbeError(f"evaluator failed along the probe path: {exc}") from exc
    bad = ~np.isfinite(v)
    if bad.any():
        raise ProbeError(f"evaluator returned a non-finite value at z = {z[np.argmax(bad)]!r}")
    return v


def tail_oscillation(values) -> np.ndarray:
    """``osc[K] = max_{k,l >= K} |v_k - v_l|`` (0-based); nonincreasing by construction."""
    v = np.asarray(values)
    n = len(v)
    osc = np.zeros(n)
    for K in range(n - 2, -1, -1):
        osc[K] = max(osc[K + 1], float(np.max(np.abs(v[K + 1:] - v[K]))))
    return osc


@dataclass(frozen=True, eq=False)
class RadialProbeReport:
    theta: float
    radii: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    oscillation: np.ndarray = field(repr=False)
    verdict: BoundaryVerdict
    tail_oscillation: float

    @property
    def limit(self) -> complex:
        return complex(self.values[-1])


def _check_depth(depth):
    if not 6 <= depth <= MAX_DEPTH:
        raise ValueError(f"depth must lie in 6..{MAX_DEPTH}")


def radial_probe(f, theta: float, depth: int = 30) -> RadialProbeReport:
    """Values of ``f`` at ``(1 - 2^-k) e^{i theta}``, ``k = 1..depth``."""
    _check_depth(depth)
    k = np.arange(1, depth + 1)
    radii = 1 - 2.0 ** (-k)
    v = _evaluate_path(f, radii * np.exp(1j * theta))
    osc = tail_oscillation(v)
    tail = float(osc[depth - 6])  # K = depth - 5, one-based
    verdict = BoundaryVerdict.CONVERGES if tail < OSC_TOL else BoundaryVerdict.NO_CONVERGENCE_DETECTED
    return RadialProbeReport(float(theta), radii, v, osc, verdict, tail)


@dataclass(frozen=True, eq=False)
class StolzProbeReport:
    theta: float
    aperture: float
    paths: dict = field(repr=False)
    tail_oscillations: dict
    limit_spread: float
    verdict: BoundaryVerdict

    @property
    def limit(self) -> complex:
        return complex(self.paths["radial"][-1])


def stolz_probe(f, theta: float, aperture: float, depth: int = 30) -> StolzProbeReport:
    """Approach ``e^{i theta}`` along the radius and the rays ``(1 - t e^{+-i aperture/2}) e^{i theta}``."""
    _check_depth(depth)
    if not 0 < aperture <= 1.2:
        raise ValueError("aperture must lie in (0, 1.2] radians")
    t = 2.0 ** (-np.arange(1, depth + 1))
    xi = np.exp(1j * theta)
    half = aperture / 2
    paths = {}
    for name, rot in (("radial", 1.0), ("upper", np.exp(1j * half)), ("lower", np.exp(-1j * half))):
        paths[name] = _evaluate_path(f, (1 - t * rot) * xi)
    tails = {name: float(tail_oscillation(v)[depth - 6]) for name, v in paths.items()}
    ends = np.array([v[-1] for v in paths.values()])
    spread = float(np.max(np.abs(ends[:, None] - ends[None, :])))
    ok = all(x < OSC_TOL for x in tails.values()) and spread < OSC_TOL
    verdict = BoundaryVerdict.CONVERGES if ok else BoundaryVerdict.NO_CONVERGENCE_DETECTED
    return StolzProbeReport(float(theta), float(aperture), paths, tails, spread, verdict)


def gap_series_eval(terms: int, z):
    """Lacunary sum ``sum_{n<terms} z^(2^n)`` by repeated squaring."""
    if not 0 <= terms <= MAX_GAP_TERMS:
        raise ValueError(f"terms must lie in 0..{MAX_GAP_TERMS}")
    zz = np.asarray(z, dtype=np.complex128)
    if np.any(np.abs(zz) >= 1):
        raise DomainError("gap series is evaluated in the open disk only")
    out = _backend.gap_series(zz, terms)
    return out.item() if zz.ndim == 0 else out


def gap_series_norm_sq(terms: int, alpha: float = 0.0) -> float:
    """``||sum_{n<terms} z^(2^n)||^2`` in A^2_alpha from the monomial norm table."""
    return float(np.sum(monomial_norms_sq(alpha, 2.0 ** np.arange(terms))))


class GapSeries:
    def __init__(self, terms: int = 26):
        self.terms = terms

    def __call__(self, z):
        return gap_series_eval(self.terms, z)


# ---- rescaled kernel factorization --------------------------------------------


def doublestar_ratio(alpha: float, phi: MoebiusMap, z, w):
    """``R(z,w) = phi'(a) (z-a)^2 phi(z) K^{alpha-1,phi}(z,w) / (1 - z conj(w))^{-alpha}``."""
    z = np.asarray(z, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    a = phi.a
    pz = _map_value(phi, z)
    sub = (1 - pz * np.conj(_map_value(phi, w))) * np.power(1 - z * np.conj(w), -(alpha + 1))
    base = np.power(1 - z * np.conj(w), -alpha)
    return _map_derivative(phi, a) * (z - a) ** 2 * pz * sub / base


def doublestar_display(alpha: float, phi: MoebiusMap, z, w):
    """The closed form displayed alongside the factorization, divided by ``(1 - z conj(w))^{-alpha}``:
    ``(1-|a|^2) / ((1 - conj(a) z)(1 - a conj(w))) * (a - z)/(1 - conj(a) z) * (z - a)^2``.

    It differs from the ratio by a constant:
    ``doublestar_ratio = -xi^2 / (1 - |a|^2) * doublestar_display``.
    """
    z = np.asarray(z, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    a = phi.a
    return (1 - abs(a) ** 2) / ((1 - np.conj(a) * z) * (1 - a * np.conj(w))) * (a - z) / (1 - np.conj(a) * z) * (z - a) ** 2


@dataclass(frozen=True, eq=False)
class FactorizationReport:
    alpha: float
    a: complex
    tuples: np.ndarray = field(repr=False)
    defects: np.ndarray = field(repr=False)

    @property
    def max_defect(self) -> float:
        return float(np.max(self.defects)) if self.defects.size else 0.0


def random_tuples(n: int, seed: int, radius: float = 0.6, avoid: complex | None = None, margin: float = POINT_MARGIN):
    """``n`` tuples ``(z1, z2, w1, w2)`` uniform in the disk of ``radius``, z's kept ``margin`` away from ``avoid``."""
    rng = np.random.default_rng(seed)
    out = np.empty((n, 4), dtype=np.complex128)
    for i in range(n):
        while True:
            r = radius * np.sqrt(rng.uniform(size=4))
            p = r * np.exp(2j * np.pi * rng.uniform(size=4))
            if avoid is None or np.all(np.abs(p[:2] - avoid) >= margin):
                break
        out[i] = p
    return out


def doublestar_factorization_check(alpha: float, phi: MoebiusMap, point_tuples) -> FactorizationReport:
    """Cross-ratio defects ``|R(z1,w1) R(z2,w2) - R(z1,w2) R(z2,w1)|``; zero iff ``R`` is rank one."""
    if not alpha > 0:
        raise ValueError("alpha must be positive so that (1 - z conj(w))^{-alpha} is a kernel")
    tup = np.asarray(point_tuples, dtype=np.complex128).reshape(-1, 4)
    z1, z2, w1, w2 = tup.T
    if np.any(np.abs(tup[:, :2] - phi.a) < POINT_MARGIN):
        raise DomainError(f"z points must stay {POINT_MARGIN} away from a = {phi.a}")
    if np.any(np.abs(tup) >= 1):
        raise DomainError("points must lie in the open unit disk")
    R = lambda z, w: doublestar_ratio(alpha, phi, z, w)  # noqa: E731
    defects = np.abs(R(z1, w1) * R(z2, w2) - R(z1, w2) * R(z2, w1))
    return FactorizationReport(alpha, phi.a, tup, defects)


# ---- cyclicity ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CyclicityReport:
    degrees: np.ndarray
    residuals: np.ndarray
    n_work: int
    excluded: int
    out_of_range: float
    verdict: str


def cyclicity_residual_probe(
    psi: PowerSeriesPoly,
    space: BergmanSpaceModel,
    phi,
    degrees,
    buffer: int = DEFAULT_BUFFER,
) -> CyclicityReport:
    """``min_p ||1 - psi p||`` over polynomials of degree <= d, in the norm of H^alpha(phi).

    The norm is ``<M^+ g, g>`` with ``M = I - T_phi T_phi^*`` on the first
    ``space.truncation + 1`` basis vectors; eigencomponents below 1e-8 are dropped.
    Residuals come from suffix sums of squared coordinates in one complete QR,
    so they are nonincreasing in ``d`` exactly.
    """
    degrees = np.asarray(sorted(int(d) for d in degrees))
    if degrees.size == 0 or degrees[0] < 0:
        raise ValueError("degrees must be nonnegative")
    n_work = space.truncation
    if degrees[-1] + max(psi.degree, 0) > n_work - buffer:
        raise ValueError("max degree exceeds the trusted range truncation - buffer")
    if psi.degree < 0:
        raise ValueError("psi is identically zero")
    M = defect_matrix(space, phi, n_work, buffer).entries
    lam, V = np.linalg.eigh(M)
    keep = lam >= EIG_CUTOFF
    excluded = int(np.count_nonzero(~keep))
    size = n_work + 1
    nrm = space.norms[:size]
    b = np.zeros(size, dtype=np.complex128)
    b[0] = 1.0  # e-coordinates of the constant 1
    proj = V.conj().T @ b
    out_of_range = float(np.linalg.norm(proj[~keep])) if excluded else 0.0
    if not keep.any() or out_of_range > RANGE_TOL:
        return CyclicityReport(degrees, np.full(degrees.size, np.nan), n_work, excluded, out_of_range, "INCONCLUSIVE")
    W = (V[:, keep] / np.sqrt(lam[keep])).conj().T
    dmax = int(degrees[-1])
    A = np.empty((size, dmax + 1), dtype=np.complex128)
    for j in range(dmax + 1):
        A[:, j] = (PowerSeriesPoly.monomial(j) * psi).coefficients(size) * nrm
    Q, _ = np.linalg.qr(W @ A, mode="complete")
    c = np.abs(Q.conj().T @ (W @ b)) ** 2
    suffix = np.cumsum(c[::-1])[::-1]
    res = np.sqrt(np.append(suffix, 0.0)[degrees + 1])
    return CyclicityReport(degrees, res, n_work, excluded, out_of_range, "OK")
