"""Matrix realizations of analytic Toeplitz operators on A^2_alpha, their
defect operators, and the closed-form expressions for ``T_{conj B}`` and
``I - T_phi T_phi^*``.

Matrices act on coordinates in the orthonormal basis ``e_n = z^n / ||z^n||_alpha``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .analytic import (
    Analytic,
    BlaschkeProduct,
    MoebiusMap,
    PowerSeriesPoly,
    RationalFn,
    antiderivative,
    as_series,
    derivative_at,
    min_pairwise_distance,
    series_expand,
    DISTINCT_ZEROS_TOL,
    _map_derivative,
    _map_value,
)
from .bergman import BergmanSpaceModel, monomial_norms, monomial_norms_sq
from .errors import ContractionError

DEFAULT_BUFFER = 50
SPECTRUM_TOL = 1e-10
CLAMP_TOL = 1e-8
CONTRACTION_TOL = 1e-8
SAFE_RADIUS = 0.05
SAFE_NODES = 16


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    entries: np.ndarray = field(repr=False)
    alpha: float
    kind: str = "other"
    n_work: int | None = None

    def __post_init__(self):
        self.entries.setflags(write=False)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def apply(self, f: PowerSeriesPoly) -> PowerSeriesPoly:
        """Apply to a polynomial given in monomial coefficients."""
        nrm = monomial_norms(self.alpha, self.size)
        if f.degree >= self.size:
            raise ValueError(f"input degree {f.degree} exceeds matrix size {self.size}")
        x = f.coefficients(self.size) * nrm
        return PowerSeriesPoly((self.entries @ x) / nrm)

    def operator_norm(self) -> float:
        return float(np.linalg.norm(self.entries, 2))


_ADJOINT_KIND = {"toeplitz": "adjoint", "adjoint": "toeplitz"}


def _symbol_series(symbol, size: int) -> np.ndarray:
    return as_series(symbol, size - 1).coefficients(size)


def toeplitz_matrix(space: BergmanSpaceModel, symbol: Analytic, N: int) -> OperatorMatrix:
    """Multiplication by an analytic symbol on polynomials of degree <= N.

    Entry ``(m, n)`` is ``b_{m-n} ||z^m|| / ||z^n||``.
    """
    if N > space.truncation:
        raise ValueError(f"N = {N} exceeds the space truncation {space.truncation}")
    size = N + 1
    t = _backend.multiplication_matrix(_symbol_series(symbol, size), space.norms[:size], size)
    return OperatorMatrix(t, space.alpha, "toeplitz")


def adjoint(M: OperatorMatrix) -> OperatorMatrix:
    return OperatorMatrix(
        np.ascontiguousarray(M.entries.conj().T), M.alpha, _ADJOINT_KIND.get(M.kind, M.kind), M.n_work
    )


def _check_spectrum(h: np.ndarray, lo: float, hi: float, what: str):
    lam = np.linalg.eigvalsh(h)
    if lam[0] < lo or lam[-1] > hi:
        raise ContractionError(f"{what}: spectrum [{lam[0]:.3e}, {lam[-1]:.3e}] outside [{lo}, {hi}]")


def defect_matrix(space: BergmanSpaceModel, phi: Analytic, N: int, buffer: int = DEFAULT_BUFFER) -> OperatorMatrix:
    """``I - T_phi T_phi^*`` formed on ``N + buffer + 1`` basis vectors, restricted to the leading block.

    Raises ContractionError if the spectrum leaves ``[-1e-10, 1 + 1e-10]``.
    """
    if N > space.truncation:
        raise ValueError(f"N = {N} exceeds the space truncation {space.truncation}")
    if buffer < 0:
        raise ValueError("buffer must be nonnegative")
    n_work = N + buffer
    size = n_work + 1
    t = _backend.multiplication_matrix(_symbol_series(phi, size), monomial_norms(space.alpha, size), size)
    d = np.eye(size) - t @ t.conj().T
    d = d[: N + 1, : N + 1]
    d = 0.5 * (d + d.conj().T)
    _check_spectrum(d, -SPECTRUM_TOL, 1 + SPECTRUM_TOL, "defect matrix")
    return OperatorMatrix(np.ascontiguousarray(d), space.alpha, "defect", n_work)


def defect_sqrt(M: OperatorMatrix) -> OperatorMatrix:
    """Hermitian square root by eigendecomposition.

    Eigenvalues in ``[-1e-8, 0)`` are clamped to zero; anything lower is a
    contraction violation.
    """
    h = 0.5 * (M.entries + M.entries.conj().T)
    lam, v = np.linalg.eigh(h)
    if lam[0] < -CLAMP_TOL:
        raise ContractionError(f"minimum eigenvalue {lam[0]:.3e} below -{CLAMP_TOL}")
    root = (v * np.sqrt(np.clip(lam, 0.0, None))) @ v.conj().T
    root = 0.5 * (root + root.conj().T)
    return OperatorMatrix(np.ascontiguousarray(root), M.alpha, "defect_sqrt", M.n_work)


@dataclass(frozen=True, eq=False)
class DefectApplication:
    input: PowerSeriesPoly
    output: PowerSeriesPoly
    n_work: int
    n_trust: int
    r_max: float
    tail_bound: float


def apply_defect(
    space: BergmanSpaceModel,
    phi: Analytic,
    f: PowerSeriesPoly,
    N: int | None = None,
    buffer: int = DEFAULT_BUFFER,
    r_max: float = 0.7,
) -> DefectApplication:
    """Matrix-side ``(I - T_phi T_phi^*) f`` for a polynomial (or truncated series) ``f``."""
    N = max(f.degree, 1) if N is None else N
    if f.degree > N:
        raise ValueError(f"input degree {f.degree} exceeds N = {N}")
    d = defect_matrix(space, phi, N, buffer)
    out = d.apply(f)
    c = np.abs(out.coefficients(N + 1))
    tail = float(np.max(c[-5:]) * r_max ** (N + 1) / (1 - r_max))
    return DefectApplication(f, out, d.n_work, N, r_max, tail)


# ---- closed forms ------------------------------------------------------------


def _removable_eval(raw, z, centers):
    """Evaluate ``raw`` away from removable singularities.

    Points within SAFE_RADIUS of a center get the Taylor polynomial about that
    center, with coefficients from an FFT of ``raw`` sampled on the circle of
    radius SAFE_RADIUS (direct evaluation cancels catastrophically there).
    """
    zz = np.asarray(z, dtype=np.complex128)
    flat = zz.ravel()
    out = np.empty_like(flat)
    done = np.zeros(flat.shape, dtype=bool)
    omega = np.exp(2j * np.pi * np.arange(SAFE_NODES) / SAFE_NODES)
    scale = SAFE_RADIUS ** -np.arange(SAFE_NODES)
    for c in centers:
        near = (~done) & (np.abs(flat - c) < SAFE_RADIUS)
        if not near.any():
            continue
        taylor = np.fft.fft(raw(c + SAFE_RADIUS * omega)) / SAFE_NODES * scale
        out[near] = _backend.horner(taylor, flat[near] - c)
        done |= near
    if (~done).any():
        out[~done] = raw(flat[~done])
    out = out.reshape(zz.shape)
    return out.item() if zz.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class ToeplitzConjBlaschke:
    """Closed form of ``T_{conj B} f`` on the unweighted Bergman space:

    ``f/B - F B'/B^2 + sum_k F(a_k) / (B'(a_k) (z - a_k)^2)``, ``F' = f``.
    """

    f: PowerSeriesPoly
    F: PowerSeriesPoly
    B: BlaschkeProduct
    residues: np.ndarray = field(repr=False)

    def raw(self, z):
        z = np.asarray(z, dtype=np.complex128)
        b = _map_value(self.B, z)
        out = self.f(z) / b - self.F(z) * _map_derivative(self.B, z) / b**2
        for a, c in zip(self.B.zeros, self.residues):
            out = out + c / (z - a) ** 2
        return out

    def __call__(self, z):
        return _removable_eval(self.raw, z, self.B.zeros)


def toeplitz_conj_blaschke_explicit(
    f: PowerSeriesPoly,
    B: BlaschkeProduct | MoebiusMap,
    space: BergmanSpaceModel,
    antiderivative_constant: complex = 0.0,
) -> ToeplitzConjBlaschke:
    """Closed-form evaluator for ``T_{conj B} f`` (unweighted Bergman space only)."""
    if space.alpha != 0:
        raise ValueError("the antiderivative formula for T_{conj B} holds on A^2_0 only")
    if isinstance(B, MoebiusMap):
        B = BlaschkeProduct.from_moebius(B)
    if B.order > 1 and min_pairwise_distance(B.zeros) < DISTINCT_ZEROS_TOL:
        raise ValueError("Blaschke zeros are nearly coincident")
    F = antiderivative(f, antiderivative_constant)
    res = np.array([F(a) / derivative_at(B, a) for a in B.zeros], dtype=np.complex128)
    return ToeplitzConjBlaschke(f, F, B, res)


def toeplitz_conj_matrix(f: PowerSeriesPoly, B: Analytic, space: BergmanSpaceModel, n_work: int = 300) -> PowerSeriesPoly:
    """``T_B^* f`` through the adjoint of the multiplication matrix."""
    if f.degree > n_work:
        raise ValueError("input degree exceeds the working size")
    work = BergmanSpaceModel(space.alpha, n_work)
    return adjoint(toeplitz_matrix(work, B, n_work)).apply(f)


@dataclass(frozen=True, eq=False)
class DefectActionFormula:
    """``(F phi' phi'(a) (z-a)^2 - F(a) phi^2) / (phi phi'(a) (z-a)^2)`` with ``F(0) = 0``."""

    f: PowerSeriesPoly
    F: PowerSeriesPoly
    phi: MoebiusMap
    tail_bound: float

    def raw(self, z):
        z = np.asarray(z, dtype=np.complex128)
        a = self.phi.a
        p = _map_value(self.phi, z)
        dp = _map_derivative(self.phi, z)
        dpa = derivative_at(self.phi, a)
        Fa = self.F(a)
        sq = (z - a) ** 2
        return (self.F(z) * dp * dpa * sq - Fa * p**2) / (p * dpa * sq)

    def __call__(self, z):
        return _removable_eval(self.raw, z, (self.phi.a,))


def _quotient_series(gamma, psi, degree, domain_radius):
    if gamma.degree < 0:
        return PowerSeriesPoly.zero(), 0.0
    return series_expand(RationalFn(gamma, psi, domain_radius), degree, with_bound=True)


def defect_action_explicit(
    gamma: PowerSeriesPoly,
    psi: PowerSeriesPoly,
    phi: MoebiusMap,
    space: BergmanSpaceModel,
    degree: int,
    domain_radius: float = 0.9,
) -> DefectActionFormula:
    """Closed-form ``(I - T_phi T_phi^*)(gamma/psi)`` for a Moebius ``phi`` on A^2_0."""
    if space.alpha != 0:
        raise ValueError("the closed form for the defect action holds on A^2_0 only")
    if not isinstance(phi, MoebiusMap):
        raise TypeError("the closed form needs a Moebius symbol")
    f, tail = _quotient_series(gamma, psi, degree, domain_radius)
    return DefectActionFormula(f, antiderivative(f, 0.0), phi, tail)


def defect_action_matrix(
    gamma: PowerSeriesPoly,
    psi: PowerSeriesPoly,
    phi: Analytic,
    space: BergmanSpaceModel,
    degree: int,
    N: int | None = None,
    buffer: int = DEFAULT_BUFFER,
    domain_radius: float = 0.9,
) -> PowerSeriesPoly:
    """The same action through ``defect_matrix`` applied to the truncated series of ``gamma/psi``."""
    f, _ = _quotient_series(gamma, psi, degree, domain_radius)
    N = max(degree + 100, 150) if N is None else N
    return defect_matrix(space, phi, N, buffer).apply(f)


# ---- range mapping -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RangeMappingReport:
    alpha_in: float
    alpha_out: float
    n_work: int
    degrees: np.ndarray
    ratios: np.ndarray
    bucket_width: int
    bucket_max: dict
    spread: float
    threshold: float

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios))

    @property
    def bounded(self) -> bool:
        return bool(np.all(np.isfinite(self.ratios)) and self.spread < self.threshold)


def range_mapping_report(
    space_in: BergmanSpaceModel,
    phi: Analytic,
    samples,
    buffer: int = DEFAULT_BUFFER,
    bucket_width: int = 10,
    threshold: float = 10.0,
) -> RangeMappingReport:
    """Ratios ``||D f||_{alpha-1} / ||f||_alpha`` with ``D = (I - T_phi T_phi^*)^{1/2}`` on A^2_alpha.

    Evidence of boundedness only: ``spread`` is the max/min of the per-degree-bucket
    maxima, compared with ``threshold``.
    """
    alpha = space_in.alpha
    if not alpha > 0:
        raise ValueError("range mapping needs alpha > 0 so that A^2_{alpha-1} has an integral norm")
    samples = list(samples)
    N = max(max(f.degree for f in samples), 1)
    n_work = N + buffer
    size = n_work + 1
    work = BergmanSpaceModel(alpha, n_work)
    root = defect_sqrt(defect_matrix(work, phi, n_work, 0)).entries
    nrm_in = work.norms
    nrm_out_sq = monomial_norms_sq(alpha - 1, np.arange(size))
    ratios = np.empty(len(samples))
    for i, f in enumerate(samples):
        x = f.coefficients(size) * nrm_in
        y = root @ x
        c = y / nrm_in
        ratios[i] = np.sqrt(np.sum(np.abs(c) ** 2 * nrm_out_sq)) / np.linalg.norm(x)
    degrees = np.array([f.degree for f in samples])
    buckets: dict = {}
    for d, r in zip(degrees, ratios):
        b = int(d) // bucket_width
        buckets[b] = max(buckets.get(b, 0.0), float(r))
    vals = list(buckets.values())
    spread = max(vals) / min(vals) if min(vals) > 0 else np.inf
    return RangeMappingReport(alpha, alpha - 1, n_work, degrees, ratios, bucket_width, dict(sorted(buckets.items())), spread, threshold)
