"""Desk-scale acceptance suite.

Each criterion returns a :class:`CriterionResult` whose ``payload`` is a
deterministic, JSON-encodable record of what was measured. Tolerances are fixed
here and echoed in every payload.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import BlaschkeProduct, MoebiusMap, PowerSeriesPoly, min_pairwise_distance, poly
from .bergman import BergmanSpaceModel, GeneralizedBergman, SubBergman, kernel_eval, kernel_from_norms
from .boundary import (
    BoundaryVerdict,
    GapSeries,
    SmirnovQuotient,
    cyclicity_residual_probe,
    doublestar_factorization_check,
    doublestar_ratio,
    gap_series_norm_sq,
    radial_probe,
    random_tuples,
)
from .operators import (
    defect_action_explicit,
    defect_action_matrix,
    defect_matrix,
    range_mapping_report,
    toeplitz_conj_blaschke_explicit,
    toeplitz_conj_matrix,
)
from .pick import Verdict, cnp_oneminus_test, cnp_witness_search, oneminus_matrix, trial_points
from .reporting import dumps


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    summary: str
    payload: dict
    seconds: float
    time_limit: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:>2}. {self.name}: {self.summary} ({self.seconds:.2f}s / limit {self.time_limit:g}s)"


def _disk_points(rng, n, radius):
    return radius * np.sqrt(rng.uniform(size=n)) * np.exp(2j * np.pi * rng.uniform(size=n))


# ---- 1 ------------------------------------------------------------------------

def kernel_consistency(seed: int = 1):
    tol, terms = 1e-9, 201
    rng = np.random.default_rng(seed)
    errs = {}
    for alpha in (0.0, 0.5, 1.0, 2.0):
        z = _disk_points(rng, 50, 0.6)
        w = _disk_points(rng, 50, 0.6)
        closed = kernel_eval(GeneralizedBergman(alpha + 2), z, w)
        series = np.array([kernel_from_norms(alpha, zi, wi, terms) for zi, wi in zip(z, w)])
        errs[str(alpha)] = float(np.max(np.abs(closed - series)))
    worst = max(errs.values())
    payload = {"seed": seed, "tol": tol, "N": terms - 1, "max_error_by_alpha": errs, "max_error": worst}
    return worst <= tol, f"max |closed - norm series| = {worst:.2e} (tol {tol:g})", payload


# ---- 2 ------------------------------------------------------------------------

GRID = np.array([0.0, 0.3, -0.45 + 0.2j, 0.6j, 0.42 - 0.42j])


def defect_kernel_identity():
    tol, N, buffer = 1e-6, 150, 50
    n = np.arange(N + 1)
    errs = {}
    for alpha in (0.0, 1.0):
        space = BergmanSpaceModel(alpha, N)
        norms_sq = space.norms**2
        for a in (0.0, 0.4 + 0.2j):
            phi = MoebiusMap(1.0, a)
            D = defect_matrix(space, phi, N, buffer)
            k = SubBergman(alpha, phi)
            worst = 0.0
            for w in GRID:
                out = D.apply(PowerSeriesPoly(np.conj(w) ** n / norms_sq))
                worst = max(worst, float(np.max(np.abs(out(GRID) - kernel_eval(k, GRID, np.full(GRID.shape, w))))))
            errs[f"alpha={alpha},a={a}"] = worst
    m = max(errs.values())
    payload = {"tol": tol, "N": N, "buffer": buffer, "grid": GRID, "max_error_by_case": errs, "max_error": m}
    return m <= tol, f"max |(I-TT*)K_w - K^(alpha,phi)_w| = {m:.2e} (tol {tol:g})", payload


# ---- 3, 4 ---------------------------------------------------------------------

def lemma_cases(seed: int = 3, count: int = 20):
    """Random ``(f, B, points)`` triples: deg f <= 20, <= 3 zeros in |a| <= 0.6, 0.1 apart."""
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(count):
        deg = int(rng.integers(0, 21))
        f = PowerSeriesPoly(rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1))
        order = int(rng.integers(1, 4))
        while True:
            zeros = _disk_points(rng, order, 0.6)
            if min_pairwise_distance(zeros) >= 0.1:
                break
        B = BlaschkeProduct(np.exp(2j * np.pi * rng.uniform()), tuple(zeros))
        pts = []
        while len(pts) < 200:
            p = _disk_points(rng, 1, 0.7)[0]
            if np.all(np.abs(p - zeros) >= 0.05):
                pts.append(p)
        cases.append((f, B, np.array(pts)))
    return cases


def lemma_dual_path(seed: int = 3):
    tol, n_work = 1e-8, 300
    space = BergmanSpaceModel(0.0, 40)
    errs = []
    for f, B, pts in lemma_cases(seed):
        explicit = toeplitz_conj_blaschke_explicit(f, B, space)(pts)
        matrix = toeplitz_conj_matrix(f, B, space, n_work)(pts)
        errs.append(float(np.max(np.abs(explicit - matrix))))
    # regression cases
    pts = lemma_cases(seed, 1)[0][2]
    z2 = poly(0, 0, 1)
    bz = BlaschkeProduct(1.0, (0.0,))
    reg_z = max(
        float(np.max(np.abs(toeplitz_conj_blaschke_explicit(z2, bz, space)(pts) - 2 * pts / 3))),
        float(np.max(np.abs(toeplitz_conj_matrix(z2, bz, space, n_work)(pts) - 2 * pts / 3))),
    )
    bm = MoebiusMap(1.0, 0.5)
    reg_b = max(
        float(np.max(np.abs(toeplitz_conj_blaschke_explicit(poly(1), bm, space)(pts) - 0.5))),
        float(np.max(np.abs(toeplitz_conj_matrix(poly(1), bm, space, n_work)(pts) - 0.5))),
    )
    m = max(errs)
    ok = m <= tol and reg_z <= tol and reg_b <= tol
    payload = {
        "seed": seed, "tol": tol, "n_work": n_work, "errors": errs, "max_error": m,
        "regression_conj_z_on_z2": reg_z, "regression_conj_B_on_1": reg_b,
    }
    return ok, f"max |explicit - matrix| = {m:.2e}, regressions {reg_z:.1e}/{reg_b:.1e} (tol {tol:g})", payload


def antiderivative_invariance(seed: int = 3):
    tol = 1e-10
    offsets = (1.0, 1 + 1j, -3j)
    space = BergmanSpaceModel(0.0, 40)
    worst = 0.0
    for f, B, pts in lemma_cases(seed):
        base = toeplitz_conj_blaschke_explicit(f, B, space)(pts)
        for c in offsets:
            shifted = toeplitz_conj_blaschke_explicit(f, B, space, antiderivative_constant=c)(pts)
            worst = max(worst, float(np.max(np.abs(shifted - base))))
    payload = {"seed": seed, "tol": tol, "offsets": offsets, "max_difference": worst}
    return worst <= tol, f"max output change under F -> F + c = {worst:.2e} (tol {tol:g})", payload


# ---- 5 ------------------------------------------------------------------------

STAR_PAIRS = (((1,), (1,)), ((1,), (1, -0.5)), ((1, -1), (1, -0.3)))


def star_dual_path(seed: int = 5):
    tol, closed_tol, degree = 1e-7, 1e-10, 60
    space = BergmanSpaceModel(0.0, 200)
    pts = _disk_points(np.random.default_rng(seed), 100, 0.6)
    errs = {}
    closed_err = None
    for g, p in STAR_PAIRS:
        for a in (0.3, 0.5):
            phi = MoebiusMap(1.0, a)
            gamma, psi = poly(*g), poly(*p)
            explicit = defect_action_explicit(gamma, psi, phi, space, degree)(pts)
            matrix = defect_action_matrix(gamma, psi, phi, space, degree)(pts)
            errs[f"gamma={g},psi={p},a={a}"] = float(np.max(np.abs(explicit - matrix)))
            if g == (1,) and p == (1,) and a == 0.5:
                closed_err = float(np.max(np.abs(explicit - 0.75 / (1 - 0.5 * pts))))
    m = max(errs.values())
    payload = {"seed": seed, "tol": tol, "closed_form_tol": closed_tol, "degree": degree, "errors": errs,
               "max_error": m, "closed_form_error": closed_err}
    ok = m <= tol and closed_err <= closed_tol
    return ok, f"max |explicit - matrix| = {m:.2e} (tol {tol:g}); closed form err {closed_err:.1e} (tol {closed_tol:g})", payload


# ---- 6 ------------------------------------------------------------------------

def cnp_dichotomy(seed: int = 6):
    det_tol, psd_floor = 1e-12, -1e-10
    F = oneminus_matrix(GeneralizedBergman(2.0), np.array([0.5, -0.5]))
    det = float(np.linalg.det(F).real)
    rep = cnp_oneminus_test(GeneralizedBergman(2.0), [0.5, -0.5])
    part_a = abs(det + 0.125) <= det_tol and rep.verdict is Verdict.NOT_PSD

    worst = {}
    for alpha in (-0.5, 0.0):
        for a in (0.0, 0.3, 0.5j):
            k = SubBergman(alpha, MoebiusMap(1.0, a))
            lam = []
            for t in range(100):
                r = cnp_oneminus_test(k, trial_points(seed, t, 6))
                lam.append((r.min_eigenvalue, r.verdict))
            worst[f"alpha={alpha},a={a}"] = {
                "min_eigenvalue": min(x[0] for x in lam),
                "all_psd": all(v is Verdict.PSD for _, v in lam),
            }
    part_b = all(v["all_psd"] and v["min_eigenvalue"] >= psd_floor for v in worst.values())

    wit = cnp_witness_search(SubBergman(0.0, BlaschkeProduct(1.0, (0.0, 0.4))), 3, 1000, seed)
    part_c = wit is not None
    payload = {
        "seed": seed, "det_tol": det_tol, "psd_floor": psd_floor,
        "a": {"determinant": det, "verdict": rep.verdict, "min_eigenvalue": rep.min_eigenvalue},
        "b": worst,
        "c": None if wit is None else {"trial": wit.trial, "points": wit.points, "min_eigenvalue": wit.min_eigenvalue},
    }
    summary = (f"(a) det = {det:.15f} {rep.verdict.value}; (b) min lambda = "
               f"{min(v['min_eigenvalue'] for v in worst.values()):.1e}; (c) witness "
               + (f"at trial {wit.trial}" if wit else "not found"))
    return part_a and part_b and part_c, summary, payload


# ---- 7 ------------------------------------------------------------------------

def doublestar_factorization(seed: int = 7):
    tol, closed_tol = 1e-9, 1e-10
    defects = {}
    for i, alpha in enumerate((0.5, 1.0, 2.0)):
        for j, a in enumerate((0.0, 0.3, 0.5j)):
            phi = MoebiusMap(1.0, a)
            tup = random_tuples(200, seed + 10 * i + j, avoid=a)
            defects[f"alpha={alpha},a={a}"] = doublestar_factorization_check(alpha, phi, tup).max_defect
    m = max(defects.values())
    tup = random_tuples(200, seed)
    z, w = tup[:, 0], tup[:, 2]
    R = doublestar_ratio(1.0, MoebiusMap(1.0, 0.0), z, w)
    closed_err = float(np.max(np.abs(R - (-z**3))))
    payload = {"seed": seed, "tol": tol, "closed_form_tol": closed_tol, "max_defect_by_case": defects,
               "max_defect": m, "closed_form": "-z^3", "closed_form_error": closed_err,
               "error_against_plus_z3": float(np.max(np.abs(R - z**3)))}
    ok = m <= tol and closed_err <= closed_tol
    return ok, f"max cross-ratio defect = {m:.2e} (tol {tol:g}); |R + z^3| = {closed_err:.2e} (tol {closed_tol:g})", payload


# ---- 8 ------------------------------------------------------------------------

SMIRNOV_EXAMPLES = (
    ((1, -1), (1,)),
    ((1,), (1, -0.5)),
    ((1, 0, 1), (2, 1)),
    ((-0.5j, 0, 0, 1), (1, 0.3, -0.2)),
    ((0.2, 1j, 0.5), (3, -1)),
)


def boundary_dichotomy(seed: int = 8, depth: int = 30):
    osc_tol, gap_osc, norm_cap = 1e-3, 0.5, 2.0
    angles = np.random.default_rng(seed).uniform(0, 2 * np.pi, 64)
    smirnov = []
    for g, p in SMIRNOV_EXAMPLES:
        q = SmirnovQuotient(poly(*g), poly(*p))
        reps = [radial_probe(q, th, depth) for th in angles]
        smirnov.append({
            "gamma": g, "psi": p, "min_boundary_psi": q.min_denominator,
            "converges": sum(r.verdict is BoundaryVerdict.CONVERGES for r in reps),
            "max_tail": max(r.tail_oscillation for r in reps),
        })
    part_a = all(s["converges"] == 64 and s["max_tail"] < osc_tol for s in smirnov)
    gap = GapSeries(26)
    tails = [radial_probe(gap, th, depth).tail_oscillation for th in angles]
    wild = sum(t > gap_osc for t in tails)
    nsq = gap_series_norm_sq(26)
    part_b = wild >= 32 and nsq <= norm_cap
    payload = {"seed": seed, "depth": depth, "osc_tol": osc_tol, "angles": angles, "smirnov": smirnov,
               "gap": {"terms": 26, "tails": tails, "count_above": wild, "norm_sq": nsq}}
    summary = (f"(a) {sum(s['converges'] for s in smirnov)}/320 converge; "
               f"(b) gap series wild at {wild}/64 angles, norm^2 = {nsq:.4f}")
    return part_a and part_b, summary, payload


# ---- 9 ------------------------------------------------------------------------

def cyclicity_sanity():
    zero_tol, floor = 1e-12, 1 - 1e-6
    space = BergmanSpaceModel(0.0, 200)
    r1 = cyclicity_residual_probe(poly(1), space, MoebiusMap(1.0, 0.3), [0])
    rz = cyclicity_residual_probe(poly(0, 1), space, MoebiusMap(1.0, 0.0), range(41))
    rc = cyclicity_residual_probe(poly(1, -0.5), space, MoebiusMap(1.0, 0.3), range(31))
    res = rc.residuals
    ok1 = r1.verdict == "OK" and r1.residuals[0] <= zero_tol
    ok2 = rz.verdict == "OK" and bool(np.all(rz.residuals >= floor))
    ok3 = rc.verdict == "OK" and bool(np.all(np.diff(res) < 0)) and res[-1] < 0.05
    payload = {"n_work": 200, "psi_one": r1.residuals, "psi_z": rz.residuals, "psi_1_minus_half_z": res,
               "excluded": [r1.excluded, rz.excluded, rc.excluded]}
    summary = (f"psi=1: {r1.residuals[0]:.1e}; psi=z: min {rz.residuals.min():.6f}; "
               f"psi=1-z/2: {res[0]:.3f} -> {res[-1]:.1e} strictly decreasing={bool(np.all(np.diff(res) < 0))}")
    return ok1 and ok2 and ok3, summary, payload


# ---- 10 -----------------------------------------------------------------------

def range_mapping_samples(seed: int = 10, count: int = 100, max_degree: int = 50, alpha: float = 1.0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        d = int(rng.integers(0, max_degree + 1))
        x = rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1)
        out.append(BergmanSpaceModel(alpha, max(d, 1)).from_orthonormal(x))
    return out


def range_mapping(seed: int = 10):
    rep = range_mapping_report(BergmanSpaceModel(1.0, 50), MoebiusMap(1.0, 0.4), range_mapping_samples(seed))
    payload = {"seed": seed, "threshold": rep.threshold, "n_work": rep.n_work, "bucket_max": rep.bucket_max,
               "spread": rep.spread, "max_ratio": rep.max_ratio, "min_ratio": float(rep.ratios.min())}
    return rep.bounded, f"ratios in [{rep.ratios.min():.3f}, {rep.max_ratio:.3f}], bucket spread {rep.spread:.3f} (< {rep.threshold:g})", payload


# ---- registry -----------------------------------------------------------------

CRITERIA = {
    1: ("Kernel consistency", kernel_consistency, 1.0),
    2: ("Defect-kernel identity", defect_kernel_identity, 30.0),
    3: ("Lemma dual path", lemma_dual_path, 30.0),
    4: ("Antiderivative invariance", antiderivative_invariance, 30.0),
    5: ("Defect action dual path", star_dual_path, 10.0),
    6: ("CNP dichotomy", cnp_dichotomy, 60.0),
    7: ("Rescaled kernel factorization", doublestar_factorization, 5.0),
    8: ("Boundary dichotomy", boundary_dichotomy, 10.0),
    9: ("Cyclicity probe sanity", cyclicity_sanity, 60.0),
    10: ("Range-mapping evidence", range_mapping, 30.0),
}
RANDOMIZED = (1, 3, 4, 5, 6, 7, 8, 10)
DETERMINISM_LIMIT = 300.0  # whole-suite budget


def run_criterion(number: int) -> CriterionResult:
    if number == 11:
        return determinism()
    name, fn, limit = CRITERIA[number]
    t0 = time.perf_counter()
    ok, summary, payload = fn()
    dt = time.perf_counter() - t0
    return CriterionResult(number, name, bool(ok) and dt < limit, summary, payload, dt, limit)


def determinism() -> CriterionResult:
    t0 = time.perf_counter()
    same = {}
    for n in RANDOMIZED:
        fn = CRITERIA[n][1]
        same[n] = dumps(fn()[2]).encode() == dumps(fn()[2]).encode()
    dt = time.perf_counter() - t0
    ok = all(same.values()) and dt < DETERMINISM_LIMIT
    return CriterionResult(11, "Determinism", ok, f"{sum(same.values())}/{len(same)} payloads byte-identical on re-run",
                           {"identical": same}, dt, DETERMINISM_LIMIT)


def worker_count() -> int:
    env = os.environ.get("SUBBERGMAN_THREADS", "")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_all(numbers=None, workers: int | None = None) -> list[CriterionResult]:
    numbers = list(numbers) if numbers else list(CRITERIA) + [11]
    workers = worker_count() if workers is None else workers
    if workers <= 1:
        return [run_criterion(n) for n in numbers]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_criterion, numbers))
