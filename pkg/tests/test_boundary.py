import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import disk_points
from subbergman.analytic import MoebiusMap, PowerSeriesPoly, poly
from subbergman.bergman import BergmanSpaceModel
from subbergman.boundary import (
    BoundaryVerdict,
    GapSeries,
    SmirnovQuotient,
    cyclicity_residual_probe,
    doublestar_display,
    doublestar_factorization_check,
    doublestar_ratio,
    gap_series_eval,
    gap_series_norm_sq,
    radial_probe,
    random_tuples,
    stolz_probe,
    tail_oscillation,
)
from subbergman.errors import DomainError, ProbeError

CONV = BoundaryVerdict.CONVERGES
NOCONV = BoundaryVerdict.NO_CONVERGENCE_DETECTED


# ---- Smirnov quotient ----------------------------------------------------------


def test_smirnov_quotient_certificates():
    q = SmirnovQuotient(poly(1, -1), poly(2, 1))
    assert q.sup_numerator == pytest.approx(2)
    assert q.sup_denominator == pytest.approx(3)
    assert q.min_denominator == pytest.approx(1, abs=1e-12)
    assert q(0.5) == pytest.approx(0.5 / 2.5)


def test_smirnov_quotient_zero_denominator():
    with pytest.raises(ValueError):
        SmirnovQuotient(poly(1), PowerSeriesPoly.zero())


# ---- oscillation / probes --------------------------------------------------------


def test_tail_oscillation_definition():
    v = np.array([0, 3, 1, 1.5, 1.4])
    osc = tail_oscillation(v)
    expected = [max(abs(v[k] - v[l]) for k in range(K, 5) for l in range(K, 5)) for K in range(5)]
    np.testing.assert_allclose(osc, expected)


@given(st.lists(st.complex_numbers(max_magnitude=1e3), min_size=2, max_size=40))
def test_tail_oscillation_monotone(vals):
    osc = tail_oscillation(np.array(vals))
    assert np.all(np.diff(osc) <= 0)
    assert osc[-1] == 0


def test_radial_polynomial_limit():
    rep = radial_probe(SmirnovQuotient(poly(1, -1), poly(1)), 0.0)
    assert rep.verdict is CONV
    assert abs(rep.limit) < 1e-8
    np.testing.assert_allclose(rep.radii, 1 - 2.0 ** -np.arange(1, 31))


def test_radial_geometric_at_minus_one():
    rep = radial_probe(lambda z: 1 / (1 - z), math.pi)
    assert rep.verdict is CONV
    assert rep.limit == pytest.approx(0.5, abs=1e-8)


def test_radial_oscillation_is_monotone_for_gap_series():
    rep = radial_probe(GapSeries(), 1.234)
    assert np.all(np.diff(rep.oscillation) <= 0)


def test_radial_gap_series_mostly_diverges():
    angles = np.random.default_rng(8).uniform(0, 2 * np.pi, 64)
    bad = [radial_probe(GapSeries(26), t).tail_oscillation > 0.5 for t in angles]
    assert sum(bad) >= 32


def test_radial_depth_bounds():
    with pytest.raises(ValueError):
        radial_probe(lambda z: z, 0.0, depth=5)
    with pytest.raises(ValueError):
        radial_probe(lambda z: z, 0.0, depth=41)


def test_radial_pole_on_ray_is_reported():
    with np.errstate(divide="ignore", invalid="ignore"):
        with pytest.raises(ProbeError):
            radial_probe(lambda z: 1 / (z - 0.75), 0.0, depth=10)


@pytest.mark.parametrize(
    "g,p",
    [((1,), (1,)), ((1, -1), (1,)), ((1,), (1, -0.5)), ((0.3, 1j, -0.2), (2, 0.5, 0.5j)), ((1, 1, 1, 1), (1, 0.9j))],
)
def test_smirnov_quotients_converge_everywhere(g, p):
    q = SmirnovQuotient(poly(*g), poly(*p))
    assert q.min_denominator > 0
    for t in np.random.default_rng(1).uniform(0, 2 * np.pi, 16):
        assert radial_probe(q, t).verdict is CONV


def test_stolz_constant():
    rep = stolz_probe(lambda z: np.ones_like(z), 0.4, 1.0)
    assert rep.verdict is CONV
    assert rep.limit == 1
    assert set(rep.paths) == {"radial", "upper", "lower"}


def test_stolz_quotient_limit():
    rep = stolz_probe(SmirnovQuotient(poly(1), poly(1, -0.5)), 0.0, 1.0)
    assert rep.verdict is CONV
    assert rep.limit == pytest.approx(2, abs=1e-8)
    assert rep.limit_spread < 1e-8


def test_stolz_rays_stay_inside_disk():
    rep = stolz_probe(lambda z: z, 2.0, 1.2, depth=12)
    for v in rep.paths.values():
        assert np.all(np.abs(v) < 1)


def test_stolz_gap_series_mostly_diverges():
    angles = np.random.default_rng(3).uniform(0, 2 * np.pi, 32)
    verdicts = [stolz_probe(GapSeries(), t, 1.0).verdict for t in angles]
    assert verdicts.count(NOCONV) > 16


def test_stolz_aperture_bounds():
    with pytest.raises(ValueError):
        stolz_probe(lambda z: z, 0.0, 0.0)
    with pytest.raises(ValueError):
        stolz_probe(lambda z: z, 0.0, 1.5)


# ---- gap series ----------------------------------------------------------------


def test_gap_series_examples():
    assert gap_series_eval(26, 0) == 0
    assert gap_series_eval(3, 0.5) == pytest.approx(0.8125)


def test_gap_series_direct_sum(rng):
    z = disk_points(rng, 20, 0.999)
    direct = sum(z ** (2**n) for n in range(12))
    np.testing.assert_allclose(gap_series_eval(12, z), direct, atol=1e-12)


def test_gap_series_norm_bounded():
    assert gap_series_norm_sq(26) == pytest.approx(sum(1 / (2**n + 1) for n in range(26)))
    assert gap_series_norm_sq(26) <= 2
    assert gap_series_norm_sq(30) - gap_series_norm_sq(26) < 1e-7


def test_gap_series_domain():
    with pytest.raises(DomainError):
        gap_series_eval(5, 1.0)
    with pytest.raises(ValueError):
        gap_series_eval(31, 0.1)


# ---- rescaled kernel factorization ----------------------------------------------


@pytest.mark.parametrize("alpha", [0.5, 1, 2])
@pytest.mark.parametrize("a", [0, 0.3, 0.5j, 0.5])
def test_factorization_rank_one(alpha, a):
    phi = MoebiusMap(np.exp(0.4j), a)
    rep = doublestar_factorization_check(alpha, phi, random_tuples(200, 7, avoid=a))
    assert rep.max_defect < 1e-9


def test_factorization_degenerate_tuple():
    phi = MoebiusMap(1, 0.5)
    rep = doublestar_factorization_check(1.0, phi, [[0.1, 0.1, 0.2j, -0.3]])
    assert rep.max_defect == 0


def test_ratio_equals_rotated_display(rng):
    z, w = disk_points(rng, 30, 0.6), disk_points(rng, 30, 0.6)
    for xi in (1, 1j, np.exp(2.1j)):
        for a in (0, 0.3, -0.2 + 0.5j):
            phi = MoebiusMap(xi, a)
            c = -(phi.xi**2) / (1 - abs(a) ** 2)
            np.testing.assert_allclose(doublestar_ratio(1.5, phi, z, w), c * doublestar_display(1.5, phi, z, w), atol=1e-13)


def test_ratio_at_origin_is_z_cubed(rng):
    # phi(z) = -z: phi'(0) z^2 phi(z) (1 - z conj w) = z^3 (1 - z conj w), divided by the same kernel factor
    z, w = disk_points(rng, 30, 0.6), disk_points(rng, 30, 0.6)
    np.testing.assert_allclose(doublestar_ratio(1.0, MoebiusMap(1, 0), z, w), z**3, atol=1e-14)


def test_factorization_point_checks():
    phi = MoebiusMap(1, 0.3)
    with pytest.raises(DomainError):
        doublestar_factorization_check(1.0, phi, [[0.31, 0.1, 0.2, 0.2]])
    with pytest.raises(ValueError):
        doublestar_factorization_check(0.0, phi, [[0.1, 0.2, 0.2, 0.2]])


def test_random_tuples_respect_margin():
    t = random_tuples(300, 1, avoid=0.2)
    assert t.shape == (300, 4)
    assert np.all(np.abs(t[:, :2] - 0.2) >= 0.05)
    assert np.all(np.abs(t) <= 0.6)


# ---- cyclicity -----------------------------------------------------------------


def test_cyclicity_of_one():
    rep = cyclicity_residual_probe(poly(1), BergmanSpaceModel(0, 200), MoebiusMap(1, 0.3), [0, 5])
    assert rep.residuals[0] <= 1e-12
    assert rep.verdict == "OK"


def test_cyclicity_of_z_blocked_by_point_evaluation():
    rep = cyclicity_residual_probe(poly(0, 1), BergmanSpaceModel(0, 200), MoebiusMap(1, 0), range(41))
    assert np.all(rep.residuals >= 1 - 1e-6)


def test_cyclicity_zero_free_decreases():
    rep = cyclicity_residual_probe(poly(1, -0.5), BergmanSpaceModel(0, 200), MoebiusMap(1, 0.3), range(31))
    assert np.all(np.diff(rep.residuals) < 0)
    assert rep.residuals[30] < 0.05
    assert rep.n_work == 200 and rep.excluded == 0


@given(st.integers(0, 1000))
def test_cyclicity_residuals_nonincreasing(seed):
    r = np.random.default_rng(seed)
    psi = poly(r.normal(size=3) + 1j * r.normal(size=3))
    a = 0.6 * r.uniform() * np.exp(2j * np.pi * r.uniform())
    rep = cyclicity_residual_probe(psi, BergmanSpaceModel(0, 100), MoebiusMap(1, a), range(0, 20, 3))
    if rep.verdict == "OK":
        assert np.all(np.diff(rep.residuals) <= 0)


def test_cyclicity_validation():
    s = BergmanSpaceModel(0, 100)
    with pytest.raises(ValueError):
        cyclicity_residual_probe(poly(1), s, MoebiusMap(1, 0.3), [60])
    with pytest.raises(ValueError):
        cyclicity_residual_probe(PowerSeriesPoly.zero(), s, MoebiusMap(1, 0.3), [1])
    with pytest.raises(ValueError):
        cyclicity_residual_probe(poly(1), s, MoebiusMap(1, 0.3), [])
