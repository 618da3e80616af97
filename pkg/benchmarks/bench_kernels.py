"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from subbergman import _fallback
from subbergman.bergman import monomial_norms

try:
    from subbergman import _core
except ImportError:
    _core = None


def cases(rng):
    coeffs = rng.normal(size=400) + 1j * rng.normal(size=400)
    z = 0.9 * np.sqrt(rng.uniform(size=20_000)) * np.exp(2j * np.pi * rng.uniform(size=20_000))
    den = np.array([1, -0.5, 0.2j], dtype=np.complex128)
    nrm = monomial_norms(1.0, 351)
    small = z[:200].copy()
    return {
        "horner (deg 60, 200 pts)": lambda m: m.horner(coeffs[:61], small),
        "horner (deg 399, 20k pts)": lambda m: m.horner(coeffs, z),
        "series_divide (deg 2000)": lambda m: m.series_divide(coeffs, den, 2000),
        "multiplication_matrix (351)": lambda m: m.multiplication_matrix(coeffs, nrm, 351),
        "gap_series (26 terms, 64 pts)": lambda m: m.gap_series(small[:64], 26),
        "gap_series (26 terms, 20k pts)": lambda m: m.gap_series(z, 26),
    }


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=7)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':34s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for name, run in cases(rng).items():
        tp = best(lambda: run(_fallback), args.repeat) * 1e3
        if _core is None:
            print(f"{name:34s} {tp:10.3f} {'n/a':>10s} {'n/a':>8s}")
            continue
        np.testing.assert_allclose(run(_core), run(_fallback), rtol=1e-10, atol=1e-10)
        tc = best(lambda: run(_core), args.repeat) * 1e3
        print(f"{name:34s} {tp:10.3f} {tc:10.3f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
