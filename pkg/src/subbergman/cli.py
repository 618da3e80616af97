"""``subbergman`` command-line front end.

A job is a JSON object with a ``command`` key plus parameters. Flags are
merged over the job file and the merged job is echoed in the report envelope.
Exit status: 0 on completed runs (INCONCLUSIVE included), 1 on validation
errors, 2 on numerical contract violations.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import __version__
from ._backend import BACKEND
from .analytic import BlaschkeProduct, MoebiusMap, PowerSeriesPoly
from .bergman import (
    BergmanSpaceModel,
    GeneralizedBergman,
    SubBergman,
    kernel_eval,
    kernel_series_oracle,
)
from .boundary import (
    GapSeries,
    SmirnovQuotient,
    cyclicity_residual_probe,
    doublestar_factorization_check,
    radial_probe,
    random_tuples,
    stolz_probe,
)
from .errors import ContractionError, DomainError, ProbeError
from .operators import (
    DEFAULT_BUFFER,
    apply_defect,
    defect_action_explicit,
    defect_action_matrix,
    toeplitz_conj_blaschke_explicit,
    toeplitz_conj_matrix,
)
from .pick import PSD_TOL, PickInstance, cnp_oneminus_test, cnp_witness_search, pick_matrix
from .reporting import cplx, dumps, parse_complex

COMMANDS = (
    "kernel-eval", "defect-apply", "verify-lemma", "verify-star", "pick-test",
    "witness-search", "boundary-probe", "cyclicity", "doublestar-check", "acceptance",
)


class JobError(ValueError):
    pass


# ---- job parsing ----------------------------------------------------------------


def _get(job, key, default=None, required=False):
    if key in job and job[key] is not None:
        return job[key]
    if required:
        raise JobError(f"missing parameter '{key}'")
    return default


def _seed(job):
    seed = _get(job, "seed")
    if seed is None:
        raise JobError("this command is randomized; 'seed' is mandatory")
    return int(seed)


def _poly(v, name):
    if v is None:
        raise JobError(f"missing polynomial '{name}'")
    if not isinstance(v, (list, tuple)):
        v = [v]
    return PowerSeriesPoly(np.array([parse_complex(c) for c in v]))


def _points(v):
    if isinstance(v, str):
        v = [s for s in v.split(";") if s.strip()]
    return np.array([parse_complex(p) for p in v], dtype=np.complex128)


def _symbol(job):
    """Moebius map from ``a``/``xi``, or a Blaschke product from ``zeros``."""
    phi = _get(job, "phi")
    if isinstance(phi, dict):
        job = {**job, **phi}
    xi = parse_complex(_get(job, "xi", 1.0))
    if _get(job, "zeros") is not None:
        zeros = tuple(parse_complex(z) for z in job["zeros"])
        return BlaschkeProduct(xi, zeros, allow_repeated=bool(_get(job, "allow_repeated", False)))
    return MoebiusMap(xi, parse_complex(_get(job, "a", 0.0)))


def _kernel(job):
    desc = _get(job, "kernel", "bergman")
    if isinstance(desc, dict):
        job = {**job, **desc}
        desc = desc.get("type", "bergman")
    desc = str(desc).lower()
    if desc == "hardy":
        return GeneralizedBergman(1.0)
    if desc in ("bergman", "generalized-bergman"):
        s = _get(job, "s")
        if s is None:
            s = float(_get(job, "alpha", 0.0)) + 2
        return GeneralizedBergman(float(s))
    if desc in ("subbergman", "sub-bergman"):
        return SubBergman(float(_get(job, "alpha", 0.0)), _symbol(job))
    raise JobError(f"unknown kernel type '{desc}'")


def _space(job, truncation=200):
    return BergmanSpaceModel(float(_get(job, "alpha", 0.0)), int(_get(job, "truncation", truncation)))


# ---- commands -------------------------------------------------------------------


def cmd_kernel_eval(job):
    k = _kernel(job)
    z = parse_complex(_get(job, "z", required=True))
    w = parse_complex(_get(job, "w", required=True))
    value = kernel_eval(k, z, w)
    payload = {"kernel": k, "z": cplx(z), "w": cplx(w), "value": cplx(value)}
    if isinstance(k, GeneralizedBergman):
        terms = int(_get(job, "terms", 400))
        ref = kernel_series_oracle(k.s, z, w, terms)
        payload["series_oracle"] = {"terms": terms, "value": cplx(ref.value), "tail_bound": ref.tail_bound,
                                    "difference": abs(ref.value - value)}
    return payload, [], {}


def cmd_defect_apply(job):
    space = _space(job)
    f = _poly(_get(job, "f", [1]), "f")
    buffer = int(_get(job, "buffer", DEFAULT_BUFFER))
    N = _get(job, "N")
    res = apply_defect(space, _symbol(job), f, None if N is None else int(N), buffer, float(_get(job, "r_max", 0.7)))
    rows = [{"n": n, "re": c.real, "im": c.imag} for n, c in enumerate(res.output.coeffs)]
    payload = {"output": res.output.coeffs, "n_work": res.n_work, "n_trust": res.n_trust,
               "r_max": res.r_max, "tail_bound": res.tail_bound}
    return payload, rows, {"n_work": res.n_work, "buffer": buffer}


def _eval_points(job, radius, avoid=(), margin=0.05):
    pts = _get(job, "points")
    if pts is not None:
        return _points(pts)
    rng = np.random.default_rng(_seed(job))
    n = int(_get(job, "n_points", 50))
    out = []
    while len(out) < n:
        p = radius * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        if all(abs(p - a) >= margin for a in avoid):
            out.append(p)
    return np.array(out)


def _comparison_rows(pts, explicit, matrix):
    return [{"z_re": z.real, "z_im": z.imag, "explicit_re": e.real, "explicit_im": e.imag,
             "matrix_re": m.real, "matrix_im": m.imag, "abs_diff": abs(e - m)}
            for z, e, m in zip(pts, explicit, matrix)]


def cmd_verify_lemma(job):
    space = BergmanSpaceModel(0.0, 40)
    f = _poly(_get(job, "f", [1]), "f")
    B = _symbol(job)
    if isinstance(B, MoebiusMap):
        B = BlaschkeProduct.from_moebius(B)
    n_work = int(_get(job, "n_work", 300))
    tol = float(_get(job, "tol", 1e-8))
    pts = _eval_points(job, 0.7, B.zeros)
    explicit = toeplitz_conj_blaschke_explicit(f, B, space)(pts)
    matrix = toeplitz_conj_matrix(f, B, space, n_work)(pts)
    diff = float(np.max(np.abs(explicit - matrix)))
    payload = {"blaschke": B, "f": f.coeffs, "points": pts, "explicit": explicit, "matrix": matrix,
               "max_abs_diff": diff, "agree": diff <= tol}
    return payload, _comparison_rows(pts, explicit, matrix), {"n_work": n_work, "tol": tol}


def cmd_verify_star(job):
    space = BergmanSpaceModel(0.0, 200)
    phi = _symbol(job)
    if not isinstance(phi, MoebiusMap):
        raise JobError("verify-star needs a Moebius symbol (a, xi)")
    gamma = _poly(_get(job, "gamma", [1]), "gamma")
    psi = _poly(_get(job, "psi", [1]), "psi")
    degree = int(_get(job, "degree", 60))
    buffer = int(_get(job, "buffer", DEFAULT_BUFFER))
    N = int(_get(job, "N", max(degree + 100, 150)))
    tol = float(_get(job, "tol", 1e-7))
    pts = _eval_points(job, 0.6) if (_get(job, "points") is not None or _get(job, "seed") is not None) \
        else 0.6 * np.exp(2j * np.pi * np.arange(8) / 8) * np.linspace(0.1, 1, 8)
    formula = defect_action_explicit(gamma, psi, phi, space, degree)
    explicit = formula(pts)
    series = defect_action_matrix(gamma, psi, phi, space, degree, N, buffer)
    matrix = series(pts)
    diff = float(np.max(np.abs(explicit - matrix)))
    nshow = int(_get(job, "series_terms", 10))
    payload = {"phi": phi, "gamma": gamma.coeffs, "psi": psi.coeffs, "points": pts, "explicit": explicit,
               "matrix": matrix, "max_abs_diff": diff, "agree": diff <= tol,
               "reference_series": series.coefficients(nshow), "input_tail_bound": formula.tail_bound}
    return payload, _comparison_rows(pts, explicit, matrix), {"degree": degree, "N": N, "n_work": N + buffer,
                                                              "buffer": buffer, "tol": tol}


def cmd_pick_test(job):
    k = _kernel(job)
    pts = _points(_get(job, "points", required=True))
    tol = float(_get(job, "tol", PSD_TOL))
    z0 = parse_complex(_get(job, "z0", 0.0))
    rep = cnp_oneminus_test(k, pts, z0, tol)
    payload = {"kernel": k, "points": pts, "z0": cplx(z0), "min_eigenvalue": rep.min_eigenvalue,
               "verdict": rep.verdict, "determinant": complex(np.linalg.det(rep.matrix)),
               "matrix": rep.matrix, "witness": rep.witness}
    targets = _get(job, "targets")
    if targets is not None:
        W = np.array([[[parse_complex(x) for x in row] for row in m] if isinstance(m, list) and m and isinstance(m[0], list)
                      else parse_complex(m) for m in targets])
        P = pick_matrix(PickInstance(k, pts, W))
        lam = float(np.linalg.eigvalsh(0.5 * (P + P.conj().T))[0])
        payload["pick_matrix"] = {"matrix": P, "min_eigenvalue": lam}
    return payload, [], {"tol": tol}


def cmd_witness_search(job):
    k = _kernel(job)
    seed = _seed(job)
    n = int(_get(job, "n_points", 3))
    trials = int(_get(job, "trials", 1000))
    tol = float(_get(job, "tol", PSD_TOL))
    wit = cnp_witness_search(k, n, trials, seed, tol)
    payload = {"kernel": k, "n_points": n, "trials": trials, "seed": seed, "found": wit is not None,
               "witness": None if wit is None else {"points": wit.points, "min_eigenvalue": wit.min_eigenvalue,
                                                    "trial": wit.trial}}
    return payload, [], {"tol": tol, "search_radius": 0.8}


def _probe_function(job):
    desc = _get(job, "function", {"type": "quotient"})
    if isinstance(desc, str):
        desc = {"type": desc}
    kind = desc.get("type", "quotient")
    if kind == "gap":
        return GapSeries(int(desc.get("terms", _get(job, "terms", 26)))), {"type": "gap", "terms": int(desc.get("terms", 26))}
    if kind == "quotient":
        g = _poly(desc.get("gamma", _get(job, "gamma", [1])), "gamma")
        p = _poly(desc.get("psi", _get(job, "psi", [1])), "psi")
        q = SmirnovQuotient(g, p)
        return q, {"type": "quotient", "gamma": g.coeffs, "psi": p.coeffs, "sup_gamma": q.sup_numerator,
                   "sup_psi": q.sup_denominator, "min_boundary_psi": q.min_denominator}
    raise JobError(f"unknown function type '{kind}'")


def cmd_boundary_probe(job):
    f, desc = _probe_function(job)
    depth = int(_get(job, "depth", 30))
    mode = _get(job, "mode", "radial")
    if _get(job, "theta") is not None:
        angles = np.atleast_1d(np.asarray(_get(job, "theta"), dtype=float))
    else:
        angles = np.random.default_rng(_seed(job)).uniform(0, 2 * np.pi, int(_get(job, "n_angles", 64)))
    results, rows = [], []
    for th in angles:
        if mode == "stolz":
            rep = stolz_probe(f, th, float(_get(job, "aperture", 1.0)), depth)
            results.append({"theta": th, "verdict": rep.verdict, "tail_oscillations": rep.tail_oscillations,
                            "limit_spread": rep.limit_spread, "limit": cplx(rep.limit)})
            for name, vals in rep.paths.items():
                rows += [{"theta": th, "path": name, "k": k + 1, "re": v.real, "im": v.imag} for k, v in enumerate(vals)]
        else:
            rep = radial_probe(f, th, depth)
            results.append({"theta": th, "verdict": rep.verdict, "tail_oscillation": rep.tail_oscillation,
                            "limit": cplx(rep.limit)})
            rows += [{"theta": th, "path": "radial", "k": k + 1, "re": v.real, "im": v.imag} for k, v in enumerate(rep.values)]
    counts = {}
    for r in results:
        counts[r["verdict"].value] = counts.get(r["verdict"].value, 0) + 1
    payload = {"function": desc, "mode": mode, "depth": depth, "results": results, "verdict_counts": counts}
    return payload, rows, {"osc_tol": 1e-3, "depth": depth}


def cmd_cyclicity(job):
    psi = _poly(_get(job, "psi", [1]), "psi")
    space = _space(job, int(_get(job, "n_work", 200)))
    degrees = _get(job, "degrees", list(range(31)))
    buffer = int(_get(job, "buffer", DEFAULT_BUFFER))
    rep = cyclicity_residual_probe(psi, space, _symbol(job), degrees, buffer)
    rows = [{"degree": d, "residual": r} for d, r in zip(rep.degrees, rep.residuals)]
    payload = {"psi": psi.coeffs, "degrees": rep.degrees, "residuals": rep.residuals, "verdict": rep.verdict,
               "excluded_components": rep.excluded, "out_of_range": rep.out_of_range}
    return payload, rows, {"n_work": rep.n_work, "buffer": buffer, "eig_cutoff": 1e-8}


def cmd_doublestar_check(job):
    alpha = float(_get(job, "alpha", 1.0))
    phi = _symbol(job)
    if not isinstance(phi, MoebiusMap):
        raise JobError("doublestar-check needs a Moebius symbol (a, xi)")
    tuples = _get(job, "tuples")
    if tuples is not None:
        tup = np.array([[parse_complex(x) for x in t] for t in tuples])
    else:
        tup = random_tuples(int(_get(job, "n_tuples", 200)), _seed(job), avoid=phi.a)
    rep = doublestar_factorization_check(alpha, phi, tup)
    tol = float(_get(job, "tol", 1e-9))
    payload = {"alpha": alpha, "phi": phi, "n_tuples": len(tup), "max_defect": rep.max_defect,
               "passes": rep.max_defect <= tol}
    rows = [{"i": i, "defect": d} for i, d in enumerate(rep.defects)]
    return payload, rows, {"tol": tol}


def cmd_acceptance(job):
    from .acceptance import run_all, worker_count

    numbers = _get(job, "criteria")
    workers = worker_count()
    results = run_all(numbers, workers)
    for r in results:
        print(r.line(), file=sys.stderr)
    payload = {"criteria": [{"number": r.number, "name": r.name, "passed": r.passed, "summary": r.summary.split(" (")[0],
                             "payload": r.payload} for r in results],
               "all_passed": all(r.passed for r in results)}
    return payload, [], {"workers": workers}


DISPATCH = {
    "kernel-eval": cmd_kernel_eval,
    "defect-apply": cmd_defect_apply,
    "verify-lemma": cmd_verify_lemma,
    "verify-star": cmd_verify_star,
    "pick-test": cmd_pick_test,
    "witness-search": cmd_witness_search,
    "boundary-probe": cmd_boundary_probe,
    "cyclicity": cmd_cyclicity,
    "doublestar-check": cmd_doublestar_check,
    "acceptance": cmd_acceptance,
}


def run(job: dict) -> dict:
    """Execute one job and return the report envelope."""
    command = job.get("command")
    if command not in DISPATCH:
        raise JobError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    t0 = time.perf_counter()
    payload, rows, provenance = DISPATCH[command](job)
    return {
        "job": job,
        "payload": payload,
        "provenance": provenance,
        "tool": {"name": "subbergman", "version": __version__, "backend": BACKEND},
        "timing": {"seconds": time.perf_counter() - t0},
        "_rows": rows,
    }


# ---- argv -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="subbergman", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--job", help="JSON job file (canonical input; flags override its fields)")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--csv", help="also write the sampled-value table as CSV")
    p.add_argument("--seed", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--a", help="Moebius parameter as RE,IM")
    p.add_argument("--xi", help="unimodular constant as RE,IM")
    p.add_argument("--depth", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--kernel", choices=["bergman", "hardy", "subbergman"])
    p.add_argument("--s", type=float, help="generalized Bergman exponent")
    p.add_argument("--z", help="point as RE,IM")
    p.add_argument("--w", help="point as RE,IM")
    p.add_argument("--points", help="semicolon-separated points, each RE,IM")
    p.add_argument("--n-points", dest="n_points", type=int)
    return p


_FLAG_KEYS = ("seed", "alpha", "a", "xi", "depth", "trials", "tol", "kernel", "s", "z", "w", "points", "n_points")


def job_from_args(args) -> dict:
    job = {}
    if args.job:
        try:
            with open(args.job, encoding="utf-8") as fh:
                job = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise JobError(f"cannot read job file: {exc}") from exc
        if not isinstance(job, dict):
            raise JobError("job file must contain a JSON object")
        if job.get("command", args.command) != args.command:
            raise JobError(f"job file command {job['command']!r} does not match {args.command!r}")
    job["command"] = args.command
    for key in _FLAG_KEYS:
        v = getattr(args, key)
        if v is not None:
            job[key] = v
    return job


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _write_csv(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if not rows:
            return
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(float(v)) if isinstance(v, (float, np.floating)) else v for k, v in r.items()})


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = job_from_args(args)
        env = run(job)
    except (JobError, DomainError, ValueError, TypeError, KeyError) as exc:
        _emit(dumps({"error": {"kind": "validation", "type": type(exc).__name__, "message": str(exc)}}), args.out)
        return 1
    except (ContractionError, ProbeError) as exc:
        _emit(dumps({"error": {"kind": "numerical-contract", "type": type(exc).__name__, "message": str(exc)}}), args.out)
        return 2
    rows = env.pop("_rows")
    if args.csv:
        _write_csv(args.csv, rows)
    _emit(dumps(env, indent=2), args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
