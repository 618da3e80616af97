import csv
import json

import pytest

from subbergman import cli
from subbergman.errors import ContractionError
from subbergman.reporting import dumps


def run_main(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def write_job(tmp_path, job):
    p = tmp_path / "job.json"
    p.write_text(json.dumps(job))
    return str(p)


def test_kernel_eval_job(tmp_path, capsys):
    code, rep = run_main(capsys, ["kernel-eval", "--job", write_job(tmp_path, {"command": "kernel-eval", "s": 2, "z": 0.5, "w": 0.5})])
    assert code == 0
    v = rep["payload"]["value"]
    assert v["re"] == pytest.approx(1.777778, abs=1e-6) and v["im"] == 0
    assert rep["payload"]["series_oracle"]["difference"] < 1e-12
    assert rep["tool"]["name"] == "subbergman" and rep["tool"]["backend"] in ("cython", "python")
    assert "seconds" in rep["timing"]


def test_pick_test_bergman_witness(tmp_path, capsys):
    job = {"command": "pick-test", "kernel": "bergman", "s": 2, "points": [0.5, -0.5]}
    code, rep = run_main(capsys, ["pick-test", "--job", write_job(tmp_path, job)])
    assert code == 0
    assert rep["payload"]["verdict"] == "NOT_PSD"
    assert rep["payload"]["determinant"]["re"] == pytest.approx(-0.125, abs=1e-12)
    assert rep["payload"]["min_eigenvalue"] < 0
    assert rep["provenance"]["tol"] == 1e-10


def test_verify_star_worked_example(tmp_path, capsys):
    job = {"command": "verify-star", "a": 0.5, "xi": 1, "gamma": 1, "psi": 1}
    code, rep = run_main(capsys, ["verify-star", "--job", write_job(tmp_path, job)])
    assert code == 0
    p = rep["payload"]
    assert p["agree"] and p["max_abs_diff"] <= 1e-7
    for n, c in enumerate(p["reference_series"]):
        assert c["re"] == pytest.approx(0.75 * 0.5**n, abs=1e-12)
    assert {"degree", "N", "n_work", "buffer", "tol"} <= set(rep["provenance"])


def test_flags_merge_over_job_file(tmp_path, capsys):
    job = {"command": "kernel-eval", "s": 2, "z": 0.5, "w": 0.5}
    code, rep = run_main(capsys, ["kernel-eval", "--job", write_job(tmp_path, job), "--z", "0,0"])
    assert code == 0
    assert rep["job"]["z"] == "0,0" and rep["job"]["s"] == 2
    assert rep["payload"]["value"]["re"] == pytest.approx(1)


def test_flag_only_invocation(capsys):
    code, rep = run_main(capsys, ["kernel-eval", "--kernel", "subbergman", "--alpha", "0", "--a", "0,0", "--z", "0.5,0", "--w", "0.5,0"])
    assert code == 0
    assert rep["payload"]["value"]["re"] == pytest.approx(4 / 3)


def test_out_and_csv(tmp_path, capsys):
    out, table = tmp_path / "r.json", tmp_path / "t.csv"
    code = cli.main(["boundary-probe", "--seed", "3", "--depth", "12", "--out", str(out), "--csv", str(table)])
    assert code == 0 and capsys.readouterr().out == ""
    rep = json.loads(out.read_text(encoding="utf-8"))
    assert rep["payload"]["verdict_counts"] == {"CONVERGES": 64}
    rows = list(csv.DictReader(table.open()))
    assert len(rows) == 64 * 12 and set(rows[0]) == {"theta", "path", "k", "re", "im"}


def test_stolz_mode_gap_series(tmp_path, capsys):
    job = {"command": "boundary-probe", "seed": 8, "mode": "stolz", "aperture": 1.0, "n_angles": 16,
           "function": {"type": "gap", "terms": 26}}
    code, rep = run_main(capsys, ["boundary-probe", "--job", write_job(tmp_path, job)])
    assert code == 0
    assert rep["payload"]["verdict_counts"].get("NO_CONVERGENCE_DETECTED", 0) > 8


@pytest.mark.parametrize(
    "argv",
    [
        ["verify-lemma", "--a", "0.3,0.2", "--seed", "1"],
        ["witness-search", "--kernel", "subbergman", "--alpha", "0", "--a", "0.4,0", "--seed", "2", "--trials", "50"],
        ["boundary-probe", "--seed", "8", "--depth", "20"],
        ["doublestar-check", "--alpha", "1", "--a", "0.3,0", "--seed", "7"],
        ["cyclicity", "--a", "0.3,0"],
        ["defect-apply", "--a", "0.2,0.1", "--alpha", "1"],
    ],
)
def test_deterministic_payload(capsys, argv):
    _, a = run_main(capsys, argv)
    _, b = run_main(capsys, argv)
    assert dumps(a["payload"]) == dumps(b["payload"])
    assert dumps(a["job"]) == dumps(b["job"])


def test_inconclusive_exits_zero(tmp_path, capsys):
    # a coarse tolerance puts the Bergman witness eigenvalue inside the INCONCLUSIVE band
    job = {"command": "pick-test", "kernel": "bergman", "s": 2, "points": [0.5, -0.5], "tol": 0.02}
    code, rep = run_main(capsys, ["pick-test", "--job", write_job(tmp_path, job)])
    assert code == 0
    assert rep["payload"]["verdict"] == "INCONCLUSIVE"


@pytest.mark.parametrize(
    "argv",
    [
        ["witness-search", "--kernel", "hardy"],  # seed missing
        ["kernel-eval", "--z", "1.5,0", "--w", "0,0"],  # outside the bidisk
        ["kernel-eval", "--z", "0.1,0"],  # w missing
        ["pick-test", "--points", "0.1,0;0.1,0"],  # repeated points
        ["verify-star", "--a", "abc"],  # unparsable complex
        ["boundary-probe", "--seed", "1", "--depth", "50"],  # depth out of range
    ],
)
def test_validation_errors_exit_one(capsys, argv):
    code, rep = run_main(capsys, argv)
    assert code == 1
    assert rep["error"]["kind"] == "validation" and rep["error"]["message"]


def test_job_command_mismatch(tmp_path, capsys):
    code, rep = run_main(capsys, ["pick-test", "--job", write_job(tmp_path, {"command": "kernel-eval"})])
    assert code == 1


def test_unreadable_job(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, rep = run_main(capsys, ["kernel-eval", "--job", str(bad)])
    assert code == 1 and "job file" in rep["error"]["message"]


def test_contract_violation_exits_two(capsys, monkeypatch):
    def boom(job):
        raise ContractionError("spectrum left [0, 1]")

    monkeypatch.setitem(cli.DISPATCH, "defect-apply", boom)
    code, rep = run_main(capsys, ["defect-apply"])
    assert code == 2
    assert rep["error"]["kind"] == "numerical-contract"


def test_acceptance_subset(tmp_path, capsys):
    job = {"command": "acceptance", "criteria": [1, 9]}
    code, rep = run_main(capsys, ["acceptance", "--job", write_job(tmp_path, job)])
    assert code == 0
    assert [c["number"] for c in rep["payload"]["criteria"]] == [1, 9]
    assert rep["payload"]["all_passed"]
