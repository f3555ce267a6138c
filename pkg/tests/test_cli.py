import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from cspoly import __version__, faces
from cspoly.cli import EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_INVALID, EXIT_OK, main
from cspoly.vertex_io import read_vertices_csv

from conftest import instance
from cspoly.polytopes import NeighborlySpec

P0 = ["--family", "neighborly", "--m", "0"]
P1 = ["--family", "neighborly", "--m", "1"]
Q24 = ["--family", "many-faces", "--k", "2", "--m", "1", "--n", "24"]


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    report = json.loads(out) if out.strip().startswith("{") else None
    return code, report, out, err


def test_construct_cross_polytope(capsys, tmp_path):
    code, rep, _, _ = run(capsys, ["construct", *P0, "--out", str(tmp_path), "--no-timings"])
    assert code == EXIT_OK
    assert rep["instance"]["num_vertices"] == 12
    assert rep["result"]["observed_dim"] == 6
    table = read_vertices_csv(tmp_path / "vertices.csv")
    np.testing.assert_array_equal(table.vertices, instance(NeighborlySpec(0)).vertices)
    assert json.loads((tmp_path / "summary.json").read_text())["num_vertices"] == 12


def test_construct_many_faces(capsys):
    code, rep, _, _ = run(capsys, ["construct", *Q24])
    assert code == EXIT_OK
    assert (rep["instance"]["num_vertices"], rep["instance"]["observed_dim"]) == (120, 22)


def test_odd_n_is_invalid(capsys):
    code, _, out, err = run(capsys, ["construct", "--family", "many-faces", "--k", "2", "--m", "1",
                                     "--n", "23"])
    assert code == EXIT_INVALID
    assert out == ""
    assert "even" in err


def test_missing_family_parameter_is_invalid(capsys):
    code, _, _, err = run(capsys, ["construct", "--family", "cluster", "--m", "0"])
    assert code == EXIT_INVALID
    assert "--s" in err


def test_verify_neighborly(capsys):
    code, rep, _, _ = run(capsys, ["verify", *P1, "--check", "neighborly"])
    assert code == EXIT_OK
    assert (rep["result"]["required"], rep["result"]["passed"]) == (612, 612)


def test_verify_dim(capsys):
    code, rep, _, _ = run(capsys, ["verify", *Q24, "--check", "dim"])
    assert code == EXIT_OK
    assert rep["result"]["predicted_dim"] == rep["result"]["observed_dim"] == 22


def test_verify_sum_law(capsys):
    code, rep, _, _ = run(capsys, ["verify", "--family", "direct-sum", "--k", "2", "--m", "1",
                                   "--n", "8", "--r", "2", "--check", "sum-law", "--trials", "60",
                                   "--seed", "7"])
    assert code == EXIT_OK
    assert rep["result"]["mismatches"] == 0


def test_verify_sum_law_needs_direct_sum(capsys):
    assert run(capsys, ["verify", *P0, "--check", "sum-law"])[0] == EXIT_INVALID


def test_verify_sum_law_zero_trials_invalid(capsys):
    code = run(capsys, ["verify", "--family", "direct-sum", "--k", "2", "--m", "1", "--n", "8",
                        "--r", "2", "--check", "sum-law", "--trials", "0"])[0]
    assert code == EXIT_INVALID


def test_verify_arc(capsys):
    code, rep, _, _ = run(capsys, ["verify", "--check", "arc", "--k", "2", "--trials", "30"])
    assert code == EXIT_OK
    assert rep["instance"] is None
    assert rep["result"]["faces"] == 30


def test_edges_cap_exceeded_is_invalid(capsys):
    assert run(capsys, ["verify", *P1, "--check", "edges", "--cap", "5"])[0] == EXIT_INVALID


def test_failed_claim_exits_one(capsys, monkeypatch):
    real = faces.enumerate_edges

    def fewer_edges(inst, cap, mapper):
        rep = real(inst, cap, mapper)
        rep.edges -= 1
        rep.non_edges += 1
        return rep
    monkeypatch.setattr(faces, "enumerate_edges", fewer_edges)
    code, rep, _, _ = run(capsys, ["verify", *P0, "--check", "edges"])
    assert code == EXIT_FAIL
    assert rep["status"] == "FAIL"


def test_solver_failure_exits_three(capsys, monkeypatch):
    real = faces.enumerate_edges

    def one_failure(inst, cap, mapper):
        rep = real(inst, cap, mapper)
        rep.edges -= 1
        rep.inconclusive += 1
        return rep
    monkeypatch.setattr(faces, "enumerate_edges", one_failure)
    assert run(capsys, ["verify", *P0, "--check", "edges"])[0] == EXIT_INCONCLUSIVE


def test_estimate_exhaustive(capsys):
    code, rep, _, _ = run(capsys, ["estimate", *P1, "--tuple-size", "2", "--mode", "exhaustive"])
    assert code == EXIT_OK
    assert rep["result"]["failures"] * 36 == rep["result"]["trials"]


def test_estimate_singletons(capsys):
    code, rep, _, _ = run(capsys, ["estimate", *Q24, "--tuple-size", "1", "--trials", "40"])
    assert code == EXIT_OK
    assert rep["result"]["failures"] == 0


def test_recover_and_csv(capsys, tmp_path):
    path = tmp_path / "trials.csv"
    code, rep, _, _ = run(capsys, ["recover", *P1, "--k-errors", "2", "--trials", "20",
                                   "--csv", str(path), "--baseline"])
    assert code == EXIT_OK
    assert rep["result"]["recovered"] == 20
    assert rep["result"]["inconsistent"] == 0
    assert rep["result"]["baseline"]["code"]["length"] == 18
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 20
    assert all(r["recovered"] == "True" for r in rows)


def test_recover_degenerate_warns(capsys):
    code, rep, _, err = run(capsys, ["recover", *P0, "--trials", "3"])
    assert code == EXIT_OK
    assert "warning" in err
    assert rep["result"]["status"] == "DEGENERATE"


def test_recover_zero_errors(capsys):
    code, rep, _, _ = run(capsys, ["recover", *P1, "--k-errors", "0", "--trials", "5"])
    assert code == EXIT_OK
    assert rep["result"]["recovered"] == 5


def test_recover_too_many_errors(capsys):
    assert run(capsys, ["recover", *P1, "--k-errors", "19"])[0] == EXIT_INVALID


def test_export_vrep_to_stdout(capsys):
    code, _, out, _ = run(capsys, ["export", *P0, "--format", "vrep"])
    assert code == EXIT_OK
    lines = out.splitlines()
    assert len(lines) == 12
    assert all(len(line.split()) == 7 for line in lines)


def test_export_json_file(capsys, tmp_path):
    path = tmp_path / "p1.json"
    code, rep, _, _ = run(capsys, ["export", *P1, "--format", "json", "--out", str(path)])
    assert code == EXIT_OK
    d = json.loads(path.read_text())
    assert "frequency_sets" in d and "antipodal_map" in d


def test_report_header(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, rep, out, _ = run(capsys, ["verify", *P0, "--check", "dim", "--seed", "5",
                                     "--report", str(path)])
    assert code == EXIT_OK
    assert rep["version"] == __version__
    assert rep["config"]["seed"] == 5
    assert rep["tolerances"]["certificate"] == faces.CERT_TOL
    assert "runtime" in rep
    assert path.read_text() == out


def test_reports_are_byte_identical_across_runs_and_workers(capsys):
    argv = ["estimate", *Q24, "--tuple-size", "2", "--trials", "60", "--seed", "3", "--no-timings"]
    first = run(capsys, argv + ["--workers", "1"])[2]
    second = run(capsys, argv + ["--workers", "1"])[2]
    parallel = run(capsys, argv + ["--workers", "2"])[2]
    assert first == second == parallel


def test_seed_must_fit_in_64_bits(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["construct", *P0, "--seed", str(2**64)])
    assert exc.value.code == 2


def test_console_script_version():
    out = subprocess.run([sys.executable, "-m", "cspoly.cli", "--version"], capture_output=True,
                         text=True, check=True)
    assert out.stdout.strip() == __version__
