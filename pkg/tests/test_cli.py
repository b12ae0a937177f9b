import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from torus_transit import cli
from torus_transit import io as tio

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out)


# -- example -------------------------------------------------------------------

def test_example_linear_part(capsys, tmp_path):
    target = tmp_path / "sys.json"
    code, doc = run_json(capsys, "example", "--n", 2, "--k", 3, "--lambda", "3/4",
                         "--out", target)
    assert code == 0
    assert doc["linear_part"] == [[2, 0], [1, 3]]
    assert doc["config"] == {"n": 2, "k": 3, "lambda": "3/4", "perturb": None}
    assert all(v["ok"] for v in doc["identities"].values())
    sys_ = tio.load_system(target)
    assert tio.system_to_dict(sys_) == doc["system"]
    assert target.read_text() == (CONFIGS / "theorem3_n2_k3.json").read_text()


def test_example_round_trips(capsys):
    _, doc = run_json(capsys, "example", "--n", 3, "--k", 2, "--lambda", "2/3")
    assert tio.system_to_dict(tio.system_from_dict(doc)) == doc["system"]


@pytest.mark.parametrize("lam", ["1/2", "1", "0.75", "abc"])
def test_example_rejects_bad_lambda(capsys, lam):
    code, _, err = run(capsys, "example", "--n", 2, "--k", 3, "--lambda", lam)
    assert code == 2 and err.startswith("error:")


def test_example_perturbed_matches_shipped(capsys, tmp_path):
    target = tmp_path / "p.json"
    run(capsys, "example", "--n", 2, "--k", 3, "--lambda", "3/4", "--perturb", "1/100",
        "--out", target)
    assert target.read_text() == (CONFIGS / "perturbed_n2_k3.json").read_text()


# -- analyze / verify ------------------------------------------------------------

def test_analyze_k3_transitive(capsys):
    code, doc = run_json(capsys, "analyze", CONFIGS / "theorem3_n2_k3.json")
    assert code == 0
    assert doc["certificate"]["verdict"] == "Transitive"
    assert doc["certificate"]["rule"] == "Corollary1"
    assert doc["config"]["seed"] == 0 and doc["config"]["samples"] == 100


def test_analyze_k2_inconclusive(capsys, tmp_path):
    out = tmp_path / "cert.json"
    code, doc = run_json(capsys, "analyze", CONFIGS / "theorem3_n2_k2.json", "--out", out)
    assert code == 1
    cert = doc["certificate"]
    assert cert["verdict"] == "Inconclusive"
    rules = [f["rule"] for f in cert["failures"]]
    assert rules == ["Theorem2", "Corollary1", "Corollary2", "Corollary3", "Theorem1"]
    assert json.loads(out.read_text()) == doc


def test_analyze_degree_zero_is_input_error(capsys):
    code, _, err = run(capsys, "analyze", CONFIGS / "invalid_degree_zero.json")
    assert code == 2 and "error" in err


def test_analyze_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "analyze", bad)[0] == 2
    assert run(capsys, "analyze", tmp_path / "missing.json")[0] == 2


def test_analyze_declared_assumptions(capsys):
    code, doc = run_json(capsys, "analyze", CONFIGS / "perturbed_n2_k3.json",
                         "--volume", "declare")
    assert code == 0 and doc["certificate"]["assumptions"]["volume_preserving"] == "Declared"


def test_verify_theorem3_passes(capsys):
    code, doc = run_json(capsys, "verify", CONFIGS / "theorem3_n2_k3.json", "--samples", 100)
    assert code == 0 and doc["volume_preservation"]["passed"]


def test_verify_perturbed_fails_with_exact_witness(capsys):
    code, doc = run_json(capsys, "verify", CONFIGS / "perturbed_n2_k3.json")
    assert code == 1
    report = doc["volume_preservation"]
    assert not report["passed"]
    assert all(isinstance(x, str) for x in report["witness"])
    assert report["witness_sum"] != "1"


def test_verify_zero_samples(capsys):
    assert run(capsys, "verify", CONFIGS / "theorem3_n2_k3.json", "--samples", 0)[0] == 2


# -- simulate / surface ----------------------------------------------------------

def test_simulate_coverage_fixed_point(capsys, tmp_path):
    orbit_csv = tmp_path / "orbit.csv"
    code, out, _ = run(capsys, "simulate", CONFIGS / "theorem3_n2_k3.json", "--length", 1000,
                       "--grid", 10, "--start", "0,0", "--orbit-out", orbit_csv)
    assert code == 0
    config, header, rows = tio.read_csv(open(orbit_csv))
    assert header == ["step", "x1", "x2"] and len(rows) == 1000
    assert config["start"] == "0,0" and config["length"] == 1000
    config, header, rows = tio.read_csv(io.StringIO(out))
    assert dict(zip(header, rows[0]))["fraction"] == "0.01"


def test_simulate_uniformity(capsys):
    code, out, _ = run(capsys, "simulate", CONFIGS / "identity_n2.json", "--task", "uniformity",
                       "--samples", 10000, "--grid", 10)
    assert code == 0 and "samples,grid,dof" in out


def test_simulate_invalid_knobs(capsys):
    path = CONFIGS / "theorem3_n2_k3.json"
    assert run(capsys, "simulate", path, "--length", 0)[0] == 2
    assert run(capsys, "simulate", path, "--grid", 1, "--length", 10)[0] == 2
    assert run(capsys, "simulate", path, "--backend", "cuda")[0] == 2


def test_surface_zero_section(capsys, tmp_path):
    out = tmp_path / "surface.csv"
    code, _, err = run(capsys, "surface", CONFIGS / "linear_zero_section.json", "--grid", 32,
                       "--depth", 5, "--out", out, "--residual")
    assert code == 0
    config, header, rows = tio.read_csv(open(out))
    assert header == ["x1", "a", "b", "depth"] and len(rows) == 32
    assert all(float(r[1]) == 0 and float(r[2]) == 0 for r in rows)
    assert config["depth"] == 5 and config["witness"] == ["0", "1"]
    assert err.startswith("residual ")


def test_surface_k2_has_no_witness(capsys):
    code, _, err = run(capsys, "surface", CONFIGS / "theorem3_n2_k2.json", "--grid", 4)
    assert code == 2 and "hyperplane" in err


# -- algebra -------------------------------------------------------------------

def test_algebra_hyperplane_none(capsys):
    code, doc = run_json(capsys, "algebra", "hyperplane", "--matrix", "[[2,0],[1,2]]",
                         "--eigen", 2)
    assert code == 1 and doc["witness"] == "none"


def test_algebra_hyperplane_witness(capsys):
    code, doc = run_json(capsys, "algebra", "hyperplane", "--matrix", "[[2,0],[1,3]]",
                         "--eigen", 3)
    assert code == 0 and doc["witness"] == [1, 1]


def test_algebra_compound_m1_echoes(capsys):
    code, doc = run_json(capsys, "algebra", "compound", "--matrix", "[[2,0],[1,3]]", "--m", 1)
    assert code == 0 and doc["compound"] == [[2, 0], [1, 3]]


def test_algebra_charpoly_text(capsys):
    code, doc = run_json(capsys, "algebra", "charpoly", "--matrix", "[[2,0],[1,3]]")
    assert doc["coefficients"] == [6, -5, 1] and doc["text"] == "6 -5 1"


def test_algebra_snf(capsys):
    _, doc = run_json(capsys, "algebra", "snf", "--matrix", "[[2,4],[6,8]]")
    assert doc["diagonal"] == [2, 4]


def test_algebra_divides_from_file(capsys, tmp_path):
    f = tmp_path / "sub.json"
    f.write_text(json.dumps({"matrix": [[2, 0], [1, 3]], "basis": [[0, 1]]}))
    code, doc = run_json(capsys, "algebra", "divides", "--file", f)
    assert code == 0 and doc["restriction_determinant"] == 3 and doc["divides"]


def test_algebra_divides_not_invariant(capsys):
    code, _, err = run(capsys, "algebra", "divides", "--matrix", "[[2,0],[1,3]]",
                       "--basis", "[[1,0]]")
    assert code == 2 and "invariant" in err


def test_algebra_diag_and_pd(capsys):
    assert run_json(capsys, "algebra", "diag", "--matrix", "[[2,0],[1,2]]")[0] == 1
    code, doc = run_json(capsys, "algebra", "pd", "--matrix", "[[5,0],[0,5]]")
    assert code == 0 and doc["leading_minors"] == [5, 25]
    assert run_json(capsys, "algebra", "pd", "--matrix", "[[2,3],[3,2]]")[0] == 1


def test_algebra_usage_errors(capsys):
    assert run(capsys, "algebra", "charpoly")[0] == 2
    assert run(capsys, "algebra", "compound", "--matrix", "[[1]]")[0] == 2
    assert run(capsys, "algebra", "charpoly", "--matrix", "[[1,2]]")[0] == 2
    assert run(capsys, "algebra", "charpoly", "--matrix", "[[0.5]]")[0] == 2
    assert run(capsys, "algebra", "nope")[0] == 2
    assert run(capsys)[0] == 2


def test_console_script_with_numpy_backend(tmp_path):
    env = dict(os.environ, TORUS_TRANSIT_DISABLE_NUMBA="1", TORUS_TRANSIT_THREADS="2")
    proc = subprocess.run(
        [sys.executable, "-m", "torus_transit.cli", "simulate",
         str(CONFIGS / "theorem3_n2_k3.json"), "--length", "2000", "--grid", "10"],
        capture_output=True, text=True, env=env, check=False)
    assert proc.returncode == 0, proc.stderr
    config = json.loads(proc.stdout.splitlines()[0][len("# config: "):])
    assert config["backend"] == "numpy"
