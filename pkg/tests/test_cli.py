import json
import subprocess
import sys
from pathlib import Path

import pytest

from ellcohom import arrangement as arr
from ellcohom.cli import main, run

DATA = Path(__file__).resolve().parent.parent / "data"


def call(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


@pytest.fixture
def arrangement_file(tmp_path):
    path = tmp_path / "disc.json"
    path.write_text(json.dumps(arr.discriminantal(2, 2).to_json()))
    return str(path)


def test_forest_dim(capsys):
    code, out = call(capsys, "forest-dim", "-n", "2", "-k", "1")
    assert code == 0 and out["dim"] == 2
    code, out = call(capsys, "forest-dim", "-n", "2", "-k", "2")
    assert (out["dim"], out["moebius"], out["sv_formula"], out["sv_formula_agrees"]) == (6, 6, 5, False)


def test_theta_and_sigma(capsys):
    code, out = call(capsys, "theta", "--z", "0.3,0.1", "--tau", "0,1")
    assert code == 0 and len(out["value"]) == 2
    code, out = call(capsys, "sigma", "--w", "0.3,0.2", "--t", "0,0", "--tau", "0.1,1.1")
    assert code == 1 and out["type"] == "NearSingular"


def test_snf_and_solve(capsys):
    code, out = call(capsys, "snf", "--matrix", "[[4, 0], [0, 6]]")
    assert out["divisors"] == [2, 12]
    code, out = call(capsys, "solve-e", "--matrix", "[[2]]", "--z", '[["0", "0"]]')
    assert out["count"] == 4
    code, out = call(capsys, "snf", "--matrix", "[[4, 0")
    assert code == 1 and "error" in out


def test_discriminantal_then_betti(capsys, tmp_path):
    code, out = call(capsys, "discriminantal", "-n", "2", "-k", "2", "--weights", '["1/3", "1/5"]')
    assert code == 0 and len(out["hyperplanes"]) == 5
    path = tmp_path / "c.json"
    path.write_text(json.dumps(out))
    code, out = call(capsys, "betti", "--input", str(path))
    assert code == 0 and out["total"] == 6
    assert sorted(v["os_dim"] for v in out["vertices"]) == [1, 1, 2, 2]


def test_betti_non_convenient(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(arr.discriminantal(1, 2, weights=["1/2", "1/2"]).to_json()))
    code, out = call(capsys, "betti", "--input", str(path))
    assert code == 1 and out["type"] == "NotConvenient" and out["witness"] == [2]


def test_input_errors(capsys, tmp_path):
    code, out = call(capsys, "betti", "--input", str(tmp_path / "missing.json"))
    assert code == 1 and "error" in out
    bad = tmp_path / "bad.json"
    bad.write_text('{"k": 2}')
    code, out = call(capsys, "betti", "--input", str(bad))
    assert code == 1
    code, out = call(capsys, "theta", "--z", "0.1", "--tol", "0")
    assert code == 1


def test_forms(capsys, arrangement_file):
    code, out = call(capsys, "forms", "--input", arrangement_file, "--vertex", "0")
    assert code == 0 and len(out["forms"]) == 2
    assert set(out["forms"][0]["form"]) >= {"A", "B", "basis", "coeffs", "u"}
    code, out = call(capsys, "forms", "--input", arrangement_file, "--vertex", "9")
    assert code == 1


def test_verify_system_example(capsys):
    code, out = call(capsys, "verify", "--input", str(DATA / "two_torsion_system.json"))
    assert code == 0 and out["input"] == "system" and out["failed"] == []
    assert out["defects"]["residue_delta"] < 1e-8
    assert out["defects"]["quasi_periodicity"] < 1e-8


def test_verify_arrangement(capsys, arrangement_file):
    code, out = call(capsys, "verify", "--input", arrangement_file)
    assert code == 0 and out["failed"] == []
    assert out["defects"]["deletion_restriction"] == {str(j): 0 for j in range(5)}


def test_defect_exit_code(capsys):
    code, out = call(capsys, "verify", "--input", str(DATA / "two_torsion_system.json"), "--tol", "1e-30")
    assert code == 2 and out["failed"]
    code, out = call(capsys, "identities", "--samples", "5", "--tol", "1e-30")
    assert code == 2


def test_byte_identical_output(capsys, arrangement_file):
    main(["verify", "--input", arrangement_file, "--seed", "7"])
    first = capsys.readouterr().out
    main(["verify", "--input", arrangement_file, "--seed", "7"])
    assert capsys.readouterr().out == first


def test_run_returns_structured():
    code, payload = run(["forest-dim", "-n", "1", "-k", "2"])
    assert code == 0 and payload["dim"] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ellcohom", "forest-dim", "-n", "1", "-k", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["dim"] == 1
