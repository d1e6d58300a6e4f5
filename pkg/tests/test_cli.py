import json
import subprocess
import sys

import pytest

from ricciscope.cli import main
from ricciscope.core import HomSpaceSpec
from ricciscope.scan import COLUMNS, rows_from_csv
from ricciscope.spaces import ledger_obata as lo
from ricciscope.spaces import stiefel


@pytest.fixture
def lo_file(tmp_path):
    path = tmp_path / "lo.json"
    path.write_text(lo.lo_spec(3, (0.5, 0.5)).to_json())
    return str(path)


@pytest.fixture
def stiefel_file(tmp_path):
    path = tmp_path / "stiefel.json"
    path.write_text(stiefel.stiefel_space(1.0, 0.0, (1, 0.75, 0.75, 0, 0))[0].to_json())
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval(capsys, stiefel_file):
    code, out, _ = run(capsys, "eval", stiefel_file, "--y", "1,1,1")
    assert code == 0
    name, value = out.splitlines()[1].split(",")
    assert name == "S" and float(value) == pytest.approx(14.0, rel=1e-14)


def test_eval_bracket_table_file(capsys, tmp_path):
    doc = lo.lo_bracket_table().to_dict()
    doc.update(modules=[[0, 1, 2], [3, 4, 5]], tensor=[1, 1], dim_h=3)
    path = tmp_path / "bt.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "eval", str(path), "--y", "1,1")
    assert code == 0 and out.splitlines()[1].startswith("S,2.5")


def test_strata(capsys, stiefel_file):
    code, out, _ = run(capsys, "strata", stiefel_file)
    assert code == 0
    assert "0;2,subalgebra,4" in out and "1;2,infinity" in out


def test_alpha_beta_and_check(capsys, lo_file):
    code, out, _ = run(capsys, "alpha-beta", lo_file, "--base-valid", "all")
    assert code == 0 and out.startswith("label,J,dim_k,alpha,beta")
    code, out, _ = run(capsys, "check", lo_file, "--base-valid", "0")
    assert code == 0 and out.splitlines()[1].startswith("GlobalMaxGuaranteed")
    code, out, _ = run(capsys, "check", lo_file)
    assert code == 0 and out.splitlines()[1].startswith("Inconclusive")


def test_alpha_beta_theta_family(capsys):
    code, out, _ = run(capsys, "alpha-beta", "--family", "stiefel-theta", "--T", "1,0.25,0.25,0,0")
    assert code == 0
    alpha = float(out.splitlines()[1].split(",")[3])
    assert abs(alpha - 8.0) < 1e-6


def test_solve(capsys, lo_file):
    code, out, _ = run(capsys, "solve", lo_file, "--start", "1,1")
    assert code == 0 and "LocalMax" in out


def test_example_commands(capsys):
    code, out, _ = run(capsys, "example", "stiefel", "scalar")
    assert code == 0 and out.splitlines()[1].startswith("14,")
    code, out, _ = run(capsys, "example", "ledger-obata", "check", "--T", "0.5,0.5,0")
    assert code == 0 and "GlobalMaxGuaranteed" in out
    code, out, _ = run(capsys, "example", "stiefel", "solve", "--T", "1,0.75,0.75,0,0")
    assert code == 0 and "LocalMax" in out
    code, out, _ = run(capsys, "example", "stiefel", "space", "--s", "0.7071067811865476")
    assert code == 0 and HomSpaceSpec.from_json(out).r == 3


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "--only", "core")
    assert code == 0 and out.startswith("PASS core.sc-symmetry")


def test_verify_spec_asymmetric(capsys, tmp_path):
    doc = HomSpaceSpec((1, 1, 1), (1, 1, 1), {(0, 1, 2): 1.0}).to_dict()
    doc["sc"].append({"ijk": [2, 1, 0], "v": 3.0})
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "verify", "--spec", str(path))
    assert code == 1 and "sc-symmetry" in out
    code, _, err = run(capsys, "eval", str(path))
    assert code == 1 and "sc-symmetry" in err


def test_scan_grid_zero(capsys):
    code, out, _ = run(capsys, "scan", "--grid", "0")
    assert code == 0 and out == ",".join(COLUMNS) + "\r\n"


def test_scan_to_files(capsys, tmp_path):
    out, pic = tmp_path / "scan.csv", tmp_path / "scan.svg"
    code, _, _ = run(capsys, "scan", "--grid", "4", "--out", str(out), "--svg", str(pic))
    assert code == 0
    rows = rows_from_csv(out.read_text())
    assert len(rows) == 16
    assert pic.read_text().startswith("<?xml")


def test_ricci_image_seed_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["ricci-image", "--n", "2000", "--seed", "7", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_unwritable_output(capsys, tmp_path):
    code, _, err = run(capsys, "scan", "--grid", "0", "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == 2 and "cannot write" in err


def test_schema(capsys):
    code, out, _ = run(capsys, "--schema")
    assert code == 0 and "schema v1" in out
    assert run(capsys, "scan", "--schema")[1] == out


def test_no_command(capsys):
    assert run(capsys)[0] == 2


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "ricciscope.cli", "verify", "--only", "core"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and "PASS" in proc.stdout
