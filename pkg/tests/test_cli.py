import csv
import json
from pathlib import Path

import pytest

from outlierfl.cli import main

FIG10_JSON = json.dumps({
    "locations": ["0", "0", "0", "0.9", "1.9", "1.9", "1.9", "1.9"],
    "z": 3,
    "prediction": "0",
})


@pytest.fixture
def fig10_file(tmp_path):
    path = tmp_path / "fig10.json"
    path.write_text(FIG10_JSON)
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_solve_fig10(fig10_file, capsys):
    code, out = run_cli(capsys, "solve", "--instance", fig10_file)
    assert code == 0
    doc = json.loads(out)
    assert doc["location"] == "19/10"
    assert doc["cost"] == "1"


def test_solve_coincident(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text('{"locations":["2","2","2"],"z":1}')
    code, out = run_cli(capsys, "solve", "--instance", str(path))
    assert code == 0 and json.loads(out)["cost"] == "0"


def test_solve_fig4_egalitarian(tmp_path, capsys):
    path = tmp_path / "f4.json"
    path.write_text('{"locations":["0","0","0.5","1","1"],"z":2}')
    code, out = run_cli(capsys, "solve", "--instance", str(path), "--objective", "egalitarian")
    assert code == 0 and json.loads(out)["cost"] == "1/4"


def test_run_mechanisms(fig10_file, capsys):
    code, out = run_cli(capsys, "run", "--instance", fig10_file, "--mech", "in_range")
    assert code == 0 and json.loads(out)["location"] == "9/10"
    code, out = run_cli(capsys, "run", "--instance", fig10_file, "--mech", "kth:4")
    assert code == 0 and json.loads(out)["location"] == "9/10"
    code, out = run_cli(capsys, "run", "--instance", fig10_file, "--mech", "rand_median")
    assert code == 0
    support = json.loads(out)["support"]
    assert [loc for loc, _ in support] == ["9/10", "19/10"]


def test_run_z_override_and_decimal(fig10_file, capsys):
    code, out = run_cli(capsys, "run", "--instance", fig10_file, "--mech", "left_z",
                        "--z-override", "1")
    assert code == 0 and json.loads(out)["location"] == "0"


def test_invalid_input_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"locations":[],"z":0}')
    assert main(["solve", "--instance", str(bad)]) == 2
    missing = tmp_path / "missing.json"
    assert main(["solve", "--instance", str(missing)]) == 2
    ok = tmp_path / "ok.json"
    ok.write_text('{"locations":["0","1","2"],"z":1}')
    assert main(["run", "--instance", str(ok), "--mech", "kth:9"]) == 2


def test_verify_sp_scan_clean(capsys):
    code, out = run_cli(capsys, "verify-sp", "--mech", "left_z", "--n", "7", "--z", "2",
                        "--count", "200", "--seed", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["violations"] == [] and doc["scenarios_checked"] > 0


def test_verify_sp_catches_oracle(tmp_path, capsys):
    path = tmp_path / "f4.json"
    path.write_text('{"locations":["0","0","0.5","0.5","1"],"z":2}')
    code, out = run_cli(capsys, "verify-sp", "--mech", "oracle:egalitarian",
                        "--instance", str(path))
    assert code == 1
    doc = json.loads(out)
    assert len(doc["violations"]) == 1


def test_sweep_csv_and_exit(tmp_path, capsys):
    out_file = tmp_path / "sweep.csv"
    code = main(["sweep", "--mech", "left_median", "--objective", "utilitarian",
                 "--n", "8", "--z", "3", "--count", "50", "--seed", "9",
                 "--out", str(out_file)])
    assert code == 0
    with open(out_file) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 50
    assert set(rows[0]) == {"seed", "n", "z", "family", "mechanism", "objective",
                            "mech_cost", "opt_cost", "ratio", "bound", "within_bound"}
    assert all(r["within_bound"] == "true" for r in rows)
    assert out_file.with_suffix(".png").exists()


def test_bounds_table(capsys):
    code, out = run_cli(capsys, "bounds", "--n", "8,9", "--z", "1,2,3")
    assert code == 0
    doc = json.loads(out)
    assert doc["8,3"]["f_util"] == "4"
    assert doc["8,3"]["delta_c"] == 1
    assert doc["9,3"]["f_robust"] == "5"


def test_reproduce_example(capsys):
    code, out = run_cli(capsys, "reproduce", "example-5-2-2")
    assert code == 0
    assert json.loads(out) == ["1", "14/5", "37/10"]


def test_reproduce_figure1(tmp_path, capsys):
    out_file = tmp_path / "frontier.csv"
    code = main(["reproduce", "figure1", "--out", str(out_file)])
    assert code == 0
    with open(out_file) as fh:
        rows = list(csv.DictReader(fh))
    by_key = {(int(r["n"]), int(r["z"])): r for r in rows}
    assert by_key[(20, 9)]["f"] == "10"
    assert all(r["exact_match"] == "true" for r in rows)
    assert out_file.with_suffix(".png").exists()


def test_reproduce_table1(capsys):
    code, out = run_cli(capsys, "reproduce", "table1")
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()))
    egal = {(r["n"], r["z"]): (r["egal_det_ub"], r["egal_det_lb"]) for r in rows}
    assert egal[("5", "2")] == ("2", "2")
    lookup = {(r["n"], r["z"]): r for r in rows}
    assert lookup[("4", "1")]["util_rand_lb"] == "3/2"
