import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from besovreg.cli import main
from besovreg.lab import DiagonalScaleOperator
from besovreg.solver import PenaltySpec, solve_diagonal
from besovreg.spaces import BesovSpace, CoefField

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
EX1 = str(CONFIGS / "sobolev_smoothing.json")


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_plan_table_sobolev_smoothing(capsys):
    assert main(["plan", EX1]) == 0
    out = capsys.readouterr().out
    direct = next(line for line in out.splitlines() if line.startswith("direct"))
    optimal = next(line for line in out.splitlines() if line.startswith("optimal"))
    assert float(direct.split()[4]) == pytest.approx(-1 / 6, abs=1e-6)
    assert float(optimal.split()[4]) == pytest.approx(0.25 - 1e-3, abs=1e-6)


def test_plan_json(capsys, tmp_path):
    assert main(["plan", EX1, "--optimal", "--json", "-"]) == 0
    doc = json.loads(capsys.readouterr().out)
    (plan,) = doc["plans"]
    assert plan["provenance"] == "optimal" and plan["p_R"] == 2.0 and plan["case"] == "i"
    assert all(c["passed"] for c in plan["feasibility"])
    target = tmp_path / "plan.json"
    assert main(["plan", EX1, "--weakened", "3/2", "--json", str(target)]) == 0
    assert json.loads(target.read_text())["plans"][0]["p"] == 1.5


def test_plan_flags_exclusive(capsys):
    with pytest.raises(SystemExit) as info:
        main(["plan", EX1, "--direct", "--optimal"])
    assert info.value.code == 1


def test_plan_infeasible_exit_1(tmp_path, capsys):
    bad = _write(
        tmp_path,
        "bad.json",
        json.dumps({"domain": {"s": -1, "p": 2}, "adjoint_range": {"s": 1, "p": 2}, "source": {"s": -2, "p": 2}}),
    )
    assert main(["plan", bad]) == 1
    assert "B_S in B_D" in capsys.readouterr().err


def test_plan_weakened_out_of_range(capsys):
    assert main(["plan", EX1, "--weakened", "3"]) == 1
    assert "upper bound" in capsys.readouterr().err


def test_malformed_json_reports_line(tmp_path, capsys):
    path = _write(tmp_path, "broken.json", '{\n  "domain": {"s": -1, "p": 2},\n  oops\n}')
    assert main(["plan", path]) == 1
    assert "line 3" in capsys.readouterr().err


def test_missing_file(capsys):
    assert main(["plan", "/nonexistent/sig.json"]) == 1


def test_feasible_csv(tmp_path):
    out = tmp_path / "region.csv"
    assert main(["feasible", EX1, "-n", "11", "-o", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "s,p,inv_p,ddim"
    rows = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    assert rows.size and np.all(rows[:, 1] <= 2) and np.all(rows[:, 1] >= 1)
    assert np.all(rows[:, 3] < 1) and np.all(rows[:, 3] > -1.5)


def test_devore_csv(capsys):
    assert main(["devore", "--signature", EX1, "--point", "X:1/2:3", "--line", "0"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "label,inv_p,s"
    labels = {line.split(",")[0] for line in lines[1:]}
    assert {"B_D", "B_G", "B_S", "B_R:direct", "B_R:optimal", "X", "line:0"} <= labels


def test_devore_bad_point(capsys):
    assert main(["devore", "--point", "nonsense"]) == 1
    assert "LABEL:S:P" in capsys.readouterr().err


def _field_csv(tmp_path, J=4, seed=0):
    u = CoefField(J, np.random.default_rng(seed).standard_normal(2 ** (J + 1) - 1))
    return u, _write(tmp_path, "data.csv", u.to_csv())


def test_solve_diagonal_cli(tmp_path):
    u, data = _field_csv(tmp_path)
    op = _write(tmp_path, "op.json", json.dumps({"type": "diagonal", "eta": 1, "max_level": 4}))
    out, report = tmp_path / "u.csv", tmp_path / "rep.json"
    args = ["solve", "--operator", op, "--data", data, "--s", "0", "--p", "3/2", "--alpha", "0.1"]
    assert main(args + ["-o", str(out), "--report", str(report)]) == 0
    got = CoefField.from_csv(out.read_text())
    ref = solve_diagonal(DiagonalScaleOperator(1, 4), u, PenaltySpec(BesovSpace(0, 1.5), 0.1))
    assert got == ref.minimizer
    assert set(json.loads(report.read_text())) == {"objective", "residual", "iterations"}


def test_solve_matrix_cli(tmp_path):
    u, data = _field_csv(tmp_path, J=2)
    op = _write(tmp_path, "op.json", json.dumps({"type": "matrix", "max_level": 2, "matrix": np.eye(7).tolist()}))
    out = tmp_path / "u.csv"
    args = ["solve", "--operator", op, "--data", data, "--s", "0", "--p", "2", "--alpha", "1"]
    assert main(args + ["-o", str(out)]) == 0
    np.testing.assert_allclose(CoefField.from_csv(out.read_text()).values, u.values / 2, atol=1e-10)


def test_solve_nonconvergence_exit_2(tmp_path, capsys):
    _, data = _field_csv(tmp_path, J=2)
    mat = np.random.default_rng(1).standard_normal((7, 7)).tolist()
    op = _write(tmp_path, "op.json", json.dumps({"type": "matrix", "max_level": 2, "matrix": mat}))
    args = ["solve", "--operator", op, "--data", data, "--s", "0", "--p", "3/2", "--alpha", "0.1"]
    assert main(args + ["--max-iter", "2", "-o", str(tmp_path / "u.csv")]) == 2
    assert "residual" in capsys.readouterr().err


def test_solve_overflow_exit_2(tmp_path):
    _, data = _field_csv(tmp_path, J=4)
    op = _write(tmp_path, "op.json", json.dumps({"type": "diagonal", "eta": 1, "max_level": 4}))
    args = ["solve", "--operator", op, "--data", data, "--s", "200", "--p", "2", "--alpha", "1"]
    assert main(args + ["-o", str(tmp_path / "u.csv")]) == 2


def test_solve_malformed_csv(tmp_path, capsys):
    data = _write(tmp_path, "bad.csv", "level,position,value\n0,0,1\n1,5,2\n")
    op = _write(tmp_path, "op.json", json.dumps({"type": "diagonal", "eta": 1, "max_level": 4}))
    args = ["solve", "--operator", op, "--data", data, "--s", "0", "--p", "2", "--alpha", "1"]
    assert main(args) == 1
    assert "line 3" in capsys.readouterr().err


@pytest.mark.parametrize(
    "spec, msg",
    [({"type": "diagonal"}, "max_level"), ({"type": "fancy", "max_level": 1}, "unknown"), ({"type": "matrix", "max_level": 1}, "matrix")],
)
def test_solve_bad_operator(tmp_path, capsys, spec, msg):
    _, data = _field_csv(tmp_path, J=1)
    op = _write(tmp_path, "op.json", json.dumps(spec))
    assert main(["solve", "--operator", op, "--data", data, "--s", "0", "--p", "2", "--alpha", "1"]) == 1
    assert msg in capsys.readouterr().err


def test_rate_cli_writes_outputs(tmp_path, capsys):
    cfg = json.loads((CONFIGS / "rate_sobolev_smoothing.json").read_text())
    cfg["deltas"] = [0.1, 0.01, 0.003, 0.001]
    path = _write(tmp_path, "cfg.json", json.dumps(cfg))
    out_json, out_csv = tmp_path / "r.json", tmp_path / "r.csv"
    assert main(["rate", path, "--out-json", str(out_json), "--out-csv", str(out_csv)]) == 0
    doc = json.loads(out_json.read_text())
    assert len(doc["rows"]) == 4 and doc["slope"] >= 0.45
    assert len(out_csv.read_text().splitlines()) == 5
    assert "slope" in capsys.readouterr().out


def test_rate_cli_bad_grid(tmp_path, capsys):
    cfg = json.loads((CONFIGS / "rate_sobolev_smoothing.json").read_text())
    cfg["deltas"] = [0.1, 0.1, 0.1]
    path = _write(tmp_path, "cfg.json", json.dumps(cfg))
    assert main(["rate", path, "--out-json", str(tmp_path / "a"), "--out-csv", str(tmp_path / "b")]) == 1
    assert "decreasing" in capsys.readouterr().err


def test_examples_subcommand(capsys):
    assert main(["examples"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 10


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "besovreg", "examples"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1
