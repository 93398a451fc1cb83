# Copyright 2019 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import csv
import json
import math

import pytest

from fracdyn.battery import CHECKS
from fracdyn.cli import EXIT_CONTRACT, EXIT_CONVERGENCE, EXIT_OK, main

HALVING = "exp(-0.6931471805599453*x)"


def write_config(tmp_path, name="config.json", **fields):
    data = {"alpha": 0.5, "p": 2, "T": 1, "N": 4, "phi": HALVING}
    data.update(fields)
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def run(command, config, out):
    return main([command, "--config", config, "--out", str(out)])


def test_certify_worked_example(tmp_path):
    config = write_config(tmp_path, N=32, phi="2*" + HALVING)
    assert run("certify", config, tmp_path / "out") == EXIT_OK
    certificate = json.loads((tmp_path / "out" / "certificate.json").read_text())
    assert list(certificate) == ["lambda", "P", "Q", "M", "delta", "C1", "C2", "k_rule"]
    assert certificate["lambda"] == 1.0
    assert certificate["P"] == 0.0
    assert certificate["Q"] == 4.0
    assert certificate["M"] == pytest.approx(8.0, rel=1e-12)
    assert certificate["delta"] == pytest.approx(math.pi / 256, rel=1e-12)
    assert certificate["delta"] == pytest.approx(0.01227184630308513, rel=1e-12)
    assert certificate["C1"] == 4.0
    assert certificate["C2"] == pytest.approx(8.0, rel=1e-12)


def test_solve_zero_profile(tmp_path):
    config = write_config(tmp_path, phi="0")
    assert run("solve", config, tmp_path) == EXIT_OK
    with open(tmp_path / "trajectory.csv", newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["t", "u_1", "u_2", "u_3", "u_4"]
    assert rows[1][0] == "0.0"
    assert len(rows) > 2
    for row in rows[1:]:
        assert row[1:] == ["0.0"] * 4

    report = json.loads((tmp_path / "report.json").read_text())
    assert report["iterations"] == 1
    assert report["mass_balance"] == 0.0
    assert report["grid"]["a"] == 0.0


def test_deterministic_output(tmp_path):
    config = write_config(tmp_path)
    assert run("solve", config, tmp_path / "first") == EXIT_OK
    assert run("solve", config, tmp_path / "second") == EXIT_OK
    for name in ("trajectory.csv", "report.json"):
        first = (tmp_path / "first" / name).read_bytes()
        assert first == (tmp_path / "second" / name).read_bytes()


def test_sweep(tmp_path):
    config = write_config(tmp_path)
    assert run("sweep", config, tmp_path) == EXIT_OK
    with open(tmp_path / "sweep.csv", newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["study", "coarse", "fine", "difference"]
    assert [row[:3] for row in rows[1:3]] == [["truncation", "4", "8"], ["truncation", "8", "16"]]
    assert rows[3][0] == "step"
    assert len(rows) == 4
    for row in rows[1:]:
        assert float(row[3]) >= 0


def test_invalid_config(tmp_path, capsys):
    config = write_config(tmp_path, alpha=1.5)
    out = tmp_path / "out"
    assert run("solve", config, out) == EXIT_CONTRACT
    assert "alpha: alpha must lie in (0,1]" in capsys.readouterr().err
    assert not out.exists()

    assert main(["solve"]) == EXIT_CONTRACT
    assert main(["solve", "--config", str(tmp_path / "missing.json")]) == EXIT_CONTRACT
    with pytest.raises(SystemExit):
        main(["plot", "--config", config])


def test_failures_leave_no_artifacts(tmp_path, capsys):
    out = tmp_path / "out"
    config = write_config(tmp_path, F="sin(x)")
    assert run("certify", config, out) == EXIT_CONTRACT
    assert "does not provably vanish" in capsys.readouterr().err
    assert not (out / "certificate.json").exists()

    config = write_config(tmp_path, h=0.5)
    assert run("solve", config, out) == EXIT_CONTRACT
    assert "exceeds the solve interval" in capsys.readouterr().err

    config = write_config(tmp_path, max_iter=1)
    assert run("solve", config, out) == EXIT_CONVERGENCE
    assert "no convergence" in capsys.readouterr().err
    assert not (out / "trajectory.csv").exists()
    assert not (out / "report.json").exists()


def test_mnc(tmp_path):
    config = write_config(tmp_path, command="mnc")
    assert run("mnc", config, tmp_path) == EXIT_OK
    report = json.loads((tmp_path / "mnc_report.json").read_text())
    chi, sup = report["measures"]
    assert chi["measure"] == "hausdorff_c0"
    assert chi["passed"]
    assert not sup["passed"]
    assert [axiom["name"] for axiom in sup["axioms"] if not axiom["passed"]] == ["singleton"]
    assert len(report["kernel_inequality"]) == 40
    assert all(row["holds"] for row in report["kernel_inequality"])


def test_kamke(tmp_path):
    path = tmp_path / "kamke.json"
    path.write_text(
        json.dumps({"command": "kamke", "alpha": 0.5, "kamke": {"eps_list": [1e-2, 1e-3]}})
    )
    assert run("kamke", str(path), tmp_path / "out") == EXIT_OK
    result = json.loads((tmp_path / "out" / "kamke.json").read_text())
    assert result["lambda"] == 1.0
    assert result["eps"] == [1e-2, 1e-3]
    first, second = result["ratios"]
    assert first == pytest.approx(second, rel=1e-9)
    assert result["A_hat"] == pytest.approx(5.00898, rel=1e-3)


def test_selftest(capsys):
    assert main(["selftest"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == len(CHECKS)
    assert all(line.startswith("PASS ") for line in lines)
    assert any(line.startswith("PASS certified containment: ") for line in lines)
