import json
import os
import subprocess
import sys

import pytest

from nativeising.cli import main
from nativeising.ising import IsingProblem
from nativeising.logic import GateKind, TruthTable, gate, multiplier_table, truth_table


@pytest.fixture
def tables(tmp_path):
    paths = {}
    for name, table in [("nor", truth_table(GateKind.NOR)), ("cell", multiplier_table()),
                        ("xor", TruthTable(("A", "B", "R"),
                                           frozenset({"000", "011", "101", "110"})))]:
        p = tmp_path / f"{name}.json"
        p.write_text(table.to_json())
        paths[name] = str(p)
    return paths


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


class TestEncodeVerify:
    def test_round_trip(self, tables, tmp_path, capsys):
        prob = tmp_path / "cell_problem.json"
        code, _, _ = run(["encode", tables["cell"], "--out", str(prob)], capsys)
        assert code == 0
        assert IsingProblem.from_json(prob.read_text()) == gate("multiplier")
        code, out, _ = run(["verify", str(prob), "--table", tables["cell"]], capsys)
        assert code == 0
        report = json.loads(out)
        assert report["passed"] and report["degeneracy"] == 16

    def test_fixed_couplings(self, tables, capsys):
        code, out, _ = run(["encode", tables["nor"], "--fix", "0,1=0.5", "--fix", "0,2=1",
                            "--fix", "1,2=1"], capsys)
        assert code == 0
        assert IsingProblem.from_json(out).h == (0.5, 0.5, 1.0)

    def test_infeasible_exit(self, tables, capsys):
        code, _, err = run(["encode", tables["xor"]], capsys)
        assert code == 3
        payload = json.loads(err)
        assert payload["error"] == "InfeasibleEncodingError"
        assert payload["certificate"]

    def test_verify_failure_exit(self, tables, capsys):
        code, out, err = run(["verify", "--unit", "or", "--table", tables["nor"]], capsys)
        assert code == 2
        assert json.loads(out)["passed"] is False
        assert json.loads(err)["error"] == "ValidationFailure"

    def test_capacity_exit(self, tmp_path, capsys):
        big = tmp_path / "big.json"
        big.write_text(IsingProblem(h=[0.0] * 13).to_json())
        code, _, err = run(["anneal", str(big), "--engine", "exact", "--Ta", "1"], capsys)
        assert code == 4
        assert json.loads(err)["error"] == "CapacityError"

    def test_bad_input_exit(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"n": 2, "h": [0, 0], "j": [{"i": 0, "j": 1, "v": 1}, {"i": 1, "j": 0, "v": 1}]}')
        code, _, err = run(["clamp", str(bad), "--targets", "0=1", "--alpha", "1"], capsys)
        assert code == 2
        assert "duplicate" in json.loads(err)["message"]

    def test_missing_file(self, capsys):
        code, _, _ = run(["verify", "/nonexistent.json", "--table", "/nonexistent.json"], capsys)
        assert code == 2


class TestCommands:
    def test_clamp(self, capsys):
        code, out, _ = run(["clamp", "--unit", "nor", "--targets", "A=0,B=0", "--alpha", "3.5"],
                           capsys)
        assert code == 0
        assert IsingProblem.from_json(out).h == (4.0, 4.0, 1.0)

    def test_anneal_exact(self, capsys):
        code, out, _ = run(["anneal", "--unit", "nor", "--engine", "exact", "--Ta", "0",
                            "--iters", "800"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "bitstring,count"
        assert all(line.endswith(",100") for line in lines[1:])

    def test_sweep(self, tables, capsys):
        code, out, _ = run(["sweep", "--unit", "nor", "--engine", "exact", "--variable", "T_a",
                            "--grid", "0,1,10", "--targets-table", tables["nor"]], capsys)
        assert code == 0
        assert out.splitlines()[1].startswith("0.0,0.5,")

    def test_factor(self, tmp_path, capsys):
        hist = tmp_path / "h.csv"
        code, out, _ = run(["factor", "--n", "6", "--histogram", str(hist)], capsys)
        assert code == 0
        data = json.loads(out)
        assert data["pairs"] == [[2, 3], [3, 2]]
        assert data["success"] == 1.0
        assert hist.read_text().startswith("bitstring,count")

    def test_factor_too_big(self, tmp_path, capsys):
        code, _, err = run(["factor", "--n", "16", "--histogram", str(tmp_path / "h.csv")], capsys)
        assert code == 2

    def test_device_preset(self, capsys):
        code, out, _ = run(["device", "--preset", "gate"], capsys)
        rep = json.loads(out)
        assert code == 0
        assert rep["beta_L"][0]["value"] == pytest.approx(2.087, abs=1e-3)
        code, out, _ = run(["device", "--preset", "cell"], capsys)
        assert json.loads(out)["reported_beta_L"]["reproduced"] is False

    def test_units(self, capsys):
        code, out, _ = run(["units"], capsys)
        assert set(json.loads(out)) == {"nor", "nand", "or", "and", "multiplier"}

    def test_config_defaults_and_override(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"alpha": 3.5, "targets": "A=0,B=0"}))
        code, out, _ = run(["--config", str(cfg), "clamp", "--unit", "nor"], capsys)
        assert code == 0 and IsingProblem.from_json(out).h[0] == 4.0
        code, out, _ = run(["--config", str(cfg), "clamp", "--unit", "nor", "--alpha", "1"],
                           capsys)
        assert IsingProblem.from_json(out).h[0] == 1.5


class TestDeterminism:
    ARGS = ["anneal", "--unit", "multiplier", "--engine", "thermal", "--iters", "2000",
            "--sweeps", "50", "--seed", "11"]

    def test_repeat_byte_identical(self, tmp_path, capsys):
        outs = []
        for k, threads in enumerate(["1", "1", str(os.cpu_count() or 1), "8"]):
            path = tmp_path / f"run{k}.csv"
            assert main(self.ARGS + ["--threads", threads, "--out", str(path)]) == 0
            outs.append(path.read_bytes())
        assert len(set(outs)) == 1

    def test_seed_changes_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(self.ARGS + ["--out", str(a)])
        main(self.ARGS[:-1] + ["12", "--out", str(b)])
        assert a.read_bytes() != b.read_bytes()

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "nativeising", "units"],
                              capture_output=True, text=True, check=True)
        assert "multiplier" in proc.stdout
