import json
import math
import subprocess
import sys

import pytest

from robq.cli import main

INTRO = {
    "qubits": 1,
    "gates": [{"name": "rz", "qubits": [0], "params": ["pi/4"]}, {"name": "ry", "qubits": [0], "params": ["pi/2"]}],
    "noise": {"eps_bar": 0.2},
}


@pytest.fixture
def intro_file(tmp_path):
    p = tmp_path / "intro.json"
    p.write_text(json.dumps(INTRO))
    return str(p)


def test_analyze_table(intro_file, capsys):
    assert main(["analyze", intro_file]) == 0
    out = capsys.readouterr().out
    assert "1.178097" in out  # 3 pi / 8


def test_analyze_json_preset(capsys):
    assert main(["analyze", "--preset", "intro", "--eps-bar", "0.2", "--json", "--mode", "phase-opt"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["L_norm"] == pytest.approx(3 * math.pi / 8)
    assert d["fidelity_bound"] == pytest.approx(0.97224, abs=5e-6)


def test_compare_ranks(capsys):
    assert main(["compare", "preset:intro-prime", "preset:intro", "--json", "--samples", "50"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert [r["circuit"] for r in rows] == ["preset:intro", "preset:intro-prime"]
    assert rows[0]["rank"] == 1 and "min_fidelity" in rows[0]


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze"],
        ["simulate", "--preset", "intro", "--samples", "0"],
        ["simulate", "--preset", "intro", "--psi0", "5"],
        ["compare", "preset:nope"],
        ["frobnicate"],
        ["analyze", "missing-file.json"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_schema_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"qubits": 1, "gates": [{"name": "x", "qubits": [3]}]}')
    assert main(["analyze", str(bad)]) == 2
    assert "qubits" in capsys.readouterr().err
    bad.write_text("{oops")
    assert main(["analyze", str(bad)]) == 2
    assert capsys.readouterr().out == ""


def test_simulate_writes_csv_and_manifest(tmp_path, capsys):
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--preset", "intro", "--seed", "3", "--out", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["samples"] == 500 and 0.975 <= summary["min_fidelity"] <= 0.995
    lines = out.read_text().splitlines()
    assert lines[0] == "circuit,level,eps_bar,sample,eps_0,eps_1,fidelity" and len(lines) == 501
    man = json.loads((tmp_path / "sim.csv.manifest.json").read_text())
    assert man["master_seed"] == 3 and man["command"] == "simulate" and man["format"] == "csv"


def _csv(tmp_path, name, argv):
    out = tmp_path / name
    assert main(argv + ["--out", str(out)]) == 0
    return out.read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--preset", "qft", "--samples", "5000", "--eps-bar", "0.05"],
        ["validation-sweep", "--levels", "3", "--samples", "4", "--shots", "500"],
        ["vqa", "--study", "--lambdas", "0", "0.1", "--seeds", "2", "--iters", "4", "--restarts", "2"],
        ["qft-study", "--samples", "300"],
    ],
)
def test_outputs_byte_identical_across_threads(tmp_path, argv, capsys):
    a = _csv(tmp_path, "a.csv", argv + ["--seed", "11", "--threads", "1"])
    b = _csv(tmp_path, "b.csv", argv + ["--seed", "11", "--threads", "3"])
    c = _csv(tmp_path, "c.csv", argv + ["--seed", "11", "--threads", "1"])
    assert a == b == c
    d = _csv(tmp_path, "d.csv", argv + ["--seed", "12"])
    assert d != a


def test_env_seed(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("ROBQ_SEED", "11")
    a = _csv(tmp_path, "a.csv", ["simulate", "--preset", "intro"])
    b = _csv(tmp_path, "b.csv", ["simulate", "--preset", "intro", "--seed", "11"])
    assert a == b


def test_vqa_single_run(capsys):
    assert main(["vqa", "--lambda", "0.1", "--iters", "3", "--restarts", "1"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["lambda"] == 0.1 and len(d["final_theta"]) == 3


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "robq.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("robq ")
