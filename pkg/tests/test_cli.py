import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qwgates.cli import main
from qwgates.config import load_config, parse_config
from qwgates.propagate import approximation_report

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(*argv):
    return main([str(a) for a in argv])


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


@pytest.mark.parametrize("name", ["lambda_resonant.json", "lambda_coined.json"])
def test_simulate_writes_records(tmp_path, name):
    assert run("simulate", "-c", CONFIGS / name, "-o", tmp_path) == 0
    header, data = read_csv(tmp_path / "trajectory.csv")
    assert header == ["t", "tau", "P_0", "P_1", "P_2", "norm", "leakage"]
    assert np.allclose(data[:, 2:5].sum(axis=1), 1.0, atol=1e-9)
    assert np.all((data[:, 2:5] >= 0) & (data[:, 2:5] <= 1))
    final = json.loads((tmp_path / "final_state.json").read_text())
    assert set(final["amplitudes"]) == {"0", "1", "2"}
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["norm_drift"] < 1e-9


def test_simulate_resonant_unitary_record(tmp_path):
    assert run("simulate", "-c", CONFIGS / "lambda_resonant.json", "-o", tmp_path) == 0
    rec = json.loads((tmp_path / "unitary.json").read_text())
    u = np.array([[complex(*z) for z in row] for row in rec["matrix"]])
    assert rec["labels"] == ["0", "1", "2"]
    assert np.allclose(u.conj().T @ u, np.eye(3), atol=1e-12)


def test_outputs_are_byte_identical(tmp_path):
    for k in (1, 2):
        assert run("simulate", "-c", CONFIGS / "lambda_coined.json", "-o", tmp_path / str(k)) == 0
    for name in ("trajectory.csv", "final_state.json", "report.json"):
        assert (tmp_path / "1" / name).read_bytes() == (tmp_path / "2" / name).read_bytes()


def test_overrides_change_the_mode(tmp_path):
    assert run("simulate", "-c", CONFIGS / "lambda_coined.json", "-o", tmp_path, "--mode", "rwa",
               "--dt", "0.05", "--coin-levels", "3") == 0
    assert json.loads((tmp_path / "report.json").read_text())["mode"] == "rwa"


def test_compare_matches_library(tmp_path):
    cfg_path = CONFIGS / "lambda_coined.json"
    assert run("compare", "-c", cfg_path, "-o", tmp_path) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    cfg = load_config(str(cfg_path))
    direct = approximation_report(cfg.graph, cfg.pulses[0], cfg.initial, cfg.simulation.dt, cfg.simulation.coin_levels)
    assert report["distances"] == direct.distances
    assert set(report["distances"]) == {"exact-full", "full-rwa", "rwa-resonant"}


def test_verify_z_prints_fidelity(tmp_path, capsys):
    assert run("verify", "-c", CONFIGS / "lambda_z_gate.json", "-o", tmp_path) == 0
    line = capsys.readouterr().out.strip().splitlines()[-1]
    assert line.startswith("Z [resonant]: fidelity")
    assert float(line.split()[-1]) >= 1 - 1e-10
    rec = json.loads((tmp_path / "unitary.json").read_text())
    assert len(rec["matrix"]) == 2


def test_verify_cz(tmp_path):
    assert run("verify", "-c", CONFIGS / "two_qutrit_cz.json", "-o", tmp_path, "--min-fidelity", "0.999999") == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["fidelity"] >= 1 - 1e-6


@pytest.mark.parametrize("gate", ["z", "h", "cz"])
def test_synthesize_emits_runnable_config(tmp_path, gate):
    assert run("synthesize", gate, "-o", tmp_path) == 0
    syn = json.loads((tmp_path / "synthesis.json").read_text())
    assert syn["achieved_fidelity"] >= 1 - 1e-9
    cfg = parse_config((tmp_path / "gate_config.json").read_text())
    assert len(cfg.pulses) == 1
    assert run("simulate", "-c", tmp_path / "gate_config.json", "-o", tmp_path / "sim") == 0


def test_reduce_output_round_trips(tmp_path):
    assert run("reduce", "-c", CONFIGS / "diamond_reduce.json", "-o", tmp_path) == 0
    reduced = parse_config((tmp_path / "reduced_graph.json").read_text()).graph
    assert set(reduced.labels) == {"a", "c", "b+d", "b-d"}
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["steps"][0]["spectrum_error"] < 1e-12


def test_reduce_with_explicit_rotation(tmp_path):
    doc = json.loads((CONFIGS / "diamond_reduce.json").read_text())
    s = 2 ** -0.5
    doc["reduce"] = [{"support": ["b", "d"], "matrix": [[[s, 0], [s, 0]], [[s, 0], [-s, 0]]],
                      "new_labels": ["p", "m"]}]
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    assert run("reduce", "-c", path, "-o", tmp_path / "out") == 0
    reduced = parse_config((tmp_path / "out" / "reduced_graph.json").read_text()).graph
    assert set(reduced.labels) == {"a", "c", "p", "m"}


def test_line_demo(tmp_path, capsys):
    assert run("line-demo", "--steps", "100", "-o", tmp_path) == 0
    header, data = read_csv(tmp_path / "distribution.csv")
    assert header == ["site", "probability"]
    assert data[:, 1].sum() == pytest.approx(1.0, abs=1e-12)
    assert "mean position" in capsys.readouterr().out


def test_exit_codes(tmp_path):
    assert run("simulate", "-c", tmp_path / "missing.json", "-o", tmp_path) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"qubit_count": 1, "unknown": 3}')
    assert run("simulate", "-c", bad, "-o", tmp_path) == 2
    assert run("synthesize", "cz", "--n", "4", "-o", tmp_path) == 7
    leak = json.loads((CONFIGS / "lambda_coined.json").read_text())
    leak["pulses"][0]["components"][0]["amp"] = [2.0, 0.0]
    leak["simulation"]["coin_levels"] = 1
    (tmp_path / "leak.json").write_text(json.dumps(leak))
    assert run("simulate", "-c", tmp_path / "leak.json", "-o", tmp_path) == 5
    assert run("verify", "z", "--mode", "rwa", "--dt", "0.02", "--min-fidelity", "0.9999999", "-o", tmp_path) == 8


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "qwgates.cli", "line-demo", "--steps", "3", "-o", str(tmp_path)],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "finished in" in out.stderr
    assert "finished" not in out.stdout
