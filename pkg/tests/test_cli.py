"""Command line behavior: output shapes, determinism, exit codes."""

import json
import subprocess
import sys

import pytest

from cavnet.cli import dump_json, main


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "cavnet", *args],
        capture_output=True,
        text=True,
        timeout=120,
    )


def test_run_scheme_ghz_json_shape():
    proc = run_cli("run-scheme", "ghz-atoms", "--n", "2")
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["scheme"]["name"] == "ghz-atoms"
    assert payload["scheme"]["n"] == 2
    outcomes = payload["outcomes"]
    assert [o["detector"] for o in outcomes] == ["D1", "D2"]
    for o in outcomes:
        assert o["probability"] == pytest.approx(0.5, abs=1e-12)
        assert o["fidelity"] == pytest.approx(1.0, abs=1e-12)


def test_run_scheme_output_is_byte_identical():
    a = run_cli("run-scheme", "w3-det")
    b = run_cli("run-scheme", "w3-det")
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout


def test_run_scheme_graph_from_file(tmp_path):
    spec = tmp_path / "g.json"
    spec.write_text(json.dumps({"vertices": 3, "edges": [[0, 1], [1, 2]]}))
    proc = run_cli("run-scheme", "graph", "--graph", str(spec))
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert sum(o["probability"] for o in payload["outcomes"]) == pytest.approx(1.0)


def test_run_scheme_usage_errors(tmp_path):
    assert run_cli("run-scheme", "ghz-atoms").returncode == 2  # missing --n
    assert run_cli("run-scheme", "ghz-atoms", "--n", "3").returncode == 2
    assert run_cli("run-scheme", "nosuch").returncode == 2
    proc = run_cli("run-scheme", "graph", "--kind", "ring", "--n", "3")
    assert proc.returncode == 0
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli("run-scheme", "graph", "--graph", str(bad)).returncode == 2
    loop = tmp_path / "loop.json"
    loop.write_text(json.dumps({"vertices": 2, "edges": [[0, 0]]}))
    assert run_cli("run-scheme", "graph", "--graph", str(loop)).returncode == 2
    both = tmp_path / "g.json"
    both.write_text(json.dumps({"vertices": 2, "edges": [[0, 1]]}))
    assert (
        run_cli(
            "run-scheme", "graph", "--graph", str(both), "--kind", "ring", "--n", "3"
        ).returncode
        == 2
    )


def test_flip_sweep_csv_and_out_file(tmp_path):
    proc = run_cli("flip-sweep", "--g", "1", "--tau", "1,2")
    assert proc.returncode == 0
    lines = proc.stdout.split("\n")
    assert lines[0] == "g_over_kappa,kappa_tau,P_flip"
    assert len(lines) == 4 and lines[-1] == ""
    out = tmp_path / "sweep.csv"
    proc2 = run_cli("flip-sweep", "--g", "1", "--tau", "1,2", "--out", str(out))
    assert proc2.returncode == 0
    assert out.read_text() == proc.stdout


def test_flip_sweep_tau_range_is_log_spaced():
    proc = run_cli("flip-sweep", "--g", "1", "--tau-range", "1:4:3")
    assert proc.returncode == 0
    taus = [float(line.split(",")[1]) for line in proc.stdout.splitlines()[1:]]
    assert taus == pytest.approx([1.0, 2.0, 4.0])


def test_flip_sweep_usage_errors():
    assert run_cli("flip-sweep", "--g", "1").returncode == 2  # no tau at all
    assert (
        run_cli(
            "flip-sweep", "--g", "1", "--tau", "1", "--tau-range", "1:2:2"
        ).returncode
        == 2
    )
    assert run_cli("flip-sweep", "--g", "abc", "--tau", "1").returncode == 2
    assert run_cli("flip-sweep", "--g", "1", "--tau-range", "1:2").returncode == 2
    assert run_cli("flip-sweep", "--g", "-1", "--tau", "1").returncode == 2


def test_flip_sweep_blowup_exits_three():
    # legal step for the guard, hopeless for the coupling: a diagnosed
    # contract violation must map to exit code 3
    proc = run_cli("flip-sweep", "--g", "10000", "--tau", "1", "--step", "0.02")
    assert proc.returncode == 3
    assert "internal error" in proc.stderr


def test_retry_walk_json_and_mc():
    proc = run_cli(
        "retry-walk", "--p", "0.8", "--n", "4", "--mc-trajectories", "20000",
        "--seed", "7",
    )
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["p_flip"] == pytest.approx(0.8)
    assert payload["n_cavities"] == 4
    assert payload["conditional_fidelity"] == 1.0
    assert abs(payload["mc_success_prob"] - payload["success_prob"]) < 0.02
    rerun = run_cli(
        "retry-walk", "--p", "0.8", "--n", "4", "--mc-trajectories", "20000",
        "--seed", "7",
    )
    assert rerun.stdout == proc.stdout


def test_retry_walk_degenerate_p_exits_two():
    assert run_cli("retry-walk", "--p", "0", "--n", "4").returncode == 2
    assert run_cli("retry-walk", "--p", "1.5", "--n", "4").returncode == 2
    assert run_cli("retry-walk", "--p", "0.5", "--n", "0").returncode == 2


def test_main_callable_in_process(capsys):
    code = main(["retry-walk", "--p", "1", "--n", "3"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["expected_steps"] == 3.0


def test_dump_json_formatting():
    text = dump_json({"a": 1.0, "b": [0.5, None, True], "c": "x"})
    assert '"a": 1.0' in text
    assert "null" in text and "true" in text
    parsed = json.loads(text)
    assert parsed == {"a": 1.0, "b": [0.5, None, True], "c": "x"}
