import json
import subprocess
import sys

import numpy as np
import pytest

from aeset.core import state_set_from_dict
from aeset.separability import unitary_from_dict


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "aeset.cli", *args],
                          capture_output=True, text=True)


def test_help_runs():
    proc = run_cli("--help")
    assert proc.returncode == 0
    assert "construct" in proc.stdout


def test_construct_star_and_check(tmp_path):
    out = tmp_path / "star.json"
    proc = run_cli("construct", "star", "--partition", "2x2", "--a", "0.8",
                   "--out", str(out))
    assert proc.returncode == 0
    states = state_set_from_dict(json.loads(out.read_text()))
    assert states.n_states == 4 and states.dim == 4
    manifest = json.loads((tmp_path / "star.json.manifest.json").read_text())
    assert manifest["outputs"]
    assert manifest["argv"][0] == "aeset"

    proc = run_cli("check", "--states", str(out), "--json")
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    assert report["any_detected"] is True


def test_construct_family_aliases(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert run_cli("construct", "star", "--partition", "2x4", "--a", "0.7",
                   "--out", str(a)).returncode == 0
    assert run_cli("construct", "theorem4", "--partition", "2x4", "--a", "0.7",
                   "--out", str(b)).returncode == 0
    va = state_set_from_dict(json.loads(a.read_text())).vectors
    vb = state_set_from_dict(json.loads(b.read_text())).vectors
    assert np.array_equal(va, vb)


def test_construct_unknown_family_exit_2():
    assert run_cli("construct", "nonsense", "--a", "0.5").returncode == 2


def test_bad_partition_exit_2():
    proc = run_cli("volume", "--partition", "2xbanana", "--n", "4",
                   "--samples", "10", "--seed", "1")
    assert proc.returncode == 2


def test_malformed_states_file_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"d": 4, "states": [[[1, 0]')
    proc = run_cli("check", "--states", str(bad))
    assert proc.returncode == 2
    assert "line" in proc.stderr


def test_volume_lower_deterministic(tmp_path):
    args = ("volume", "--partition", "2x2", "--n", "4", "--samples", "500",
            "--seed", "321", "--method", "lower", "--json")
    first = run_cli(*args)
    second = run_cli(*args)
    assert first.returncode == 0
    assert json.loads(first.stdout)["detected"] == json.loads(second.stdout)["detected"]


def test_volume_csv_append(tmp_path):
    csv_path = tmp_path / "runs.csv"
    for seed in ("1", "2"):
        assert run_cli("volume", "--partition", "2x2", "--n", "4", "--samples", "50",
                       "--seed", seed, "--method", "lower",
                       "--csv", str(csv_path)).returncode == 0
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0].startswith("partition,")
    assert len(lines) == 3


def test_volume_manifest_replay_bitwise(tmp_path):
    out = tmp_path / "vol.json"
    args = ("volume", "--partition", "2x2", "--n", "4", "--samples", "400",
            "--seed", "777", "--method", "lower", "--out", str(out))
    assert run_cli(*args).returncode == 0
    manifest = json.loads((tmp_path / "vol.json.manifest.json").read_text())
    first = out.read_bytes()
    first_digest = manifest["outputs"][str(out)]
    # replay the recorded argv (dropping the program name)
    assert run_cli(*manifest["argv"][1:]).returncode == 0
    assert out.read_bytes() == first
    import hashlib
    assert hashlib.sha256(first).hexdigest() == first_digest


def test_amin_table_csv(tmp_path):
    out = tmp_path / "table.csv"
    proc = run_cli("amin-table", "--d", "32", "--out", str(out))
    assert proc.returncode == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].split(",")[0] == "partition"
    assert lines[-1].startswith("all,18")


def test_minimize_reports_entropy(tmp_path):
    out = tmp_path / "star.json"
    run_cli("construct", "star", "--partition", "2x2", "--a", "0.9", "--out", str(out))
    proc = run_cli("minimize", "--states", str(out), "--partition", "2x2",
                   "--seed", "5", "--restarts", "2", "--json")
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    assert report["classified_aes"] is True
    assert report["min_total_entropy"] > 1e-8


def test_disentangle_three_states(tmp_path):
    # three Haar states written by hand, then disentangled via the CLI
    from aeset.core import haar_random_state_set, save_state_set
    from aeset.rng import RunSeed

    path = tmp_path / "three.json"
    save_state_set(haar_random_state_set(4, 3, RunSeed(77)), path)
    proc = run_cli("disentangle", "--states", str(path), "--partition", "2x2", "--json")
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    u = unitary_from_dict(report["unitary"])
    assert u.dim == 4
    assert max(report["residuals"]) < 1e-10


def test_disentangle_too_many_states_exit_3(tmp_path):
    from aeset.core import haar_random_state_set, save_state_set
    from aeset.rng import RunSeed

    path = tmp_path / "five.json"
    save_state_set(haar_random_state_set(4, 5, RunSeed(78)), path)
    proc = run_cli("disentangle", "--states", str(path), "--partition", "2x2")
    assert proc.returncode == 3


def test_critical_a_star(tmp_path):
    proc = run_cli("critical-a", "--family", "star", "--partition", "2x2", "--json")
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    assert report["overall"] == pytest.approx(0.5, abs=2e-3)
