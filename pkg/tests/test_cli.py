import csv
import filecmp
import json
import os

import numpy as np

from markovlens.cli import main
from markovlens.config import load_config, matrix_from_json, matrix_to_json, \
    validate_verdict_report
from markovlens.reports import read_json


def write_config(path, **overrides):
    cfg = {
        "family": {"preset": "amplitude_damping",
                   "params": {"g": {"kind": "cosine_clipped", "omega": 1.0,
                                    "t_star": 1.5707963267948966}}},
        "grid": {"t_max": 3.141592653589793, "n_points": 101},
        "tasks": ["verdict", "rates", "blp", "witness_scan", "extend"],
        "witness": {"ancilla_kind": "d", "n_samples": 6, "n_refine": 2, "seed": 11},
        "output": str(path.parent / "out"),
    }
    cfg.update(overrides)
    path.write_text(json.dumps(cfg))
    return cfg


def test_matrix_json_round_trip(rng):
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.array_equal(matrix_from_json(matrix_to_json(m)), m)


def test_analyze_writes_all_artifacts(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    write_config(cfg_path)
    assert main(["analyze", "--config", str(cfg_path)]) == 0
    out = tmp_path / "out"
    for name in ("verdict.json", "rank_profile.csv", "rates.csv",
                 "rates_summary.json", "blp.json", "blp_trajectory.csv",
                 "best_witness.json", "witness_trajectory.csv",
                 "feasibility.json"):
        assert (out / name).exists(), name

    verdict = read_json(out / "verdict.json")
    validate_verdict_report(verdict)
    assert verdict["status"] == "CP_DIVISIBLE"
    assert len(verdict["evidence"]["breakpoints"]) == 1

    feas = read_json(out / "feasibility.json")
    assert feas["results"][0]["status"] == "FEASIBLE"
    assert (out / feas["results"][0]["choi_file"]).exists()

    rates_summary = read_json(out / "rates_summary.json")
    assert rates_summary["n_regular"] > 0
    assert len(rates_summary["singular_times"]) > 0


def test_rank_profile_csv_shape(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    write_config(cfg_path, tasks=["verdict"])
    assert main(["analyze", "--config", str(cfg_path)]) == 0
    with open(tmp_path / "out" / "rank_profile.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "sigma_1", "sigma_2", "sigma_3", "sigma_4", "rank"]
    assert len(rows) == 102
    # 17-significant-digit floats survive the round trip exactly
    val = float(rows[5][1])
    assert format(val, ".17g") == rows[5][1]


def test_witness_csv_has_empty_endpoint_derivatives(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    write_config(cfg_path, tasks=["witness_scan"])
    assert main(["analyze", "--config", str(cfg_path)]) == 0
    with open(tmp_path / "out" / "witness_trajectory.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "norm", "derivative"]
    assert rows[1][2] == "" and rows[-1][2] == ""
    assert rows[2][2] != ""


def test_bit_identical_reruns(tmp_path):
    cfg_a = tmp_path / "a.json"
    write_config(cfg_a, output=str(tmp_path / "out_a"),
                 grid={"t_max": 3.141592653589793, "n_points": 61})
    cfg_b = tmp_path / "b.json"
    write_config(cfg_b, output=str(tmp_path / "out_b"),
                 grid={"t_max": 3.141592653589793, "n_points": 61})
    assert main(["analyze", "--config", str(cfg_a)]) == 0
    assert main(["analyze", "--config", str(cfg_b)]) == 0
    names = sorted(os.listdir(tmp_path / "out_a"))
    assert names == sorted(os.listdir(tmp_path / "out_b"))
    match, mismatch, errors = filecmp.cmpfiles(
        tmp_path / "out_a", tmp_path / "out_b", names, shallow=False)
    assert mismatch == [] and errors == []


def test_seed_override(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    write_config(cfg_path, tasks=["witness_scan"])
    assert main(["analyze", "--config", str(cfg_path), "--seed", "99"]) == 0
    best = read_json(tmp_path / "out" / "best_witness.json")
    assert best["seed"] == 99


def test_unknown_preset_exit_2(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "family": {"preset": "bogus", "params": {}},
        "grid": {"t_max": 1.0}, "tasks": ["verdict"], "output": str(tmp_path)}))
    assert main(["analyze", "--config", str(cfg_path)]) == 2
    err = capsys.readouterr().err
    assert "amplitude_damping" in err and "pauli_channel" in err


def test_unknown_key_exit_2(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg = write_config(cfg_path)
    cfg["surprise"] = True
    cfg_path.write_text(json.dumps(cfg))
    assert main(["analyze", "--config", str(cfg_path)]) == 2


def test_missing_config_exit_2(tmp_path):
    assert main(["analyze", "--config", str(tmp_path / "nope.json")]) == 2


def test_numerical_failure_exit_3(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    write_config(cfg_path, family={
        "preset": "pauli_channel",
        "params": {"gammas": [{"kind": "constant", "value": -1.0},
                              {"kind": "constant", "value": 0.0},
                              {"kind": "constant", "value": 0.0}]}},
        tasks=["verdict"])
    assert main(["analyze", "--config", str(cfg_path)]) == 3
    err = capsys.readouterr().err
    assert "stage" in err


def test_report_summarizes(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    write_config(cfg_path, tasks=["verdict"])
    assert main(["analyze", "--config", str(cfg_path)]) == 0
    assert main(["report", "--in", str(tmp_path / "out")]) == 0
    out = capsys.readouterr().out
    assert "verdict.json" in out and "CP_DIVISIBLE" in out


def test_report_empty_dir_exit_2(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert main(["report", "--in", str(empty)]) == 2
    assert main(["report", "--in", str(tmp_path / "missing")]) == 2


def test_witness_scan_subcommand(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    write_config(cfg_path, tasks=["verdict"])  # subcommand overrides tasks
    assert main(["witness-scan", "--config", str(cfg_path),
                 "--out", str(tmp_path / "ws")]) == 0
    best = read_json(tmp_path / "ws" / "best_witness.json")
    assert best["no_violation_found"] is True


def test_extend_subcommand(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    write_config(cfg_path, tasks=["verdict"])
    assert main(["extend", "--config", str(cfg_path),
                 "--out", str(tmp_path / "ex")]) == 0
    feas = read_json(tmp_path / "ex" / "feasibility.json")
    assert all(r["status"] == "FEASIBLE" for r in feas["results"])


def test_config_blp_states_round_trip(tmp_path):
    rho1 = matrix_to_json(np.diag([1.0, 0.0]).astype(complex))
    rho2 = matrix_to_json(np.diag([0.0, 1.0]).astype(complex))
    cfg_path = tmp_path / "cfg.json"
    write_config(cfg_path, tasks=["blp"], blp={"rho1": rho1, "rho2": rho2})
    cfg = load_config(str(cfg_path))
    assert cfg.blp["rho1"] == rho1
    assert main(["analyze", "--config", str(cfg_path)]) == 0
