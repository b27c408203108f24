"""End-to-end runs of every subcommand through the argv entry point."""

import json
from pathlib import Path

import pytest

from hitchlab import cli


def run(argv):
    return cli.main([str(a) for a in argv])


def test_strata_subcommand(tmp_path, capsys):
    rc = run(["strata", "--g", 2, "--orders", "2,1,1", "--outdir", tmp_path])
    assert rc == 0
    record = json.loads((tmp_path / "strata.json").read_text())
    assert record["g_tilde"] == 4
    assert record["prym_dim"] == 2
    assert record["base_dim"] == 2
    assert record["v_max"] == [1, 0, 0]
    shapes = {tuple(s["divisor"]): s for s in record["fiber_shapes"]}
    assert shapes[(1, 0, 0)]["k1"] == 0 and shapes[(1, 0, 0)]["k2"] == 0
    assert shapes[(0, 0, 0)]["total_dim"] == 3
    # the closed-form k2 disagrees with the per-zero count on this stratum
    assert not shapes[(1, 0, 0)]["k2_printed_matches"]
    assert (tmp_path / "manifest.json").exists()


def test_strata_bad_partition_exit_2(tmp_path):
    assert run(["strata", "--g", 2, "--orders", "3,3", "--outdir", tmp_path]) == 2


def test_hecke_subcommand_model_file(tmp_path):
    model = {"n": 4, "v": 0, "u": [[0.5, 0.0], [0.0, 1.0]]}
    mfile = tmp_path / "model.json"
    mfile.write_text(json.dumps(model))
    rc = run(["hecke", "--model", mfile, "--outdir", tmp_path])
    assert rc == 0
    record = json.loads((tmp_path / "hecke.json").read_text())
    assert record["det_is_minus_z_n"] is True
    assert record["locally_fiducial"] is False
    det = record["det_coeffs"]
    assert det[4] == [-1.0, 0.0] and all(c == [0.0, 0.0] for c in det[:4])


def test_psi_subcommand_check(tmp_path):
    rc = run(["psi", "--m", 1, "--d", 0, "--check", "--outdir", tmp_path, "--plot-data"])
    assert rc == 0
    header = (tmp_path / "psi.csv").read_text().splitlines()[0]
    assert header == "rho,psi,dpsi_drho,pi_psi_over_k0"
    assert (tmp_path / "psi.dat").exists()
    summary = json.loads((tmp_path / "psi.json").read_text())
    assert 0.98 < summary["k0_ratio_min"] <= summary["k0_ratio_max"] < 1.02


def test_psi_underresolved_check_exit_3(tmp_path):
    rc = run(["psi", "--a", 0.3333333333333333, "--nodes", 40, "--tol", "1e-6",
              "--check", "--outdir", tmp_path, "--no-plots"])
    assert rc == 3


def test_ray_decay_subcommand(tmp_path):
    rc = run(["ray-decay", "--m", 1, "--d", 0, "--outdir", tmp_path, "--no-plots"])
    assert rc == 0
    summary = json.loads((tmp_path / "ray_decay.json").read_text())
    assert summary["strictly_decreasing"] is True
    assert abs(summary["relative_gap"]) < 0.10
    rows = (tmp_path / "ray_decay.csv").read_text().splitlines()
    assert rows[0] == "t,distance" and len(rows) == 8


def test_ray_decay_unreachable_window_exit_3(tmp_path):
    rc = run(["ray-decay", "--m", 1, "--d", 0, "--max-rho", 10.0,
              "--outdir", tmp_path, "--no-plots"])
    assert rc == 3


def test_glue_error_subcommand(tmp_path):
    rc = run(["glue-error", "--m", 1, "--d", 0, "--outdir", tmp_path, "--no-plots"])
    assert rc == 0
    summary = json.loads((tmp_path / "glue_error.json").read_text())
    assert summary["support_violation_max"] == 0.0
    assert abs(summary["relative_gap"]) < 0.15


def test_periods_subcommand(tmp_path):
    cycles = [
        {"type": "circle", "center": [-0.5, 0.0], "radius": 0.75},
        {"type": "circle", "center": [0.5, 0.0], "radius": 0.75},
    ]
    cfile = tmp_path / "cycles.json"
    cfile.write_text(json.dumps(cycles))
    rc = run(["periods", "--poly", "0,-1,0,1", "--cycles", cfile, "--outdir", tmp_path,
              "--no-plots"])
    assert rc == 0
    record = json.loads((tmp_path / "periods.json").read_text())
    tau = record["tau"][0][0]
    assert abs(tau[0]) < 1e-6 and abs(tau[1] - 1.0) < 1e-6


def test_periods_segment_list_schema(tmp_path):
    two_pi = 6.283185307179586
    cycles = [
        [{"type": "arc", "center": [-0.5, 0.0], "radius": 0.75, "theta0": 0.0, "theta1": two_pi}],
        [{"type": "arc", "center": [0.5, 0.0], "radius": 0.75, "theta0": 0.0, "theta1": two_pi}],
    ]
    cfile = tmp_path / "cycles.json"
    cfile.write_text(json.dumps(cycles))
    rc = run(["periods", "--poly", "0,-1,0,1", "--cycles", cfile, "--outdir", tmp_path,
              "--no-plots"])
    assert rc == 0
    record = json.loads((tmp_path / "periods.json").read_text())
    assert abs(record["tau"][0][0][1] - 1.0) < 1e-6


def test_sk_metric_subcommand(tmp_path):
    rc = run(["sk-metric", "--q", "0,1", "--qdot", "1", "--pullback-check",
              "--outdir", tmp_path])
    assert rc == 0
    record = json.loads((tmp_path / "sk_metric.json").read_text())
    import math

    assert abs(record["energy"] - math.pi / 2) < 1e-4
    assert record["pullback"]["discrepancy"] < 1e-6


def test_config_file_replaces_flags(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"a": 0.25, "nodes": 800}))
    rc = run(["psi", "--config", cfg, "--outdir", tmp_path, "--no-plots"])
    assert rc == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["params"]["a"] == 0.25
    assert manifest["params"]["nodes"] == 800


def test_config_accepts_json_native_lists(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"m": 1, "d": 0, "t_list": [2, 3, 4, 6, 8]}))
    rc = run(["ray-decay", "--config", cfg, "--outdir", tmp_path, "--no-plots"])
    assert rc == 0
    summary = json.loads((tmp_path / "ray_decay.json").read_text())
    assert summary["t_values"] == [2.0, 3.0, 4.0, 6.0, 8.0]


def test_unknown_config_key_exit_2(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(["psi", "--a", 0.3, "--config", cfg, "--outdir", tmp_path]) == 2


def test_byte_reproducibility(tmp_path):
    argv = ["ray-decay", "--m", 2, "--d", 0, "--outdir", tmp_path, "--no-plots"]
    assert run(argv) == 0
    first = {
        f.name: f.read_bytes() for f in tmp_path.iterdir() if f.suffix in (".csv", ".json")
    }
    assert run(argv) == 0
    second = {
        f.name: f.read_bytes() for f in tmp_path.iterdir() if f.suffix in (".csv", ".json")
    }
    assert first == second and first


def test_manifest_suffices_to_rerun(tmp_path):
    d1 = tmp_path / "first"
    d2 = tmp_path / "second"
    assert run(["psi", "--a", 0.4, "--nodes", 900, "--outdir", d1, "--no-plots"]) == 0
    manifest = json.loads((d1 / "manifest.json").read_text())
    argv = [manifest["subcommand"]]
    for key, value in manifest["params"].items():
        if key == "outdir":
            argv += ["--outdir", str(d2)]
        elif isinstance(value, bool):
            if value:
                argv.append("--" + key.replace("_", "-"))
        elif value is not None:
            argv += ["--" + key.replace("_", "-"), str(value)]
    assert run(argv) == 0
    assert (d1 / "psi.csv").read_bytes() == (d2 / "psi.csv").read_bytes()


def test_check_subcommand_fault_injection(tmp_path, capsys):
    rc = run(["check", "--inject", "psi-rhs:1.01", "--outdir", tmp_path, "--no-plots"])
    assert rc == 1
    out = capsys.readouterr().out
    assert "[FAIL] painleve.ode_residual" in out
    report = json.loads((tmp_path / "check.json").read_text())
    failed = [r["name"] for r in report if not r["passed"]]
    assert failed == ["painleve.ode_residual"]
    # wall time recorded for every check
    assert all(r["seconds"] >= 0 for r in report)
