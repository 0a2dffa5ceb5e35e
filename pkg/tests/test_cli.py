"""Command-line interface: files out, determinism, exit codes."""
import json
import math
from pathlib import Path

import numpy as np
import pytest

from aerialcov.cli import main

ROOT_URBAN = Path(__file__).resolve().parent.parent / "urban.cfg"


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _write_cfg(tmp_path, base=ROOT_URBAN, **overrides):
    lines = []
    seen = set()
    for line in open(base):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key = stripped.split("=")[0].strip()
        if key in overrides:
            lines.append(f"{key} = {overrides.pop(key)}")
            seen.add(key)
        else:
            lines.append(stripped)
    lines.extend(f"{k} = {v}" for k, v in overrides.items())
    path = tmp_path / "net.cfg"
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def test_coverage_sweep_csv_contract(tmp_path, capsys):
    cfg = _write_cfg(tmp_path)
    out = tmp_path / "cov.csv"
    code, _, _ = _run(capsys, "coverage-sweep", "--config", cfg,
                      "--iters", "200", "--seed", "3",
                      "--sweep", "lambda_p_per_km=0,0.5",
                      "--out", str(out))
    assert code == 0
    text = out.read_text()
    lines = text.strip().splitlines()
    header = [ln for ln in lines if ln.startswith("#")]
    assert any("config_hash=" in ln for ln in header)
    assert any("seed=3" in ln for ln in header)
    body = [ln for ln in lines if not ln.startswith("#")]
    assert body[0] == ("lambda_p_per_km,analytic_p_cov,mc_p_cov,mc_ci_lo,"
                       "mc_ci_hi,p_tb_l,p_tb_n,p_db_l,p_db_n")
    assert len(body) == 3
    first = body[1].split(",")
    assert float(first[0]) == 0.0
    # without roads the dedicated shares vanish
    assert float(first[7]) == 0.0 and float(first[8]) == 0.0
    for row in body[1:]:
        vals = [float(x) for x in row.split(",")]
        assert 0.0 <= vals[1] <= 1.0
        assert vals[3] <= vals[2] <= vals[4]


def test_coverage_sweep_reruns_byte_identical(tmp_path, capsys):
    cfg = _write_cfg(tmp_path)
    args = ("coverage-sweep", "--config", cfg, "--iters", "150",
            "--seed", "12", "--sweep", "tau_db=-5,5")
    code1, out1, _ = _run(capsys, *args)
    code2, out2, _ = _run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    code3, out3, _ = _run(capsys, *args[:-1] + ("tau_db=0,5",))
    assert code3 == 0 and out3 != out1


def test_coverage_sweep_requires_exactly_one_axis(tmp_path, capsys):
    cfg = _write_cfg(tmp_path)
    code, _, err = _run(capsys, "coverage-sweep", "--config", cfg,
                        "--iters", "50")
    assert code == 2
    assert "sweep" in err


def test_unknown_sweep_key_is_a_config_error(tmp_path, capsys):
    cfg = _write_cfg(tmp_path)
    code, _, err = _run(capsys, "coverage-sweep", "--config", cfg,
                        "--iters", "50", "--sweep", "nope=1,2")
    assert code == 2
    assert "unknown config key 'nope'" in err


def test_missing_config_key_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("\n".join(
        ln.strip() for ln in open(ROOT_URBAN)
        if ln.strip() and not ln.strip().startswith("#")
        and not ln.strip().startswith("alpha_l")) + "\n")
    code, _, err = _run(capsys, "coverage-sweep", "--config", str(bad),
                        "--iters", "50", "--sweep", "tau_db=0")
    assert code == 2
    assert "alpha_l" in err


def test_trajectory_demo_json_contract(tmp_path, capsys):
    cfg = _write_cfg(tmp_path)
    out = tmp_path / "demo.json"
    code, _, _ = _run(capsys, "trajectory-demo", "--config", cfg,
                      "--seed", "7", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    for key in ("meta", "window_half_side_km", "S_m", "D_m", "v_mps",
                "gamma_star_db", "radii_m", "tbs_m", "dedicated_m", "roads",
                "bs_sequence", "waypoints_m", "t_min_s", "total_length_m"):
        assert key in doc, key
    assert set(doc["meta"]) == {"config_hash", "seed", "tool_version"}
    assert doc["meta"]["seed"] == 7
    wp = np.asarray(doc["waypoints_m"], dtype=float)
    assert wp[0] == pytest.approx(doc["S_m"])
    assert wp[-1] == pytest.approx(doc["D_m"])
    # polyline length and travel time are consistent
    length = float(np.sum(np.hypot(*np.diff(wp, axis=0).T)))
    assert length == pytest.approx(doc["total_length_m"], rel=1e-9)
    assert doc["t_min_s"] == pytest.approx(length / doc["v_mps"], rel=1e-9)
    # every chain member lies in the drawn fields and has the kind radius
    for node in doc["bs_sequence"]:
        assert node["kind"] in ("tbs", "dedicated")
        assert node["radius_m"] == pytest.approx(
            doc["radii_m"][node["kind"]])
    for rho_phi in doc["roads"]:
        assert set(rho_phi) == {"rho_km", "phi_rad"}
        assert 0.0 <= rho_phi["phi_rad"] < math.pi

    rerun = tmp_path / "demo2.json"
    code2, _, _ = _run(capsys, "trajectory-demo", "--config", cfg,
                       "--seed", "7", "--out", str(rerun))
    assert code2 == 0
    assert rerun.read_text() == out.read_text()


def test_maxmin_sweep_columns_and_determinism(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, truncation_radius_km=4.0, L_km=2.0)
    args = ("maxmin-sweep", "--config", cfg, "--seed", "5", "--iters", "2",
            "--sweep", "lambda_p_per_km=0,0.4")
    code, out1, _ = _run(capsys, *args)
    assert code == 0
    body = [ln for ln in out1.strip().splitlines() if not ln.startswith("#")]
    assert body[0] == ("lambda_p_per_km,mean_gamma_star_db,mean_t_min_s,"
                       "success_rate,n_realizations")
    assert len(body) == 3
    for row in body[1:]:
        vals = row.split(",")
        assert int(vals[4]) == 2
        assert 0.0 <= float(vals[3]) <= 1.0
    _, out2, _ = _run(capsys, *args)
    assert out2 == out1


def test_validate_small_budget_passes(tmp_path, capsys):
    cfg = _write_cfg(tmp_path)
    code, out, _ = _run(capsys, "validate", "--config", cfg,
                        "--iters", "800", "--seed", "2")
    assert code == 0, out
    lines = [ln for ln in out.splitlines() if ln.startswith("[")]
    assert lines, "expected check lines"
    assert all(ln.startswith("[PASS]") for ln in lines), out
