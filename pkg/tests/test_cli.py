"""End-to-end command line runs (in process via cli.main)."""

import csv
import json
from pathlib import Path

import numpy as np
import pytest

from scatter1d.cli import main
from scatter1d.reporting import read_kernel


def _write_cfg(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def _read_table(path):
    """Rows of a metadata-prefixed CSV as a list of dicts of floats."""
    meta = {}
    with open(path) as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key.strip()] = val.strip()
        else:
            body.append(line)
    names = body[0].split(",")
    rows = [dict(zip(names, map(float, line.split(",")))) for line in body[1:]]
    return meta, names, rows


# ------------------------------ happy paths ---------------------------------


def test_smatrix_free_potential_identity(tmp_path):
    cfg = _write_cfg(tmp_path, "command=smatrix\nkind=gaussian_well\n"
                               "depth=0\nwidth=1\ncount=48\n")
    out = tmp_path / "out"
    assert main(["smatrix", "--config", cfg, "--out", str(out)]) == 0
    meta, names, rows = _read_table(out / "smatrix_sweep.csv")
    assert names[:2] == ["lam", "k"]
    assert meta["potential"] == "gaussian_well"
    for row in rows:
        assert abs(row["t_re"] - 1.0) < 1e-10 and abs(row["t_im"]) < 1e-10
        assert abs(row["r_left_re"]) < 1e-10
        assert row["unitarity_defect"] < 1e-10
    summary = json.loads((out / "spectral_summary.json").read_text())
    assert summary["n_bound"] == 0
    assert summary["meta"]["command"] == "smatrix"


def test_smatrix_reflectionless_sweep(tmp_path):
    cfg = _write_cfg(tmp_path, "command=smatrix\nkind=poschl_teller\n"
                               "depth=2\nwidth=1\ncount=64\n")
    out = tmp_path / "out"
    assert main(["smatrix", "--config", cfg, "--out", str(out)]) == 0
    _, _, rows = _read_table(out / "smatrix_sweep.csv")
    worst = max(np.hypot(r["r_left_re"], r["r_left_im"]) for r in rows)
    assert worst < 1e-6
    summary = json.loads((out / "spectral_summary.json").read_text())
    assert summary["n_bound"] == 1
    assert summary["resonance"].startswith("exceptional")


def test_levinson_closed_form_and_determinism(tmp_path):
    cfg = _write_cfg(tmp_path, "command=levinson\nalpha=-2\ncount=200\n")
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["levinson", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["levinson", "--config", cfg, "--out", str(out2)]) == 0
    rep = json.loads((out1 / "levinson_report.json").read_text())
    assert abs(rep["total"] + 1.0) < 1e-2
    assert rep["n_bound"] == 1 and rep["valid"]
    for name in ("levinson_report.json", "time_delay_integrand.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_point_command_artifacts(tmp_path):
    cfg = _write_cfg(tmp_path, "command=point\nalpha=-2\ncount=400\n")
    out = tmp_path / "out"
    assert main(["point", "--config", cfg, "--out", str(out)]) == 0
    rep = json.loads((out / "point_report.json").read_text())
    assert abs(rep["total"] + 1.0) < 1e-2
    assert rep["deficiency"] == 1
    assert rep["omega_band_count"] > 0
    _, _, rows = _read_table(out / "point_symbol.csv")
    mags = [np.hypot(r["symbol_re"], r["symbol_im"]) for r in rows]
    assert max(abs(m - 1.0) for m in mags) < 1e-12
    # profile integrates to unit norm on the grid
    _, _, prows = _read_table(out / "point_bound_profile.csv")
    xs = np.array([r["x"] for r in prows])
    us = np.array([r["profile"] for r in prows])
    assert abs(np.sum(us ** 2) * (xs[1] - xs[0]) - 1.0) < 1e-6

    cfg2 = _write_cfg(tmp_path, "command=point\nalpha=2\ncount=400\n", "pos.cfg")
    out2 = tmp_path / "pos"
    assert main(["point", "--config", cfg2, "--out", str(out2)]) == 0
    assert not (out2 / "point_bound_profile.csv").exists()
    rep2 = json.loads((out2 / "point_report.json").read_text())
    assert rep2["deficiency"] == 0


def test_verify_structure_artifacts(tmp_path):
    cfg = _write_cfg(tmp_path, "command=verify-structure\nkind=gaussian_well\n"
                               "depth=1\nwidth=1\n")
    out = tmp_path / "out"
    assert main(["verify-structure", "--config", cfg, "--out", str(out)]) == 0
    rep = json.loads((out / "structure_report.json").read_text())
    for side in ("minus", "plus"):
        assert rep[side]["residual_rel"] <= 1e-3
        assert rep[side]["sigma_ratio_50"] <= 1e-3
        assert (out / f"structure_singular_values_{side}.csv").exists()
    assert rep["kernel_envelopes"]["c_high"] > 0
    values = read_kernel(out / "remainder_kernel.bin")
    assert values.ndim == 2 and np.isfinite(values).all()
    assert values.shape[0] == 2048


def test_grid_and_seed_flags_override_config(tmp_path):
    cfg = _write_cfg(tmp_path, "command=smatrix\nkind=square_well\n"
                               "depth=4\nwidth=2\ncount=16\ngrid_n=2048\n")
    out = tmp_path / "out"
    rc = main(["smatrix", "--config", cfg, "--out", str(out),
               "--grid-n", "1024", "--seed", "5"])
    assert rc == 0
    meta, _, _ = _read_table(out / "smatrix_sweep.csv")
    assert meta["grid_n"] == "1024"
    assert meta["seed"] == "5"


_TRIMMED = ("command=asymptotics\nkind=gaussian_well\ndepth={depth}\nwidth=1\n"
            "basis_size=12\neps_below=1,0.0625\neps_above=1,16\n"
            "t_below=0,-4\nt_above=0,4\nt_past=-1,-4\nt_future=1,4\n"
            "t_rescaled=0,-1\nt_rescaled_high=0,1\n")

_CURVES = ("energy_below", "energy_above", "dilation_below", "dilation_above",
           "log_time_past", "log_time_future", "rescaled_low_energy",
           "rescaled_high_energy")


def test_asymptotics_gaussian_passes(tmp_path):
    cfg = _write_cfg(tmp_path, _TRIMMED.format(depth=1))
    out = tmp_path / "out"
    assert main(["asymptotics", "--config", cfg, "--out", str(out)]) == 0
    summary = json.loads((out / "asymptotics_summary.json").read_text())
    assert summary["passed"] is True
    assert set(summary["curves"]) == set(_CURVES)
    for name in _CURVES:
        assert summary["curves"][name]["passed"] is True
        assert (out / f"asymptotics_{name}.csv").exists()
    assert summary["meta"]["rescale_window_lo"] < 0 < summary["meta"]["rescale_window_hi"]


def test_asymptotics_zero_potential_and_workers(tmp_path, monkeypatch):
    cfg = _write_cfg(tmp_path, _TRIMMED.format(depth=0))
    out1, out2 = tmp_path / "serial", tmp_path / "pool"
    assert main(["asymptotics", "--config", cfg, "--out", str(out1)]) == 0
    summary = json.loads((out1 / "asymptotics_summary.json").read_text())
    assert summary["passed"] is True
    worst = max(max(c["final"], c["final_star"])
                for c in summary["curves"].values())
    assert worst <= 1e-8

    monkeypatch.setenv("SCATTER1D_WORKERS", "2")
    assert main(["asymptotics", "--config", cfg, "--out", str(out2)]) == 0
    for name in [f"asymptotics_{n}.csv" for n in _CURVES] + \
                ["asymptotics_summary.json"]:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


# ------------------------------ refusal paths -------------------------------


def test_unknown_key_rejected(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, "command=smatrix\nkind=gaussian_well\n"
                               "depth=1\nwidth=1\nfrobnicate=3\n")
    assert main(["smatrix", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "unknown config key 'frobnicate'" in capsys.readouterr().err


def test_command_tag_mismatch_rejected(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, "command=levinson\nkind=gaussian_well\n"
                               "depth=1\nwidth=1\n")
    assert main(["smatrix", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert err.startswith("config error:")
    assert "levinson" in err and "smatrix" in err


def test_missing_alpha_and_missing_file_rejected(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, "command=point\ncount=100\n")
    assert main(["point", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "alpha" in capsys.readouterr().err
    rc = main(["smatrix", "--config", str(tmp_path / "absent.cfg"),
               "--out", str(tmp_path / "o")])
    assert rc == 2


def test_bad_workers_env_rejected(tmp_path, capsys, monkeypatch):
    cfg = _write_cfg(tmp_path, "command=smatrix\nkind=gaussian_well\n"
                               "depth=1\nwidth=1\ncount=16\n")
    monkeypatch.setenv("SCATTER1D_WORKERS", "soon")
    assert main(["smatrix", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "SCATTER1D_WORKERS" in capsys.readouterr().err


def test_out_of_window_rescaling_refused(tmp_path, capsys):
    text = _TRIMMED.format(depth=1).replace("t_rescaled=0,-1", "t_rescaled=0,9")
    cfg = _write_cfg(tmp_path, text)
    assert main(["asymptotics", "--config", cfg, "--out", str(tmp_path / "o")]) == 3
    err = capsys.readouterr().err
    assert err.startswith("range error:")
    assert "admissible window" in err


def test_slow_tail_samples_refused(tmp_path, capsys):
    xs = np.linspace(-60.0, 60.0, 1201)
    vs = -1.0 / (1.0 + np.abs(xs))
    with open(tmp_path / "slow.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        for x, v in zip(xs, vs):
            writer.writerow([f"{x:.6f}", f"{v:.6f}"])
    cfg = _write_cfg(tmp_path, "command=verify-structure\nkind=custom_samples\n"
                               "csv=slow.csv\n")
    rc = main(["verify-structure", "--config", cfg, "--out", str(tmp_path / "o")])
    assert rc == 3
    assert "rho > 5/2" in capsys.readouterr().err
