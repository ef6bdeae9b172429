"""Rendering tests against fixture run directories in the documented formats."""

import hashlib
import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from ksreports import ReportSpec, render_report
from ksreports.io import ReportInputError
from ksreports.rates import render_rates
from ksreports.snapshots import render_snapshots
from ksreports.sweep import render_sweep

SERIES_HEADER = (
    "t,dt,mass,lp_1.5,lp_2,lp_2.5,lp_8,lp_inf,"
    "grad_energy_p2,v_w1p_surrogate,vague_distance,ugradv_l1,blowup"
)


def write_snapshot(path, dim, cells, lengths, values):
    header = " ".join(
        ["KSLAB1", str(dim)] + [str(c) for c in cells] + [f"{L:g}" for L in lengths]
    )
    flat = np.asarray(values).flatten(order="F")
    path.write_text(header + "\n" + " ".join(f"{v:.17g}" for v in flat) + "\n")


def make_run_dir(root, dim=2, hash_seed="fixture"):
    run = root / f"run{dim}d_{hash_seed}"
    run.mkdir(parents=True)
    ts = np.geomspace(1e-4, 1.0, 25)
    rows = [SERIES_HEADER]
    for t in np.concatenate([[0.0], ts]):
        y2 = 1.0 + 0.04 / (t + 0.005)
        rows.append(
            ",".join(
                f"{v:.17g}"
                for v in (t, 1e-3, 1.0, y2 ** (1 / 1.5), y2 ** 0.5, y2 ** (1 / 2.5),
                          y2 ** (1 / 8.0), y2, 0.1, 0.2, 0.3, 0.05)
            )
            + ",0"
        )
    (run / "series.csv").write_text("\n".join(rows) + "\n")
    cells = (8,) * dim
    rng = np.random.default_rng(3)
    files = ["series.csv", "config.json"]
    for field in ("u", "v"):
        name = f"{field}_t0.01.dat"
        write_snapshot(run / name, dim, cells, (1.0,) * dim, rng.random(cells))
        files.append(name)
    (run / "config.json").write_text(
        json.dumps({"domain": {"dim": dim, "lengths": [1.0] * dim, "cells": list(cells)}})
    )
    inventory = {
        name: hashlib.sha256((run / name).read_bytes()).hexdigest() for name in files
    }
    (run / "manifest.json").write_text(
        json.dumps(
            {
                "config_hash": hashlib.sha256(hash_seed.encode()).hexdigest(),
                "files": inventory,
                "blowup": {"triggered": False},
            }
        )
    )
    return run


def make_sweep_dir(root, with_bracket=True):
    sweep = root / ("sweep" if with_bracket else "sweep_flat")
    sweep.mkdir(parents=True)
    outcomes = [
        {"mass": 4.0, "blowup": False, "t_detect": None},
        {"mass": 8.0, "blowup": False, "t_detect": None},
    ]
    if with_bracket:
        outcomes += [
            {"mass": 32.0, "blowup": False, "t_detect": None},
            {"mass": 64.0, "blowup": True, "t_detect": 0.004},
        ]
    report = {
        "outcomes": outcomes,
        "largest_completing": 32.0 if with_bracket else 8.0,
        "smallest_blowup": 64.0 if with_bracket else None,
    }
    (sweep / "sweep_report.json").write_text(json.dumps(report))
    return sweep


def dir_checksums(path):
    return {
        p.name: hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(path.iterdir())
        if p.is_file()
    }


def test_render_rates_deterministic_and_readonly(tmp_path):
    run = make_run_dir(tmp_path, dim=2)
    before = dir_checksums(run)
    out1 = render_rates(run, tmp_path / "figs")
    out2 = render_rates(run, tmp_path / "figs")
    assert [p.name for p in out1] == [p.name for p in out2]
    assert out1[0].exists()
    assert out1[0].name.startswith("rates_")
    assert dir_checksums(run) == before


def test_render_rates_missing_columns(tmp_path):
    run = make_run_dir(tmp_path, dim=2)
    (run / "series.csv").write_text("t,dt\n0,0\n1,0\n")
    # refresh the manifest entry so the file is still "listed"
    manifest = json.loads((run / "manifest.json").read_text())
    manifest["files"]["series.csv"] = hashlib.sha256(
        (run / "series.csv").read_bytes()
    ).hexdigest()
    (run / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(ReportInputError, match="columns"):
        render_rates(run, tmp_path / "figs")


def test_render_rates_empty_csv(tmp_path):
    run = make_run_dir(tmp_path, dim=2)
    (run / "series.csv").write_text("")
    with pytest.raises(ReportInputError):
        render_rates(run, tmp_path / "figs")


def test_render_rates_refuses_unlisted_files(tmp_path):
    run = make_run_dir(tmp_path, dim=2)
    manifest = json.loads((run / "manifest.json").read_text())
    del manifest["files"]["series.csv"]
    (run / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(ReportInputError, match="not listed"):
        render_rates(run, tmp_path / "figs")


def test_render_snapshots_2d(tmp_path):
    run = make_run_dir(tmp_path, dim=2)
    before = dir_checksums(run)
    outputs = render_snapshots(run, tmp_path / "figs")
    assert len(outputs) == 2  # u and v at one time
    assert all(p.exists() for p in outputs)
    assert dir_checksums(run) == before


def test_render_snapshots_3d_mid_slices(tmp_path):
    run = make_run_dir(tmp_path, dim=3)
    outputs = render_snapshots(run, tmp_path / "figs")
    assert len(outputs) == 2
    assert all("_t0.01" in p.name for p in outputs)


def test_render_snapshots_requires_snapshots(tmp_path):
    run = make_run_dir(tmp_path, dim=2)
    manifest = json.loads((run / "manifest.json").read_text())
    manifest["files"] = {
        k: v for k, v in manifest["files"].items() if not k.endswith(".dat")
    }
    (run / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(ReportInputError, match="snapshot"):
        render_snapshots(run, tmp_path / "figs")


def test_render_snapshots_rejects_corrupt_format(tmp_path):
    run = make_run_dir(tmp_path, dim=2)
    (run / "u_t0.01.dat").write_text("KSLAB1 2 8 8 1 1\n0 0 0\n")
    manifest = json.loads((run / "manifest.json").read_text())
    manifest["files"]["u_t0.01.dat"] = hashlib.sha256(
        (run / "u_t0.01.dat").read_bytes()
    ).hexdigest()
    (run / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(ReportInputError, match="mismatch"):
        render_snapshots(run, tmp_path / "figs")


def test_render_sweep_bracket_and_flat(tmp_path):
    sweep = make_sweep_dir(tmp_path, with_bracket=True)
    before = dir_checksums(sweep)
    out = render_sweep(sweep, tmp_path / "figs")
    assert out[0].exists() and out[0].name.startswith("sweep_")
    assert dir_checksums(sweep) == before
    flat = make_sweep_dir(tmp_path, with_bracket=False)
    out_flat = render_sweep(flat, tmp_path / "figs")
    assert out_flat[0].exists()


def test_render_sweep_needs_two_runs(tmp_path):
    sweep = tmp_path / "tiny"
    sweep.mkdir()
    (sweep / "sweep_report.json").write_text(
        json.dumps({"outcomes": [{"mass": 1.0, "blowup": False}]})
    )
    with pytest.raises(ReportInputError, match="2 sweep runs"):
        render_sweep(sweep, tmp_path / "figs")


def test_report_spec_end_to_end(tmp_path):
    run2 = make_run_dir(tmp_path, dim=2, hash_seed="a")
    run3 = make_run_dir(tmp_path, dim=3, hash_seed="b")
    sweep = make_sweep_dir(tmp_path)
    spec = ReportSpec(
        run_dirs=[run2, run3],
        figures=["rates", "snapshots", "sweep"],
        sweep_dirs=[sweep],
        out_dir=str(tmp_path / "figs"),
    )
    written = render_report(spec)
    assert len(written) == 2 + 4 + 1
    names = {p.name for p in written}
    assert len(names) == len(written)  # deterministic, collision-free names
    with pytest.raises(ReportInputError):
        ReportSpec(run_dirs=[], figures=["bogus"])


@pytest.mark.skipif(shutil.which("kslab") is None, reason="kslab CLI not installed")
def test_against_real_solver_output(tmp_path):
    config = {
        "scenario": "S1",
        "domain": {"dim": 2, "lengths": [1.0, 1.0], "cells": [32, 32]},
        "physics": {"chi": -1.0, "eps": 0.04},
        "initial_measure": {"atoms": [{"position": [0.5, 0.5], "weight": 1.0}]},
        "time": {"T": 0.02, "dt_max": 1e-3, "record_uniform_dt": 5e-3},
        "output": {"directory": str(tmp_path / "real_run"), "snapshot_times": [0.01]},
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(config))
    proc = subprocess.run(
        ["kslab", "run", str(cfg_path)], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    run = tmp_path / "real_run"
    before = dir_checksums(run)
    written = render_rates(run, tmp_path / "figs") + render_snapshots(run, tmp_path / "figs")
    assert all(p.exists() for p in written)
    assert dir_checksums(run) == before
