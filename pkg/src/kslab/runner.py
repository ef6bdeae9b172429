"""Experiment orchestration: single runs, epsilon-refinement ladders, mass sweeps.

A run mollifies its initial measure, advances the IMEX stepper to T (or until
blow-up is detected), records diagnostics on a schedule that is geometric near
t = 0 and uniform afterwards, and writes a CSV, snapshots, and a manifest with
checksums. Blow-up is an outcome (exit code 3 at the CLI), never an exception.
"""

from __future__ import annotations

import hashlib
import json
import os
import time as _time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, SimConfig
from .diagnostics import read_series_csv, record, write_series_csv
from .elliptic import EllipticConvergenceError
from .grid import write_snapshot
from .measures import RadonMeasure, TestDictionary, mollify
from .stepper import BlowupReport, detect_blowup, initial_state, stable_dt, step


class MassConservationError(RuntimeError):
    """A run's own CSV failed the mass-conservation re-validation."""


@dataclass
class RunManifest:
    config_hash: str
    code_version: str
    wall_time: float
    final_summary: dict
    blowup: dict
    files: dict
    mass_drift_rel: float
    exit_code: int = 0
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "code_version": self.code_version,
            "wall_time": self.wall_time,
            "final_summary": self.final_summary,
            "blowup": self.blowup,
            "files": self.files,
            "mass_drift_rel": self.mass_drift_rel,
            "exit_code": self.exit_code,
            "notes": self.notes,
        }


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def resolve_output_dir(config: SimConfig) -> Path:
    root = os.environ.get("KSLAB_OUTPUT_ROOT")
    directory = Path(config.output_directory)
    if root and not directory.is_absolute():
        directory = Path(root) / directory
    return directory


def forced_times(config: SimConfig, extra=()) -> tuple[list[float], set, set]:
    """Stepping targets: geometric records near 0, uniform records, snapshots."""
    T = config.T
    rec = set()
    t = config.record_t0
    while t < config.record_uniform_dt and t < T:
        rec.add(t)
        t *= 2.0
    k = 1
    while k * config.record_uniform_dt < T * (1.0 + 1e-12):
        rec.add(min(k * config.record_uniform_dt, T))
        k += 1
    rec.add(T)
    snaps = {t for t in set(config.snapshot_times) | set(extra) if 0.0 < t <= T}
    return sorted(rec | snaps), rec, snaps


def _snapshot_name(prefix: str, t: float) -> str:
    return f"{prefix}_t{t:.10g}.dat"


def run(
    config: SimConfig,
    measure_override: RadonMeasure | None = None,
    extra_snapshot_times=(),
) -> RunManifest:
    """Execute one configured experiment and write CSV, snapshots, manifest."""
    wall_start = _time.perf_counter()
    grid = config.build_grid()
    measure = measure_override if measure_override is not None else config.build_measure(grid)
    dictionary = TestDictionary(grid.lengths, config.dictionary_order)
    thresholds = config.blowup_thresholds()
    out_dir = resolve_output_dir(config)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.json").write_text(config.canonical_json() + "\n")

    u0 = mollify(measure, config.mollifier_eps, grid)
    state = initial_state(u0, config.eps, config.chi)

    def make_record(st, dt=0.0, blowup=False):
        return record(
            st, measure, dictionary, config.p_list,
            r_star=config.r_star, dt=dt, blowup=blowup,
        )

    series = [make_record(state)]
    targets, record_times, snapshot_times = forced_times(config, extra_snapshot_times)
    blowup_report = BlowupReport(False)
    files: dict[str, str] = {}
    notes: list[str] = []

    for target in targets:
        while state.t < target * (1.0 - 1e-12):
            dt_stable = stable_dt(state, config.cfl, config.dt_max)
            if dt_stable < thresholds.dt_min:
                blowup_report = BlowupReport(
                    True, "cfl_collapse", state.t,
                    float(np.max(np.abs(state.u.values))),
                )
                break
            dt = min(dt_stable, target - state.t)
            try:
                state = step(state, dt)
            except EllipticConvergenceError as exc:
                notes.append(str(exc))
                blowup_report = detect_blowup(
                    state, thresholds, dt=dt, elliptic_failed=True
                )
                break
            blowup_report = detect_blowup(state, thresholds, dt=dt)
            if blowup_report.triggered:
                break
        if blowup_report.triggered:
            series.append(make_record(state, dt=0.0, blowup=True))
            break
        if abs(state.t - target) <= 1e-12 * (1.0 + target):
            state.t = target  # keep scheduled times exact in the CSV
        if target in record_times:
            series.append(make_record(state))
        if target in snapshot_times:
            for prefix, fieldv in (("u", state.u), ("v", state.v)):
                name = _snapshot_name(prefix, target)
                write_snapshot(out_dir / name, fieldv)
                files[name] = ""

    csv_path = out_dir / "series.csv"
    write_series_csv(csv_path, series, config.p_list)
    files["series.csv"] = ""
    files["config.json"] = ""

    # Re-validate mass conservation from the file we just wrote.
    masses = read_series_csv(csv_path)["mass"]
    drift = float(np.max(np.abs(masses - masses[0])) / abs(masses[0]))
    if drift > 1e-12:
        raise MassConservationError(
            f"mass drifted by {drift:.3e} relative over the run (limit 1e-12)"
        )

    files = {name: _sha256(out_dir / name) for name in sorted(files)}
    manifest = RunManifest(
        config_hash=config.config_hash(),
        code_version=__version__,
        wall_time=_time.perf_counter() - wall_start,
        final_summary={
            "t": state.t,
            "steps": state.step_count,
            "mass": float(masses[-1]),
            "linf": float(np.max(np.abs(state.u.values))),
        },
        blowup={
            "triggered": blowup_report.triggered,
            "reason": blowup_report.reason,
            "t_detect": blowup_report.t_detect,
            "linf_at_detect": blowup_report.linf_at_detect,
        },
        files=files,
        mass_drift_rel=drift,
        exit_code=3 if blowup_report.triggered else 0,
        notes=notes,
    )
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n"
    )
    return manifest


def eps_ladder(config: SimConfig) -> dict:
    """Run the same experiment at each ladder epsilon and compare adjacent levels.

    Reports ||u_eps(t0) - u_eps'(t0)||_inf for each adjacent pair at the
    configured ladder_t0; differences should shrink as epsilon decreases.
    """
    ladder = config.eps_ladder
    if ladder is None or len(ladder) < 3:
        raise ConfigError("eps_ladder needs at least 3 levels")
    ladder = sorted(ladder, reverse=True)
    t0 = config.ladder_t0
    if not (0.0 < t0 <= config.T):
        raise ConfigError(f"ladder_t0 must lie in (0, T], got {t0}")
    base_dir = resolve_output_dir(config)
    fields = []
    manifests = []
    for eps in ladder:
        sub = config.replace(
            physics={"eps": eps, "eps_ladder": None},
            output={"directory": str(Path(config.output_directory) / f"eps_{eps:g}")},
        )
        manifest = run(sub, extra_snapshot_times=(t0,))
        manifests.append(manifest)
        from .grid import read_snapshot

        fields.append(read_snapshot(resolve_output_dir(sub) / _snapshot_name("u", t0)))
    diffs = [
        float(np.max(np.abs(a.values - b.values)))
        for a, b in zip(fields, fields[1:])
    ]
    report = {
        "eps": ladder,
        "t0": t0,
        "adjacent_linf_diffs": diffs,
        "blowups": [m.blowup["triggered"] for m in manifests],
    }
    base_dir.mkdir(parents=True, exist_ok=True)
    (base_dir / "ladder_report.json").write_text(json.dumps(report, indent=2) + "\n")
    return report


def mass_sweep(config: SimConfig, masses, max_bisections: int = 8) -> dict:
    """Sweep total mass in an attractive 2D setup and bracket the blow-up onset.

    Runs each mass, then bisects geometrically between the largest completing
    and smallest blowing-up mass until their ratio is at most 2. The bracket is
    grid-dependent; rerun on a refined grid to gauge the continuum value.
    """
    if config.scenario != "S2":
        raise ConfigError("mass sweep is meaningful only for scenario S2 (chi > 0, n = 2)")
    masses = sorted(float(m) for m in masses)
    if len(masses) < 4:
        raise ConfigError(f"mass sweep needs at least 4 masses, got {len(masses)}")
    grid = config.build_grid()
    base_measure = config.build_measure(grid)
    outcomes = []

    def run_mass(m: float) -> bool:
        sub = config.replace(
            output={"directory": str(Path(config.output_directory) / f"mass_{m:g}")}
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            manifest = run(sub, measure_override=base_measure.scaled(m))
        triggered = manifest.blowup["triggered"]
        outcomes.append(
            {
                "mass": m,
                "blowup": triggered,
                "reason": manifest.blowup["reason"],
                "t_detect": manifest.blowup["t_detect"],
            }
        )
        return triggered

    for m in masses:
        run_mass(m)

    def bracket():
        completed = [o["mass"] for o in outcomes if not o["blowup"]]
        blown = [o["mass"] for o in outcomes if o["blowup"]]
        lo = max(completed) if completed else None
        hi = min(b for b in blown if lo is None or b > lo) if blown else None
        return lo, hi

    lo, hi = bracket()
    extra = 0
    while lo is not None and hi is not None and hi / lo > 2.0 and extra < max_bisections:
        run_mass(float(np.sqrt(lo * hi)))
        lo, hi = bracket()
        extra += 1

    report = {
        "outcomes": sorted(outcomes, key=lambda o: o["mass"]),
        "largest_completing": lo,
        "smallest_blowup": hi,
        "bracket_ratio": (hi / lo) if (lo is not None and hi is not None) else None,
        "caveat": "bracket is grid-dependent; rerun on a refined grid to confirm",
    }
    base_dir = resolve_output_dir(config)
    base_dir.mkdir(parents=True, exist_ok=True)
    (base_dir / "sweep_report.json").write_text(json.dumps(report, indent=2) + "\n")
    return report
