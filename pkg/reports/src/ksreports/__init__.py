"""ksreports: post-hoc figure rendering for kslab output directories.

Consumes only the documented file formats (run manifest, time-series CSV,
KSLAB1 snapshots, sweep reports); never recomputes physics, never modifies
inputs, and names every figure from the manifest hash so rendering is
repeatable.
"""

__version__ = "0.1.0"

from dataclasses import dataclass, field
from pathlib import Path

from .io import ReportInputError
from .rates import render_rates
from .snapshots import render_snapshots
from .sweep import render_sweep

FIGURE_KINDS = ("rates", "snapshots", "sweep")


@dataclass
class ReportSpec:
    """Batch description: which run directories, which figures, where to."""

    run_dirs: list
    figures: list = field(default_factory=lambda: ["rates", "snapshots"])
    sweep_dirs: list = field(default_factory=list)
    out_dir: str = "figures"

    def __post_init__(self):
        for kind in self.figures:
            if kind not in FIGURE_KINDS:
                raise ReportInputError(f"unknown figure kind {kind!r}")


def render_report(spec: ReportSpec) -> list:
    """Render every requested figure; returns the list of files written."""
    written = []
    for run_dir in spec.run_dirs:
        if "rates" in spec.figures:
            written += render_rates(run_dir, spec.out_dir)
        if "snapshots" in spec.figures:
            written += render_snapshots(run_dir, spec.out_dir)
    if "sweep" in spec.figures:
        for sweep_dir in spec.sweep_dirs:
            written += render_sweep(sweep_dir, spec.out_dir)
    return [Path(p) for p in written]
