"""Log-log decay plots of int(u^p) with the expected smoothing-rate guides."""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import ReportInputError, finite_p_columns, listed_file, load_manifest, read_series


def render_rates(run_dir, out_dir) -> list[Path]:
    """One log-log figure of int(u^p) vs t per run, with -n(p-1)/2 slope guides.

    The output name is derived from the run manifest hash, so re-rendering the
    same run always produces the same file.
    """
    run_dir = Path(run_dir)
    manifest = load_manifest(run_dir)
    series = read_series(listed_file(run_dir, manifest, "series.csv"))
    config = json.loads(listed_file(run_dir, manifest, "config.json").read_text())
    n = config["domain"]["dim"]
    if "t" not in series or "mass" not in series:
        raise ReportInputError(f"{run_dir}: series CSV is missing required columns")
    p_values = finite_p_columns(series)
    if not p_values:
        raise ReportInputError(f"{run_dir}: no lp_<p> columns to plot")

    ts = series["t"]
    pos = ts > 0
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for p in p_values:
        y = series[f"lp_{p:g}"] ** p
        good = pos & (y > 0)
        if not good.any():
            continue
        (line,) = ax.loglog(ts[good], y[good], label=f"p = {p:g}")
        # reference slope -n(p-1)/2 anchored at the last plotted point
        slope = -n * (p - 1.0) / 2.0
        t_ref = np.array([ts[good][0], ts[good][-1]])
        y_anchor = y[good][0]
        ax.loglog(
            t_ref,
            y_anchor * (t_ref / t_ref[0]) ** slope,
            linestyle="--",
            linewidth=0.8,
            color=line.get_color(),
            alpha=0.6,
        )
    ax.set_xlabel("t")
    ax.set_ylabel("int u^p")
    ax.set_title("L^p smoothing (dashed: t^(-n(p-1)/2) guides)")
    ax.legend(fontsize=8)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out = out_dir / f"rates_{manifest['config_hash'][:12]}.png"
    fig.savefig(out, dpi=110)
    plt.close(fig)
    return [out]
