"""Mass-sweep summary figure: outcome per mass with the blow-up bracket band."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .io import ReportInputError


def render_sweep(sweep_dir, out_dir) -> list[Path]:
    """Scatter completed/blown-up masses; highlight the bracket if one exists."""
    sweep_dir = Path(sweep_dir)
    report_path = sweep_dir / "sweep_report.json"
    if not report_path.exists():
        raise ReportInputError(f"{sweep_dir}: no sweep_report.json")
    payload = report_path.read_bytes()
    report = json.loads(payload)
    outcomes = report.get("outcomes", [])
    if len(outcomes) < 2:
        raise ReportInputError(f"{sweep_dir}: need at least 2 sweep runs, got {len(outcomes)}")

    fig, ax = plt.subplots(figsize=(6, 3.6))
    for blowup, marker, color, label in (
        (False, "o", "tab:blue", "completed"),
        (True, "x", "tab:red", "blow-up"),
    ):
        masses = [o["mass"] for o in outcomes if o["blowup"] == blowup]
        if masses:
            ax.scatter(masses, [int(blowup)] * len(masses), marker=marker, color=color, label=label)
    lo, hi = report.get("largest_completing"), report.get("smallest_blowup")
    if lo is not None and hi is not None:
        ax.axvspan(lo, hi, color="tab:orange", alpha=0.25, label="bracket")
    else:
        ax.annotate(
            "no blow-up bracket observed",
            xy=(0.5, 0.5),
            xycoords="axes fraction",
            ha="center",
            fontsize=9,
        )
    ax.set_xscale("log")
    ax.set_xlabel("initial mass")
    ax.set_yticks([0, 1], labels=["complete", "blow-up"])
    ax.set_title("attractive-case mass dichotomy")
    ax.legend(fontsize=8, loc="center left")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out = out_dir / f"sweep_{hashlib.sha256(payload).hexdigest()[:12]}.png"
    fig.savefig(out, dpi=110)
    plt.close(fig)
    return [out]
