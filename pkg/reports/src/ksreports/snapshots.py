"""Heatmaps of saved density/signal snapshots: 2D fields, 3D mid-plane slices."""

from __future__ import annotations

import re
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .io import ReportInputError, listed_file, load_manifest, read_snapshot

_SNAP_RE = re.compile(r"^([uv])_t([0-9.eE+-]+)\.dat$")


def _render_2d(ax, values, lengths, label):
    im = ax.imshow(
        values.T,
        origin="lower",
        extent=(0, lengths[0], 0, lengths[1]),
        cmap="viridis",
    )
    ax.set_title(label, fontsize=9)
    return im


def render_snapshots(run_dir, out_dir) -> list[Path]:
    """One figure per saved snapshot: a heatmap in 2D, three mid-slices in 3D."""
    run_dir = Path(run_dir)
    manifest = load_manifest(run_dir)
    entries = []
    for name in manifest.get("files", {}):
        m = _SNAP_RE.match(name)
        if m:
            entries.append((name, m.group(1), float(m.group(2))))
    if not entries:
        raise ReportInputError(f"{run_dir}: manifest lists no snapshot files")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tag = manifest["config_hash"][:12]
    outputs = []
    for name, field, t in sorted(entries, key=lambda e: (e[2], e[1])):
        dim, cells, lengths, values = read_snapshot(listed_file(run_dir, manifest, name))
        if dim == 2:
            fig, ax = plt.subplots(figsize=(4.6, 4))
            im = _render_2d(ax, values, lengths, f"{field} at t = {t:g}")
            fig.colorbar(im, ax=ax, shrink=0.85)
        else:
            fig, axes = plt.subplots(1, 3, figsize=(11, 3.4))
            mids = [c // 2 for c in cells]
            planes = [
                (values[mids[0], :, :], (lengths[1], lengths[2]), "x mid-plane"),
                (values[:, mids[1], :], (lengths[0], lengths[2]), "y mid-plane"),
                (values[:, :, mids[2]], (lengths[0], lengths[1]), "z mid-plane"),
            ]
            for ax, (plane, ext, label) in zip(axes, planes):
                im = _render_2d(ax, plane, ext, f"{field} t = {t:g}, {label}")
            fig.colorbar(im, ax=list(axes), shrink=0.8)
        out = out_dir / f"snap_{tag}_{field}_t{t:g}.png"
        fig.savefig(out, dpi=110)
        plt.close(fig)
        outputs.append(out)
    return outputs
