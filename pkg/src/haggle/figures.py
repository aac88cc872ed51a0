"""Report figure rendering.

One PNG per batch: AT, SR, and mean SL% side by side per configuration
label, written next to the JSON/CSV reports.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_report_figure(reports: Sequence, path: str | Path) -> Path:
    labels = [r.config_label for r in reports]
    panels = (
        ("AT (rounds, successes)", [r.at if r.at is not None else 0.0 for r in reports]),
        ("SR", [r.sr for r in reports]),
        ("SL mean", [r.sl_mean if r.sl_mean is not None else 0.0 for r in reports]),
    )
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.6))
    for ax, (title, values) in zip(axes, panels):
        ax.bar(range(len(labels)), values, color="#4878a8")
        ax.set_title(title)
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
        ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
