"""Figure rendering for evaluation reports.

Writes PNG charts next to the delimited artifacts: overall scores, the
per-POS label-to-MSD agreement heatmaps behind the chosen mapping, and the
cluster size distribution. Rendering is deterministic: fixed dpi, fixed
metadata, no timestamps.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluate import EvalReport

_SAVE_OPTS = {"dpi": 150, "metadata": {"Software": "morphmine"}}


def _save(fig, path: str) -> str:
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
    return path


def render_scores(report: EvalReport, path: str) -> str:
    """Bar chart of overall bmacc, per-POS bmacc, and bmf1 if present."""
    names = ["bmacc"] + [f"bmacc[{pos}]" for pos in sorted(report.per_pos)]
    values = [report.bmacc] + [report.per_pos[pos] for pos in sorted(report.per_pos)]
    if report.bmf1 is not None:
        names.append("bmf1")
        values.append(report.bmf1)
    fig, ax = plt.subplots(figsize=(max(4.0, 1.2 * len(names)), 3.5))
    ax.bar(range(len(names)), values, color="#4878a8")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=30, ha="right")
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("score")
    ax.set_title("evaluation scores")
    for i, v in enumerate(values):
        ax.text(i, v + 0.02, f"{v:.3f}", ha="center", fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def render_agreement(
    matrices: dict[str, tuple[list[str], list[str], np.ndarray]], path: str
) -> str:
    """Heatmaps of label-by-MSD agreement counts, one panel per POS."""
    poses = sorted(matrices)
    if not poses:
        poses = []
    n = max(len(poses), 1)
    fig, axes = plt.subplots(1, n, figsize=(4.5 * n, 4.0), squeeze=False)
    for ax, pos in zip(axes[0], poses):
        labels, msds, m = matrices[pos]
        if m.size:
            ax.imshow(m, cmap="Blues", aspect="auto")
        ax.set_xticks(range(len(msds)))
        ax.set_xticklabels(msds, rotation=45, ha="right", fontsize=7)
        ax.set_yticks(range(len(labels)))
        ax.set_yticklabels(labels, fontsize=7)
        ax.set_title(f"POS {pos}")
        ax.set_xlabel("gold MSD")
        ax.set_ylabel("predicted label")
    if not poses:
        axes[0][0].axis("off")
    fig.tight_layout()
    return _save(fig, path)


def render_cluster_sizes(sizes: list[int], path: str) -> str:
    """Histogram of paradigm-cluster sizes."""
    fig, ax = plt.subplots(figsize=(5.0, 3.5))
    if sizes:
        top = max(sizes)
        ax.hist(sizes, bins=range(1, top + 2), color="#6a9a58", rwidth=0.9, align="left")
    ax.set_xlabel("cluster size")
    ax.set_ylabel("clusters")
    ax.set_title("paradigm cluster sizes")
    fig.tight_layout()
    return _save(fig, path)


def render_figures(
    report: EvalReport,
    matrices: dict[str, tuple[list[str], list[str], np.ndarray]],
    cluster_sizes: list[int],
    out_dir: str,
) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    return [
        render_scores(report, os.path.join(out_dir, "scores.png")),
        render_agreement(matrices, os.path.join(out_dir, "agreement.png")),
        render_cluster_sizes(cluster_sizes, os.path.join(out_dir, "cluster_sizes.png")),
    ]
