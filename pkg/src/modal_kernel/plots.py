"""Figure rendering for the command line report path.

Each helper writes a single matplotlib figure to a file; the format
follows the file extension.  The Agg backend is forced so rendering
works without a display.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "render_weight_bars",
    "render_count_bars",
    "render_stability_curve",
    "render_overlap_heatmap",
]


def _finish(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_weight_bars(labels: Sequence[str], weights: Sequence[float],
                       path: str, *, title: str = "atom weights") -> None:
    fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * len(labels)), 3.2))
    positions = np.arange(len(labels))
    ax.bar(positions, weights, color="#4878b0")
    ax.set_xticks(positions)
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylabel("weight")
    ax.set_title(title)
    _finish(fig, path)


def render_count_bars(labels: Sequence[str], counts: Sequence[int],
                      path: str, *, title: str = "draw counts") -> None:
    fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * len(labels)), 3.2))
    positions = np.arange(len(labels))
    ax.bar(positions, counts, color="#b0684a")
    ax.set_xticks(positions)
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylabel("count")
    ax.set_title(title)
    _finish(fig, path)


def render_stability_curve(gaps: Sequence[float], angles: Sequence[float],
                           path: str) -> None:
    fig, ax = plt.subplots(figsize=(4.8, 3.4))
    ax.loglog(gaps, angles, marker="o", color="#3a7d44")
    ax.invert_xaxis()
    ax.set_xlabel("spectral gap")
    ax.set_ylabel("mean rotation angle (rad)")
    ax.set_title("property basis rotation vs gap")
    ax.grid(True, which="both", alpha=0.3)
    _finish(fig, path)


def render_overlap_heatmap(overlaps: np.ndarray, path: str,
                           *, title: str = "record overlaps") -> None:
    magnitude = np.abs(np.asarray(overlaps))
    fig, ax = plt.subplots(figsize=(4.2, 3.6))
    image = ax.imshow(magnitude, vmin=0.0, vmax=1.0, cmap="viridis")
    ax.set_xlabel("branch")
    ax.set_ylabel("branch")
    ax.set_title(title)
    fig.colorbar(image, ax=ax, label="|overlap|")
    _finish(fig, path)
