"""Render run figures to PNG files next to their delimited counterparts.

Uses the Agg backend so rendering works headless and, with the Software
metadata pinned, produces byte-identical files for identical inputs.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

# Default PNG metadata embeds the matplotlib version string; pin it so
# artifacts stay byte-stable across patch upgrades.
_PNG_METADATA = {"Software": "stemtag"}


def save_trace_plot(
    trace: np.ndarray, path: str | Path, title: Optional[str] = None
) -> None:
    """Line plot of the per-sweep joint log probability."""
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    sweeps = np.arange(1, len(trace) + 1)
    ax.plot(sweeps, trace, linewidth=1.0, color="tab:blue")
    ax.set_xlabel("sweep")
    ax.set_ylabel("joint log probability")
    ax.grid(True, alpha=0.3)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)


def save_contingency_plot(
    table: np.ndarray,
    induced_names: Sequence[str],
    gold_names: Sequence[str],
    path: str | Path,
    title: Optional[str] = None,
) -> None:
    """Heatmap of induced-tag rows against gold-tag columns."""
    table = np.asarray(table)
    fig, ax = plt.subplots(
        figsize=(max(4.0, 0.45 * table.shape[1] + 2.0),
                 max(3.2, 0.4 * table.shape[0] + 1.6))
    )
    im = ax.imshow(table, cmap="viridis", aspect="auto")
    ax.set_xticks(range(table.shape[1]))
    ax.set_xticklabels(gold_names, rotation=90, fontsize=7)
    ax.set_yticks(range(table.shape[0]))
    ax.set_yticklabels(induced_names, fontsize=7)
    ax.set_xlabel("gold tag")
    ax.set_ylabel("induced tag")
    if table.shape[0] <= 20 and table.shape[1] <= 20:
        # Annotate counts while the grid is small enough to stay legible.
        threshold = table.max() / 2 if table.size else 0
        for i in range(table.shape[0]):
            for j in range(table.shape[1]):
                ax.text(
                    j, i, str(int(table[i, j])),
                    ha="center", va="center", fontsize=6,
                    color="white" if table[i, j] < threshold else "black",
                )
    fig.colorbar(im, ax=ax, shrink=0.8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)
