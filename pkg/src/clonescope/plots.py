"""Matplotlib figure rendering for report outputs.

All figures go straight to files; the Agg backend keeps this usable in
headless runs.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402


def save_sweep_figure(rows, path: str | Path) -> None:
    """Precision/recall trade-off across verdict thresholds."""
    deltas = [row.delta for row in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(deltas, [row.precision for row in rows], marker="o", label="precision")
    ax.plot(deltas, [row.recall for row in rows], marker="s", label="recall")
    ax.set_xlabel("verdict threshold")
    ax.set_ylabel("score")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_importance_figure(table, path: str | Path) -> None:
    """Horizontal bar chart of the ranked feature-importance table."""
    labels = [name for _, name, _ in table]
    weights = [weight for _, _, weight in table]
    fig, ax = plt.subplots(figsize=(7, 0.5 * len(table) + 1.5))
    positions = np.arange(len(table))[::-1]
    ax.barh(positions, weights, color="#4878a8")
    ax.set_yticks(positions)
    ax.set_yticklabels(labels)
    ax.set_xlabel("weight")
    ax.grid(True, axis="x", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_matrix_figure(matrix, path: str | Path) -> None:
    """Heatmap of statement-tree pair scores with line-number ticks."""
    scores = matrix.scores
    fig, ax = plt.subplots(figsize=(6, 5))
    image = ax.imshow(scores, vmin=0.0, vmax=1.0, cmap="viridis", aspect="auto")
    ax.set_xlabel(f"{matrix.function_b} (statement line)")
    ax.set_ylabel(f"{matrix.function_a} (statement line)")
    ax.set_xticks(range(scores.shape[1]))
    ax.set_xticklabels([t.span.start_line for t in matrix.col_trees], fontsize=7)
    ax.set_yticks(range(scores.shape[0]))
    ax.set_yticklabels([t.span.start_line for t in matrix.row_trees], fontsize=7)
    fig.colorbar(image, ax=ax, label="pair score")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
