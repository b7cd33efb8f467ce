"""Batch figure rendering for the CLI report paths.

Figures are written straight to image files next to the delimited output;
nothing here opens a window.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_density_figure(
    path: str | Path,
    t: np.ndarray,
    g_hat: np.ndarray,
    g_true: np.ndarray | None = None,
    title: str = "",
) -> None:
    """Density comparison plot; adds an absolute-error panel when the true
    density is available."""
    if g_true is not None:
        fig, (ax, ax_err) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
        ax.plot(t, g_true, "b--", label="true density")
        ax.plot(t, g_hat, "k-", label="approximation")
        ax_err.plot(t, np.abs(g_true - g_hat), "r-")
        ax_err.set_yscale("log")
        ax_err.set_xlabel("t")
        ax_err.set_ylabel("|error|")
    else:
        fig, ax = plt.subplots(figsize=(7, 4.5))
        ax.plot(t, g_hat, "k-", label="approximation")
        ax.set_xlabel("t")
    ax.set_ylabel("density")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
