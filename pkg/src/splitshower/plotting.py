"""Figure rendering for the CLI report paths.

Plotting is best-effort: failures are reported as warnings by the caller and
never change exit codes. The Agg backend keeps everything headless; the
output format follows the file extension (.svg, .png, .pdf, ...).
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .histograms import Histogram


def _step_xy(hist: Histogram, density: bool):
    edges = np.asarray(hist.edges)
    y = hist.densities() if density else np.asarray(hist.counts, dtype=float)
    xs = np.repeat(edges, 2)[1:-1]
    ys = np.repeat(y, 2)
    return xs, ys


def save_histogram_overlay(
    path: str,
    histograms: list[tuple[str, Histogram]],
    title: str = "",
    xlabel: str = "momentum fraction",
    density: bool = True,
) -> None:
    """Overlaid step histograms with a legend."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, hist in histograms:
        xs, ys = _step_xy(hist, density)
        ax.plot(xs, ys, drawstyle="default", label=label, linewidth=1.4)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("density" if density else "count")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_curves(
    path: str,
    curves: list[tuple[str, np.ndarray, np.ndarray, str]],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
) -> None:
    """Line/marker curves: (label, x, y, style) with matplotlib format styles."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, x, y, style in curves:
        ax.plot(x, y, style, label=label, markersize=4)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
