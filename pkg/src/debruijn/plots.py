"""Figures for the experiment reports.

Rendering is headless (Agg) so the experiment harness works in batch runs;
each function draws one figure and writes it straight to a file, returning
the path.  The data behind every figure is also emitted as CSV by the
harness, so the figures are companions to the tables, not the record.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .sequences import GAP, BinarySequence

matplotlib.rcParams.update(
    {
        "figure.dpi": 130,
        "savefig.dpi": 150,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "font.size": 9,
        "figure.autolayout": True,
    }
)

_SAVE_KW = {"bbox_inches": "tight"}


def _finish(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def sequence_strip(sequence: BinarySequence, path, title: str | None = None) -> Path:
    """One-row raster of a timeline: white 0, black 1, hatched grey gaps."""
    values = sequence.values.astype(float)
    shaded = np.where(values == GAP, 0.5, values)
    fig, ax = plt.subplots(figsize=(9.0, 1.4))
    ax.imshow(
        shaded[None, :],
        aspect="auto",
        cmap="Greys",
        vmin=0.0,
        vmax=1.0,
        interpolation="nearest",
    )
    for slot in np.flatnonzero(values == GAP):
        ax.axvspan(slot - 0.5, slot + 0.5, color="tab:red", alpha=0.15, lw=0)
    ax.set_yticks([])
    ax.set_xlabel("time step")
    ax.grid(False)
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def estimate_errorbars(
    labels,
    truth,
    estimate,
    lower,
    upper,
    path,
    title: str | None = None,
) -> Path:
    """Point estimates with interval whiskers, true values overlaid."""
    labels = list(labels)
    x = np.arange(len(labels))
    estimate = np.asarray(estimate, dtype=float)
    yerr = np.vstack(
        [estimate - np.asarray(lower, float), np.asarray(upper, float) - estimate]
    )
    fig, ax = plt.subplots(figsize=(1.0 + 0.9 * len(labels), 3.2))
    ax.errorbar(x, estimate, yerr=yerr, fmt="o", capsize=4, label="estimate")
    if truth is not None:
        ax.plot(x, np.asarray(truth, float), "x", color="tab:red", ms=9, label="true")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=45, ha="right")
    ax.set_ylim(-0.02, 1.02)
    ax.set_ylabel("append-1 probability")
    ax.legend(loc="best")
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def interval_width_curves(lengths, widths, labels, path, title: str | None = None) -> Path:
    """Interval width against sequence length, one line per word."""
    widths = np.asarray(widths, dtype=float)
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    for row, label in zip(widths, labels):
        ax.plot(lengths, row, marker="o", label=label)
    ax.set_xscale("log")
    ax.set_xticks(list(lengths))
    ax.get_xaxis().set_major_formatter(matplotlib.ticker.ScalarFormatter())
    ax.set_xlabel("sequence length")
    ax.set_ylabel("95% interval width")
    ax.legend(loc="best")
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def selection_histograms(candidates, counts_by_panel, panel_titles, path) -> Path:
    """Bar charts of selected word lengths, one panel per generating table."""
    panels = len(counts_by_panel)
    fig, axes = plt.subplots(1, panels, figsize=(4.0 * panels, 3.2), squeeze=False)
    for ax, counts, name in zip(axes[0], counts_by_panel, panel_titles):
        ax.bar(candidates, counts, color="tab:blue")
        ax.set_xticks(list(candidates))
        ax.set_xlabel("selected word length")
        ax.set_ylabel("sequences")
        ax.set_title(name)
    return _finish(fig, path)


def evidence_profile(candidates, log_evidence, selected, path, title=None) -> Path:
    """Per-candidate log evidence with the selected length marked."""
    fig, ax = plt.subplots(figsize=(4.6, 3.2))
    ax.plot(candidates, log_evidence, marker="o")
    ax.axvline(selected, color="tab:red", ls="--", lw=1, label=f"selected m={selected}")
    ax.set_xticks(list(candidates))
    ax.set_xlabel("word length")
    ax.set_ylabel("log evidence")
    ax.legend(loc="best")
    if title:
        ax.set_title(title)
    return _finish(fig, path)
