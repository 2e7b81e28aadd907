"""Matplotlib figure rendering for the report paths of the CLI.

Every function writes PNG files next to the delimited output and
returns the list of paths written.
"""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .eventlog import FrequencyStats, _sort_key  # noqa: E402
from .evaluate import EvalReport  # noqa: E402


def _bar(ax, labels, values, xlabel, ylabel, title):
    ax.bar(range(len(values)), values, color="steelblue")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=90, fontsize=6)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)


def plot_frequency_stats(stats: FrequencyStats, outdir: Path) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    for fname, mapping, xlabel, ylabel, title in (
        ("resource_counts.png", stats.resource_counts, "resource",
         "event count", "Resource occurrence frequency"),
        ("activity_counts.png",
         {str(k): v for k, v in stats.activity_counts.items()}, "activity",
         "event count", "Activity occurrence frequency"),
        ("process_relative_freq.png", stats.process_relative_freq, "process",
         "relative frequency", "Process distribution"),
    ):
        items = sorted(mapping.items(), key=lambda kv: _sort_key(str(kv[0])))
        fig, ax = plt.subplots(figsize=(10, 4))
        _bar(ax, [k for k, _ in items], [v for _, v in items], xlabel, ylabel, title)
        fig.tight_layout()
        path = outdir / fname
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written


def plot_activity_precision(report: EvalReport, outdir: Path) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    items = sorted(
        report.per_activity.items(),
        key=lambda kv: (_sort_key(kv[0][0]), _sort_key(kv[0][1])),
    )
    fig, ax = plt.subplots(figsize=(10, 4))
    _bar(
        ax,
        [f"{p}/{t}" for (p, t), _s in items],
        [s.precision for _k, s in items],
        "activity",
        "precision",
        "Per-activity prediction precision",
    )
    fig.tight_layout()
    path = outdir / "activity_precision.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return [path]


def plot_sweep(rows: Sequence[tuple[float, int, float]], outdir: Path) -> list[Path]:
    """rows: (min_sup, rule_count, overall_accuracy) in sweep order."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    sups = [r[0] for r in rows]
    written = []
    for fname, values, ylabel, title in (
        ("sweep_accuracy.png", [r[2] for r in rows], "overall accuracy",
         "Accuracy under different support thresholds"),
        ("sweep_rule_count.png", [r[1] for r in rows], "strong rule count",
         "Strong rules under different support thresholds"),
    ):
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(sups, values, marker="o")
        ax.set_xscale("log")
        ax.invert_xaxis()
        ax.set_xlabel("min_sup")
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        fig.tight_layout()
        path = outdir / fname
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written
