"""Figure rendering from geomopt CSV files.

Two figure kinds are understood: ``hoffman_scaling`` (per-ensemble medians of
the support-restricted constant against ambient dimension, log-log, with a
sqrt(d) guide) and ``trajectory`` (cone ratio, active-set size, and Jaccard
similarity against iteration). The renderer never writes to its input.
"""

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

SCALING_COLUMNS = ("dim", "ensemble", "trial", "H_support_closed")
TRAJECTORY_COLUMNS = ("iter", "objective", "gap", "gradmap_norm",
                      "active_size", "jaccard", "cone_ratio")


class SchemaError(ValueError):
    """Input CSV does not carry the columns the figure needs."""

    def __init__(self, column):
        super().__init__(f"input CSV is missing required column {column!r}")
        self.column = column


@dataclass
class FigureSpec:
    input_csv: str
    figure: str  # hoffman_scaling | trajectory
    output: str
    log_axes: bool = True


@dataclass
class RenderResult:
    """Series actually drawn, for reproducibility checks."""

    output: str
    series: dict = field(default_factory=dict)


def load_table(path, required):
    table = pd.read_csv(path, comment="#")
    for column in required:
        if column not in table.columns:
            raise SchemaError(column)
    return table


def scaling_series(table):
    """Median support-restricted constant per (ensemble, dimension)."""
    clean = table[pd.to_numeric(table["H_support_closed"], errors="coerce").notna()]
    clean = clean.assign(H_support_closed=clean["H_support_closed"].astype(float))
    series = {}
    for ensemble, group in clean.groupby("ensemble"):
        med = group.groupby("dim")["H_support_closed"].median().sort_index()
        series[str(ensemble)] = (med.index.to_numpy(float), med.to_numpy(float))
    return series


def render_hoffman_scaling(spec: FigureSpec) -> RenderResult:
    table = load_table(spec.input_csv, SCALING_COLUMNS)
    series = scaling_series(table)
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for name, (dims, medians) in sorted(series.items()):
        ax.plot(dims, medians, marker="o", label=name)
    if series:
        dims_all = np.unique(np.concatenate([d for d, _ in series.values()]))
        anchor = min(m[0] for _, m in series.values())
        guide = anchor * np.sqrt(dims_all / dims_all[0])
        ax.plot(dims_all, guide, ls="--", color="gray", label=r"$\sqrt{d}$ guide")
    if spec.log_axes:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel("ambient dimension d")
    ax.set_ylabel("median restricted Hoffman constant")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(spec.output, dpi=150)
    plt.close(fig)
    return RenderResult(spec.output, series)


def render_trajectory(spec: FigureSpec) -> RenderResult:
    table = load_table(spec.input_csv, TRAJECTORY_COLUMNS)
    iters = table["iter"].to_numpy(float)
    cone = pd.to_numeric(table["cone_ratio"], errors="coerce").to_numpy(float)
    active = table["active_size"].to_numpy(float)
    jaccard = table["jaccard"].to_numpy(float)
    fig, axes = plt.subplots(3, 1, figsize=(6.0, 8.4), sharex=True)
    axes[0].plot(iters, cone, color="tab:blue")
    axes[0].axhline(1.0, ls="--", color="gray", lw=1, label="cone ratio 1")
    axes[0].axhline(3.0, ls=":", color="gray", lw=1, label="cone ratio 3")
    axes[0].set_ylabel("active cone ratio")
    axes[0].legend(frameon=False, fontsize=8)
    axes[1].plot(iters, active, color="tab:orange")
    axes[1].set_ylabel("active-set size")
    axes[2].plot(iters, jaccard, color="tab:green")
    axes[2].set_ylabel("Jaccard similarity")
    axes[2].set_ylim(-0.05, 1.05)
    axes[2].set_xlabel("iteration")
    fig.tight_layout()
    fig.savefig(spec.output, dpi=150)
    plt.close(fig)
    series = {"cone_ratio": (iters, cone), "active_size": (iters, active),
              "jaccard": (iters, jaccard)}
    return RenderResult(spec.output, series)


def render(spec: FigureSpec) -> RenderResult:
    if spec.figure == "hoffman_scaling":
        return render_hoffman_scaling(spec)
    if spec.figure == "trajectory":
        return render_trajectory(spec)
    raise ValueError(f"unknown figure kind {spec.figure!r}")
