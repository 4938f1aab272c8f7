"""Rendering of side-by-side panels from grid.csv files."""

from __future__ import annotations

import csv

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .spec import FigureSpec, SchemaError

# one fixed style per series so the truth is always distinguishable
_STYLES = {
    "m_true": dict(color="black", linestyle="-", linewidth=1.6, label="true"),
    "m_rer": dict(color="tab:blue", linestyle="--", linewidth=1.3, label="RER"),
    "m_cr": dict(color="tab:red", linestyle="-.", linewidth=1.3, label="CR"),
    "m_pseudo": dict(color="tab:green", linestyle=":", linewidth=1.3,
                     label="pseudo"),
}


def read_grid_csv(path: str, series) -> tuple:
    """Read x plus the requested series columns; empty cells become NaN."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: empty file")
    header = rows[0]
    if "x" not in header:
        raise SchemaError(f"{path}: missing column 'x'")
    for name in series:
        if name not in header:
            raise SchemaError(f"{path}: missing column {name!r}")
    idx = {name: header.index(name) for name in ["x", *series]}
    data = {name: [] for name in idx}
    for row in rows[1:]:
        for name, j in idx.items():
            cell = row[j]
            data[name].append(float(cell) if cell != "" else np.nan)
    return np.asarray(data["x"]), {s: np.asarray(data[s]) for s in series}


def render(spec: FigureSpec) -> str:
    """Draw the panels left to right and write the image; returns out_path."""
    k = len(spec.panel_csvs)
    fig, axes = plt.subplots(1, k, figsize=(4.0 * k, 3.2), squeeze=False,
                             sharey=True)
    for ax, path, label in zip(axes[0], spec.panel_csvs, spec.labels):
        xs, columns = read_grid_csv(path, spec.series)
        for name in spec.series:
            ax.plot(xs, columns[name], **_STYLES[name])
        ax.set_title(label)
        ax.set_xlabel("x")
    axes[0][0].set_ylabel("m(x)")
    axes[0][-1].legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=150, metadata=_no_timestamp(spec.out_path))
    plt.close(fig)
    return spec.out_path


def _no_timestamp(out_path: str):
    # strip writer-dependent metadata so identical inputs give identical bytes
    if out_path.lower().endswith(".svg"):
        return {"Date": None}
    return {"Software": None}
