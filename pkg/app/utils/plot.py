from __future__ import annotations

"""
SVG rendering of sweep tables: one curve per class, M or the class index
on the x axis.

Figures are built with the object API (no pyplot state), so job workers
can render concurrently.
"""

from pathlib import Path
from typing import TYPE_CHECKING, Literal

import matplotlib
from matplotlib.figure import Figure

from ..errors import EmptyTableError, OutputError

if TYPE_CHECKING:
    from ..services.sweeps import ResultTable

Metric = Literal["ee", "se"]

# text stays as <text> elements; fixed salt gives stable element ids
matplotlib.rcParams["svg.fonttype"] = "none"
matplotlib.rcParams["svg.hashsalt"] = "mmimo-sim"

_YLABEL = {
    "ee": "Energy efficiency (bits/s/Hz per unit power)",
    "se": "Spectral efficiency (bits/s/Hz)",
}


def build_figure(table: "ResultTable", metric: Metric = "ee") -> Figure:
    if not len(table):
        raise EmptyTableError("refusing to plot an empty result table")
    fig = Figure(figsize=(8, 5))
    ax = fig.add_subplot()
    if table.variable == "antennas":
        for n in table.classes():
            series = table.series(n)
            ax.plot([r.M for r in series], [getattr(r, metric) for r in series], "o-", markersize=3, label=f"Class {n}")
        ax.set_xlabel("Number of BS antennas M")
    else:
        rows = sorted(table.rows, key=lambda r: r.class_n)
        ax.plot([r.class_n for r in rows], [getattr(r, metric) for r in rows], "o-", markersize=3, label=f"M = {rows[0].M}")
        ax.set_xlabel("Class index n")
    ax.set_ylabel(_YLABEL[metric])
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    fig.tight_layout()
    return fig


def emit_plot(table: "ResultTable", path: str | Path, metric: Metric = "ee") -> Path:
    fig = build_figure(table, metric)
    p = Path(path)
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(p, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise OutputError(f"cannot write {p}: {exc}") from exc
    return p
