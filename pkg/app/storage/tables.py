from __future__ import annotations

"""
CSV tables: sweep results, pilot plans and classifier traces.

Floats are written with 12 significant digits and rows keep the order of
the source table, so re-emitting a table gives a byte-identical file.
"""

import csv
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, List

from ..domain.classifier import TraceRow
from ..domain.performance import MetricsRow
from ..domain.scheduler import PilotPlan
from ..errors import EmptyTableError, OutputError

if TYPE_CHECKING:
    from ..services.sweeps import ResultTable

SWEEP_HEADER = [
    "M",
    "class_n",
    "K_prime",
    "L_prime",
    "sinr_linear",
    "sinr_db",
    "se_bits_per_s_per_hz",
    "ee_normalized",
]
PLAN_HEADER = ["user_id", "cell_id", "class_n", "pilot_id", "phase"]
TRACE_HEADER = ["slot", "user_id", "class_n", "persisted", "cell_id"]


def _fmt(value: float) -> str:
    return f"{float(value):.12g}"


def _write_rows(path: str | Path, header: List[str], rows: Iterable[List[object]]) -> Path:
    p = Path(path)
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        with p.open("w", encoding="utf-8", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow(row)
    except OSError as exc:
        raise OutputError(f"cannot write {p}: {exc}") from exc
    return p


def emit_csv(table: "ResultTable", path: str | Path) -> Path:
    if not len(table):
        raise EmptyTableError("refusing to write an empty result table")
    return _write_rows(
        path,
        SWEEP_HEADER,
        (
            [r.M, r.class_n, r.K_prime, r.L_prime, _fmt(r.sinr), _fmt(r.sinr_db), _fmt(r.se), _fmt(r.ee)]
            for r in table.rows
        ),
    )


def read_csv(path: str | Path) -> List[MetricsRow]:
    """Parse a sweep CSV back into rows; ``K_n`` is not stored and comes back as 0."""
    p = Path(path)
    try:
        with p.open("r", encoding="utf-8", newline="") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames != SWEEP_HEADER:
                raise OutputError(f"{p} does not carry the sweep header")
            return [
                MetricsRow(
                    M=int(rec["M"]),
                    class_n=int(rec["class_n"]),
                    K_n=0,
                    sinr=float(rec["sinr_linear"]),
                    se=float(rec["se_bits_per_s_per_hz"]),
                    ee=float(rec["ee_normalized"]),
                    K_prime=int(rec["K_prime"]),
                    L_prime=int(rec["L_prime"]),
                )
                for rec in reader
            ]
    except OSError as exc:
        raise OutputError(f"cannot read {p}: {exc}") from exc


def export_plan_csv(plan: PilotPlan, path: str | Path) -> Path:
    rows = sorted(plan.assignments, key=lambda a: (a.cell_id, a.user_id))
    return _write_rows(path, PLAN_HEADER, ([a.user_id, a.cell_id, a.class_n, a.pilot_id, a.phase] for a in rows))


def export_trace_csv(trace: Iterable[TraceRow], path: str | Path) -> Path:
    """Classifier trace; ``cell_id`` follows the four per-user columns and is 0 for single-cell runs."""
    return _write_rows(
        path, TRACE_HEADER, ([r.slot, r.user_id, r.class_n, int(r.persisted), r.cell_id] for r in trace)
    )
