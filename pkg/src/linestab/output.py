"""Machine-readable output: CSV/JSON writers with lossless float formatting.

All floats print with 17 significant digits in scientific notation ('.'
decimal separator), so every row re-parses to the exact double that
produced it.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .scan import BifurcationEvent
from .semiclassical import CompareRow

__all__ = [
    "fmt", "write_scan", "read_scan_csv", "write_compare", "read_compare_csv",
    "write_events", "write_semiclassical",
    "SCAN_COLUMNS", "COMPARE_COLUMNS",
]

SCAN_COLUMNS = ("rho", "eig_index", "re_lambda", "im_lambda",
                "residual", "localization", "label")
COMPARE_COLUMNS = ("epsilon", "rho", "mode", "route",
                   "growth_rate", "im_omega", "status")
SEMICLASSICAL_COLUMNS = (
    "epsilon", "mode", "re_curly_e", "im_curly_e", "re_omega", "im_omega",
    "re_k", "im_k", "re_tail", "im_tail", "psi_inf", "growth_rate",
    "iterations", "residual",
)


def fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{x:.16e}"


def _scan_rows(slices):
    for sl in slices:
        for i, lam in enumerate(sl.eigenvalues):
            yield (fmt(sl.rho), str(i), fmt(lam.real), fmt(lam.imag),
                   fmt(float(sl.residuals[i])), fmt(float(sl.localization[i])),
                   sl.labels[i])


def write_scan(path: str | Path, slices, fmt_kind: str = "csv",
               trailer: str | None = None) -> Path:
    """scan.csv / scan.json with one row per (rho, eigenvalue).

    `trailer` appends an error marker row (eig_index -1) after partial
    results when a solver failed mid-scan.
    """
    path = Path(path)
    if fmt_kind == "json":
        rows = [dict(zip(SCAN_COLUMNS, r)) for r in _scan_rows(slices)]
        if trailer:
            rows.append({"rho": "", "eig_index": "-1", "label": trailer})
        path.write_text(json.dumps(rows, indent=1) + "\n")
        return path
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SCAN_COLUMNS)
        for row in _scan_rows(slices):
            w.writerow(row)
        if trailer:
            w.writerow(("", "-1", "", "", "", "", trailer))
    return path


def read_scan_csv(path: str | Path):
    """Rows of scan.csv as dicts with floats restored."""
    out = []
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            if row["eig_index"] == "-1":
                continue
            out.append({
                "rho": float(row["rho"]),
                "eig_index": int(row["eig_index"]),
                "re_lambda": float(row["re_lambda"]),
                "im_lambda": float(row["im_lambda"]),
                "residual": float(row["residual"]),
                "localization": float(row["localization"]),
                "label": row["label"],
            })
    return out


def write_compare(path: str | Path, rows: list[CompareRow],
                  fmt_kind: str = "csv") -> Path:
    path = Path(path)
    str_rows = [
        (fmt(r.epsilon), fmt(r.rho), r.mode, r.route,
         fmt(r.growth_rate), fmt(r.im_omega), r.status)
        for r in rows
    ]
    if fmt_kind == "json":
        path.write_text(json.dumps(
            [dict(zip(COMPARE_COLUMNS, r)) for r in str_rows], indent=1) + "\n")
        return path
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(COMPARE_COLUMNS)
        w.writerows(str_rows)
    return path


def read_compare_csv(path: str | Path) -> list[CompareRow]:
    out = []
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(CompareRow(
                epsilon=float(row["epsilon"]), rho=float(row["rho"]),
                mode=row["mode"], route=row["route"],
                growth_rate=float(row["growth_rate"]),
                im_omega=float(row["im_omega"]), status=row["status"]))
    return out


def write_events(path: str | Path, events: list[BifurcationEvent]) -> Path:
    path = Path(path)
    payload = [
        {"kind": e.kind.value, "rho_estimate": e.rho_estimate,
         "bracket": [e.bracket[0], e.bracket[1]]}
        for e in events
    ]
    path.write_text(json.dumps(payload, indent=1) + "\n")
    return path


def write_semiclassical(path: str | Path, solutions, fmt_kind: str = "csv") -> Path:
    path = Path(path)
    rows = [
        (fmt(s.epsilon), s.mode.name, fmt(s.curly_e.real), fmt(s.curly_e.imag),
         fmt(s.omega.real), fmt(s.omega.imag), fmt(s.k.real), fmt(s.k.imag),
         fmt(s.tail_amplitude.real), fmt(s.tail_amplitude.imag),
         fmt(s.psi_inf), fmt(s.growth_rate), str(s.iterations), fmt(s.residual))
        for s in solutions
    ]
    if fmt_kind == "json":
        path.write_text(json.dumps(
            [dict(zip(SEMICLASSICAL_COLUMNS, r)) for r in rows], indent=1) + "\n")
        return path
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SEMICLASSICAL_COLUMNS)
        w.writerows(rows)
    return path
